#include "crossview/ingest.hpp"

#include "crossview/csv.hpp"
#include "crossview/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

namespace crossview::ingest {

namespace {

std::optional<double> parse_double(std::string_view s) {
    double value = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), value);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::int64_t> parse_i64(std::string_view s) {
    std::int64_t value = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), value);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return value;
}

// Year from a date string in any common layout: the first 4-digit run with
// a plausible value wins ("13/02/2015" → 2015, "2015-02-13" → 2015).
std::optional<int> year_from_date(std::string_view date) {
    for (std::size_t i = 0; i + 4 <= date.size(); ++i) {
        const bool run_start = i == 0 || !std::isdigit(static_cast<unsigned char>(date[i - 1]));
        if (!run_start) continue;
        bool four_digits = true;
        for (std::size_t j = 0; j < 4; ++j) {
            if (!std::isdigit(static_cast<unsigned char>(date[i + j]))) {
                four_digits = false;
                break;
            }
        }
        if (!four_digits) continue;
        if (i + 4 < date.size() && std::isdigit(static_cast<unsigned char>(date[i + 4]))) {
            continue;
        }
        int year = 0;
        std::from_chars(date.data() + i, date.data() + i + 4, year);
        if (year >= 1900 && year <= 2100) return year;
    }
    return std::nullopt;
}

std::size_t require_column(const io::CsvTable& table, const std::string& name) {
    const auto idx = table.column(name);
    if (!idx) {
        throw SchemaError("missing column \"" + name + "\"");
    }
    return *idx;
}

const std::string* cell(const std::vector<std::string>& row, std::size_t idx) {
    return idx < row.size() ? &row[idx] : nullptr;
}

} // namespace

AccidentParse parse_accident_csv(std::string_view text, int min_year,
                                 const AccidentColumns& columns) {
    const io::CsvTable table = io::parse_csv(text);

    const std::size_t lon_col = require_column(table, columns.longitude);
    const std::size_t lat_col = require_column(table, columns.latitude);
    const std::size_t sev_col = require_column(table, columns.severity);
    const auto year_col = table.column(columns.year);
    const auto date_col = table.column(columns.date);
    if (!year_col && !date_col) {
        throw SchemaError("missing column \"" + columns.year + "\" (or \"" +
                          columns.date + "\")");
    }
    const auto id_col = table.column(columns.id);

    AccidentParse out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string* lon_s = cell(row, lon_col);
        const std::string* lat_s = cell(row, lat_col);
        const std::string* sev_s = cell(row, sev_col);
        if (lon_s == nullptr || lat_s == nullptr || sev_s == nullptr) {
            ++out.rejected;
            continue;
        }
        const auto lon = parse_double(*lon_s);
        const auto lat = parse_double(*lat_s);
        if (!lon || !lat) {
            ++out.rejected;
            continue;
        }
        std::optional<int> year;
        if (year_col) {
            if (const std::string* y = cell(row, *year_col)) {
                if (const auto v = parse_i64(*y)) year = static_cast<int>(*v);
            }
        }
        if (!year && date_col) {
            if (const std::string* d = cell(row, *date_col)) {
                year = year_from_date(*d);
            }
        }
        if (!year || *year < 1979 || *year < min_year) {
            ++out.rejected;
            continue;
        }
        AccidentRecord rec;
        if (id_col) {
            if (const std::string* id = cell(row, *id_col)) rec.accident_id = *id;
        }
        if (rec.accident_id.empty()) {
            rec.accident_id = "row-" + std::to_string(r + 1);
        }
        rec.location = geom::GeoPoint{*lon, *lat};
        rec.year = *year;
        rec.severity = *sev_s;
        out.records.push_back(std::move(rec));
    }
    return out;
}

TrafficParse parse_aadf_csv(std::string_view text, const TrafficColumns& columns) {
    const io::CsvTable table = io::parse_csv(text);

    const std::size_t id_col = require_column(table, columns.id);
    const std::size_t lat_col = require_column(table, columns.latitude);
    const std::size_t lon_col = require_column(table, columns.longitude);
    const std::size_t flow_col = require_column(table, columns.flow);

    TrafficParse out;
    for (const auto& row : table.rows) {
        const std::string* id_s = cell(row, id_col);
        const std::string* lat_s = cell(row, lat_col);
        const std::string* lon_s = cell(row, lon_col);
        const std::string* flow_s = cell(row, flow_col);
        if (id_s == nullptr || lat_s == nullptr || lon_s == nullptr ||
            flow_s == nullptr) {
            ++out.rejected;
            continue;
        }
        const auto id = parse_i64(*id_s);
        const auto lat = parse_double(*lat_s);
        const auto lon = parse_double(*lon_s);
        const auto flow = parse_double(*flow_s);
        if (!id || !lat || !lon || !flow || *flow < 0.0) {
            ++out.rejected;
            continue;
        }
        out.points.push_back(TrafficCountPoint{*id, geom::GeoPoint{*lon, *lat}, *flow});
    }
    return out;
}

namespace {

template <typename T, typename Keep>
std::vector<T> filter(std::vector<T> items, Keep keep) {
    std::vector<T> out;
    out.reserve(items.size());
    for (T& item : items) {
        if (keep(item)) out.push_back(std::move(item));
    }
    return out;
}

} // namespace

std::vector<AccidentRecord> clip_to_area(std::vector<AccidentRecord> items,
                                         const StudyArea& area) {
    const double radius = area.radius_deg();
    return filter(std::move(items), [&](const AccidentRecord& a) {
        return geom::within_radius(area.center, a.location, radius);
    });
}

std::vector<TrafficCountPoint> clip_to_area(std::vector<TrafficCountPoint> items,
                                            const StudyArea& area) {
    const double radius = area.radius_deg();
    return filter(std::move(items), [&](const TrafficCountPoint& p) {
        return geom::within_radius(area.center, p.location, radius);
    });
}

std::vector<RoadSegment> clip_to_area(std::vector<RoadSegment> items,
                                      const StudyArea& area) {
    const double radius = area.radius_deg();
    return filter(std::move(items), [&](const RoadSegment& seg) {
        return std::any_of(seg.geometry.begin(), seg.geometry.end(),
                           [&](const geom::GeoPoint& v) {
                               return geom::within_radius(area.center, v, radius);
                           });
    });
}

std::vector<BuildingFootprint> clip_to_area(std::vector<BuildingFootprint> items,
                                            const StudyArea& area) {
    const double radius = area.radius_deg();
    return filter(std::move(items), [&](const BuildingFootprint& fp) {
        return std::any_of(fp.ring.vertices.begin(), fp.ring.vertices.end(),
                           [&](const geom::GeoPoint& v) {
                               return geom::within_radius(area.center, v, radius);
                           });
    });
}

} // namespace crossview::ingest
