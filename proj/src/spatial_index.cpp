#include "crossview/spatial_index.hpp"

#include "crossview/errors.hpp"

#include <algorithm>
#include <cmath>

namespace crossview::geom {

namespace {

std::int64_t cell_coord(double v, double origin, double cell_size) {
    return static_cast<std::int64_t>(std::floor((v - origin) / cell_size));
}

std::uint64_t pack_key(std::int64_t ix, std::int64_t iy) {
    // Cell coordinates stay far below 2^32 for any usable cell size.
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(iy));
}

} // namespace

BoxGrid::BoxGrid(std::vector<Bbox> boxes, double cell_size)
    : boxes_(std::move(boxes)), cell_size_(cell_size) {
    if (cell_size_ <= 0.0) {
        throw ValidationError("BoxGrid requires cell_size > 0");
    }
    if (boxes_.empty()) return;
    origin_x_ = boxes_[0].min_lon;
    origin_y_ = boxes_[0].min_lat;
    for (const Bbox& b : boxes_) {
        origin_x_ = std::min(origin_x_, b.min_lon);
        origin_y_ = std::min(origin_y_, b.min_lat);
    }
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
        const Bbox& b = boxes_[i];
        const std::int64_t x0 = cell_coord(b.min_lon, origin_x_, cell_size_);
        const std::int64_t x1 = cell_coord(b.max_lon, origin_x_, cell_size_);
        const std::int64_t y0 = cell_coord(b.min_lat, origin_y_, cell_size_);
        const std::int64_t y1 = cell_coord(b.max_lat, origin_y_, cell_size_);
        for (std::int64_t ix = x0; ix <= x1; ++ix) {
            for (std::int64_t iy = y0; iy <= y1; ++iy) {
                cells_[pack_key(ix, iy)].push_back(i);
            }
        }
    }
}

std::uint64_t BoxGrid::cell_key(std::int64_t ix, std::int64_t iy) const {
    return pack_key(ix, iy);
}

std::vector<std::size_t> BoxGrid::query_disc(const GeoPoint& center, double radius) const {
    if (radius <= 0.0) {
        throw ValidationError("query_disc requires radius > 0");
    }
    std::vector<std::size_t> result;
    if (boxes_.empty()) return result;

    const std::int64_t x0 = cell_coord(center.lon - radius, origin_x_, cell_size_);
    const std::int64_t x1 = cell_coord(center.lon + radius, origin_x_, cell_size_);
    const std::int64_t y0 = cell_coord(center.lat - radius, origin_y_, cell_size_);
    const std::int64_t y1 = cell_coord(center.lat + radius, origin_y_, cell_size_);
    for (std::int64_t ix = x0; ix <= x1; ++ix) {
        for (std::int64_t iy = y0; iy <= y1; ++iy) {
            auto it = cells_.find(cell_key(ix, iy));
            if (it == cells_.end()) continue;
            for (std::size_t idx : it->second) {
                if (boxes_[idx].intersects_disc(center, radius)) {
                    result.push_back(idx);
                }
            }
        }
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

PointGrid::PointGrid(std::vector<Entry> entries, double cell_size)
    : entries_(std::move(entries)), cell_size_(cell_size) {
    if (cell_size_ <= 0.0) {
        throw ValidationError("PointGrid requires cell_size > 0");
    }
    if (entries_.empty()) return;
    origin_x_ = entries_[0].position.lon;
    origin_y_ = entries_[0].position.lat;
    for (const Entry& e : entries_) {
        origin_x_ = std::min(origin_x_, e.position.lon);
        origin_y_ = std::min(origin_y_, e.position.lat);
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const std::int64_t ix = cell_coord(entries_[i].position.lon, origin_x_, cell_size_);
        const std::int64_t iy = cell_coord(entries_[i].position.lat, origin_y_, cell_size_);
        cells_[pack_key(ix, iy)].push_back(i);
    }
}

std::uint64_t PointGrid::cell_key(std::int64_t ix, std::int64_t iy) const {
    return pack_key(ix, iy);
}

void PointGrid::scan_cell(std::int64_t ix, std::int64_t iy, const GeoPoint& query,
                          std::optional<Neighbor>& best) const {
    auto it = cells_.find(cell_key(ix, iy));
    if (it == cells_.end()) return;
    for (std::size_t idx : it->second) {
        const double d2 = distance_sq(query, entries_[idx].position);
        if (!best) {
            best = Neighbor{idx, d2};
            continue;
        }
        const double b2 = best->dist;
        if (d2 < b2 ||
            (d2 == b2 && (entries_[idx].id < entries_[best->index].id ||
                          (entries_[idx].id == entries_[best->index].id && idx < best->index)))) {
            best = Neighbor{idx, d2};
        }
    }
}

std::optional<PointGrid::Neighbor> PointGrid::nearest(const GeoPoint& query,
                                                      double max_radius) const {
    if (max_radius <= 0.0) {
        throw ValidationError("nearest requires max_radius > 0");
    }
    if (entries_.empty()) return std::nullopt;

    const std::int64_t cx = cell_coord(query.lon, origin_x_, cell_size_);
    const std::int64_t cy = cell_coord(query.lat, origin_y_, cell_size_);

    // Expand in square rings. Cells in ring r are at least (r-1)*cell_size
    // from the query, so once that bound exceeds both the current best and
    // max_radius the search is complete. best->dist holds squared distance
    // during the scan.
    std::optional<Neighbor> best;
    const std::int64_t max_ring =
        static_cast<std::int64_t>(std::ceil(max_radius / cell_size_)) + 1;
    for (std::int64_t r = 0; r <= max_ring + 1; ++r) {
        if (r > 0) {
            const double ring_min = static_cast<double>(r - 1) * cell_size_;
            const double cutoff = best ? std::min(std::sqrt(best->dist), max_radius)
                                       : max_radius;
            if (ring_min > cutoff) break;
        }
        if (r == 0) {
            scan_cell(cx, cy, query, best);
            continue;
        }
        for (std::int64_t ix = cx - r; ix <= cx + r; ++ix) {
            scan_cell(ix, cy - r, query, best);
            scan_cell(ix, cy + r, query, best);
        }
        for (std::int64_t iy = cy - r + 1; iy <= cy + r - 1; ++iy) {
            scan_cell(cx - r, iy, query, best);
            scan_cell(cx + r, iy, query, best);
        }
    }
    if (!best) return std::nullopt;
    const double d = std::sqrt(best->dist);
    if (best->dist > max_radius * max_radius) return std::nullopt;
    return Neighbor{best->index, d};
}

} // namespace crossview::geom
