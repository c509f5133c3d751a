#include "crossview/errors.hpp"
#include "crossview/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crossview::ingest {

namespace {

constexpr std::string_view kDrivable[] = {
    "motorway", "trunk",       "primary",       "secondary", "tertiary",
    "unclassified", "residential", "living_street", "service"};

bool is_drivable(std::string_view highway) {
    return std::find(std::begin(kDrivable), std::end(kDrivable), highway) !=
           std::end(kDrivable);
}

HighwayClass classify_highway(std::string_view highway) {
    if (highway == "primary") return HighwayClass::primary;
    if (highway == "secondary") return HighwayClass::secondary;
    return HighwayClass::other;
}

struct Attr {
    std::string_view name;
    std::string_view raw_value; // entities still encoded
    std::size_t value_offset = 0;
};

struct Tag {
    std::string_view name;
    std::vector<Attr> attrs;
    bool closing = false;
    bool self_closing = false;
    std::size_t offset = 0;
};

bool name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == ':' || c == '-' || c == '.';
}

bool space_char(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

std::string decode_entities(std::string_view raw, std::size_t offset) {
    if (raw.find('&') == std::string_view::npos) return std::string(raw);
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
        if (raw[i] != '&') {
            out.push_back(raw[i]);
            ++i;
            continue;
        }
        const std::size_t semi = raw.find(';', i);
        if (semi == std::string_view::npos) {
            throw ParseError("unterminated entity reference", offset + i);
        }
        const std::string_view entity = raw.substr(i + 1, semi - i - 1);
        if (entity == "amp") {
            out.push_back('&');
        } else if (entity == "lt") {
            out.push_back('<');
        } else if (entity == "gt") {
            out.push_back('>');
        } else if (entity == "quot") {
            out.push_back('"');
        } else if (entity == "apos") {
            out.push_back('\'');
        } else if (!entity.empty() && entity[0] == '#') {
            std::uint32_t code = 0;
            std::from_chars_result r{};
            if (entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X')) {
                r = std::from_chars(entity.data() + 2, entity.data() + entity.size(),
                                    code, 16);
            } else {
                r = std::from_chars(entity.data() + 1, entity.data() + entity.size(),
                                    code, 10);
            }
            if (r.ec != std::errc{} || r.ptr != entity.data() + entity.size() ||
                code == 0 || code > 0x10FFFF) {
                throw ParseError("bad numeric character reference", offset + i);
            }
            // UTF-8 encode.
            if (code < 0x80) {
                out.push_back(static_cast<char>(code));
            } else if (code < 0x800) {
                out.push_back(static_cast<char>(0xC0 | (code >> 6)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else if (code < 0x10000) {
                out.push_back(static_cast<char>(0xE0 | (code >> 12)));
                out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            } else {
                out.push_back(static_cast<char>(0xF0 | (code >> 18)));
                out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
                out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
            }
        } else {
            throw ParseError("unknown entity reference", offset + i);
        }
        i = semi + 1;
    }
    return out;
}

// Minimal forward-only scanner for the OSM XML subset: node, way, nd, tag
// elements plus comments, processing instructions, and doctype noise.
class XmlScanner {
public:
    explicit XmlScanner(std::string_view text) : text_(text) {}

    // Next element tag, skipping text content and markup noise. nullopt at
    // end of input.
    std::optional<Tag> next() {
        while (true) {
            const std::size_t lt = text_.find('<', pos_);
            if (lt == std::string_view::npos) {
                pos_ = text_.size();
                return std::nullopt;
            }
            pos_ = lt;
            if (starts_with(lt, "<?")) {
                skip_until(lt, "?>", "unterminated processing instruction");
                continue;
            }
            if (starts_with(lt, "<!--")) {
                skip_until(lt, "-->", "unterminated comment");
                continue;
            }
            if (starts_with(lt, "<![CDATA[")) {
                skip_until(lt, "]]>", "unterminated CDATA section");
                continue;
            }
            if (starts_with(lt, "<!")) {
                skip_until(lt, ">", "unterminated declaration");
                continue;
            }
            return read_tag(lt);
        }
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    bool starts_with(std::size_t at, std::string_view prefix) const {
        return text_.substr(at, prefix.size()) == prefix;
    }

    void skip_until(std::size_t from, std::string_view terminator,
                    const char* what) {
        const std::size_t end = text_.find(terminator, from);
        if (end == std::string_view::npos) {
            throw ParseError(what, from);
        }
        pos_ = end + terminator.size();
    }

    Tag read_tag(std::size_t lt) {
        Tag tag;
        tag.offset = lt;
        std::size_t p = lt + 1;
        if (p < text_.size() && text_[p] == '/') {
            tag.closing = true;
            ++p;
        }
        const std::size_t name_start = p;
        while (p < text_.size() && name_char(text_[p])) ++p;
        if (p == name_start) {
            throw ParseError("missing element name", lt);
        }
        tag.name = text_.substr(name_start, p - name_start);

        while (true) {
            while (p < text_.size() && space_char(text_[p])) ++p;
            if (p >= text_.size()) {
                throw ParseError("unterminated element", lt);
            }
            if (text_[p] == '>') {
                ++p;
                break;
            }
            if (text_[p] == '/') {
                if (p + 1 >= text_.size() || text_[p + 1] != '>') {
                    throw ParseError("malformed element close", p);
                }
                tag.self_closing = true;
                p += 2;
                break;
            }
            if (tag.closing) {
                throw ParseError("attributes on closing tag", p);
            }
            Attr attr;
            const std::size_t attr_start = p;
            while (p < text_.size() && name_char(text_[p])) ++p;
            if (p == attr_start) {
                throw ParseError("malformed attribute name", attr_start);
            }
            attr.name = text_.substr(attr_start, p - attr_start);
            while (p < text_.size() && space_char(text_[p])) ++p;
            if (p >= text_.size() || text_[p] != '=') {
                throw ParseError("attribute missing '='", p);
            }
            ++p;
            while (p < text_.size() && space_char(text_[p])) ++p;
            if (p >= text_.size() || (text_[p] != '"' && text_[p] != '\'')) {
                throw ParseError("attribute value must be quoted", p);
            }
            const char quote = text_[p];
            ++p;
            attr.value_offset = p;
            const std::size_t value_end = text_.find(quote, p);
            if (value_end == std::string_view::npos) {
                throw ParseError("unterminated attribute value", attr.value_offset);
            }
            attr.raw_value = text_.substr(p, value_end - p);
            p = value_end + 1;
            tag.attrs.push_back(attr);
        }
        pos_ = p;
        return tag;
    }
};

const Attr* find_attr(const Tag& tag, std::string_view name) {
    for (const Attr& a : tag.attrs) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

std::int64_t parse_i64_attr(const Tag& tag, std::string_view name) {
    const Attr* a = find_attr(tag, name);
    if (a == nullptr) {
        throw ParseError(std::string("missing attribute \"") + std::string(name) + "\"",
                         tag.offset);
    }
    std::int64_t value = 0;
    const auto r = std::from_chars(a->raw_value.data(),
                                   a->raw_value.data() + a->raw_value.size(), value);
    if (r.ec != std::errc{} || r.ptr != a->raw_value.data() + a->raw_value.size()) {
        throw ParseError(std::string("bad integer attribute \"") + std::string(name) + "\"",
                         a->value_offset);
    }
    return value;
}

double parse_f64_attr(const Tag& tag, std::string_view name) {
    const Attr* a = find_attr(tag, name);
    if (a == nullptr) {
        throw ParseError(std::string("missing attribute \"") + std::string(name) + "\"",
                         tag.offset);
    }
    double value = 0.0;
    const auto r = std::from_chars(a->raw_value.data(),
                                   a->raw_value.data() + a->raw_value.size(), value);
    if (r.ec != std::errc{} || r.ptr != a->raw_value.data() + a->raw_value.size() ||
        !std::isfinite(value)) {
        throw ParseError(std::string("bad numeric attribute \"") + std::string(name) + "\"",
                         a->value_offset);
    }
    return value;
}

std::optional<MaxSpeed> parse_maxspeed(std::string_view raw) {
    std::size_t i = 0;
    while (i < raw.size() && space_char(raw[i])) ++i;
    double value = 0.0;
    const auto r = std::from_chars(raw.data() + i, raw.data() + raw.size(), value);
    if (r.ec != std::errc{} || value <= 0.0 || !std::isfinite(value)) {
        return std::nullopt;
    }
    std::string_view rest(r.ptr, raw.data() + raw.size() - r.ptr);
    while (!rest.empty() && space_char(rest.front())) rest.remove_prefix(1);
    while (!rest.empty() && space_char(rest.back())) rest.remove_suffix(1);
    if (rest.empty() || rest == "km/h" || rest == "kmh" || rest == "kph") {
        return MaxSpeed{value, SpeedUnit::kmh};
    }
    if (rest == "mph") {
        return MaxSpeed{value, SpeedUnit::mph};
    }
    return std::nullopt;
}

struct PendingWay {
    std::int64_t way_id = 0;
    std::vector<std::int64_t> refs;
    std::vector<std::pair<std::string, std::string>> tags;

    std::string_view tag_value(std::string_view key) const {
        for (const auto& [k, v] : tags) {
            if (k == key) return v;
        }
        return {};
    }
};

} // namespace

OsmData parse_osm_extract(std::string_view xml, const StudyArea& area) {
    if (area.radius_m <= 0.0) {
        throw ValidationError("study area radius must be positive");
    }

    std::unordered_map<std::int64_t, geom::GeoPoint> nodes;
    std::vector<PendingWay> ways;

    XmlScanner scanner(xml);
    std::optional<PendingWay> current;
    while (auto tag = scanner.next()) {
        if (tag->name == "node" && !tag->closing) {
            const std::int64_t id = parse_i64_attr(*tag, "id");
            const double lat = parse_f64_attr(*tag, "lat");
            const double lon = parse_f64_attr(*tag, "lon");
            nodes[id] = geom::GeoPoint{lon, lat};
            continue;
        }
        if (tag->name == "node" && tag->closing) {
            continue;
        }
        if (tag->name == "way" && !tag->closing) {
            if (current) {
                throw ParseError("nested way element", tag->offset);
            }
            current.emplace();
            current->way_id = parse_i64_attr(*tag, "id");
            if (tag->self_closing) {
                ways.push_back(std::move(*current));
                current.reset();
            }
            continue;
        }
        if (tag->name == "way" && tag->closing) {
            if (!current) {
                throw ParseError("stray closing way element", tag->offset);
            }
            ways.push_back(std::move(*current));
            current.reset();
            continue;
        }
        if (tag->name == "nd" && current) {
            current->refs.push_back(parse_i64_attr(*tag, "ref"));
            continue;
        }
        if (tag->name == "tag") {
            const Attr* k = find_attr(*tag, "k");
            const Attr* v = find_attr(*tag, "v");
            if (k == nullptr || v == nullptr) {
                throw ParseError("tag element missing k or v attribute", tag->offset);
            }
            if (current) {
                current->tags.emplace_back(decode_entities(k->raw_value, k->value_offset),
                                           decode_entities(v->raw_value, v->value_offset));
            }
            continue;
        }
        // relation and metadata elements are ignored wholesale
    }
    if (current) {
        throw ParseError("unterminated way element", xml.size());
    }

    OsmData data;
    for (const PendingWay& way : ways) {
        const std::string_view highway = way.tag_value("highway");
        const std::string_view building = way.tag_value("building");

        if (!highway.empty() && is_drivable(highway) &&
            way.tag_value("junction") != "roundabout") {
            if (way.refs.size() < 2) {
                ++data.skipped_ways;
                continue;
            }
            RoadSegment seg;
            seg.way_id = way.way_id;
            seg.highway_class = classify_highway(highway);
            seg.max_speed = parse_maxspeed(way.tag_value("maxspeed"));
            bool complete = true;
            for (std::int64_t ref : way.refs) {
                const auto it = nodes.find(ref);
                if (it == nodes.end()) {
                    complete = false;
                    break;
                }
                seg.geometry.push_back(it->second);
                seg.node_ids.push_back(ref);
            }
            if (!complete) {
                ++data.skipped_ways;
                continue;
            }
            data.roads.push_back(std::move(seg));
            continue;
        }

        if (!building.empty() && building != "no") {
            // Outline must be explicitly closed (first ref repeated last).
            if (way.refs.size() < 4 || way.refs.front() != way.refs.back()) {
                ++data.skipped_ways;
                continue;
            }
            BuildingFootprint fp;
            fp.way_id = way.way_id;
            bool complete = true;
            for (std::size_t i = 0; i + 1 < way.refs.size(); ++i) {
                const auto it = nodes.find(way.refs[i]);
                if (it == nodes.end()) {
                    complete = false;
                    break;
                }
                fp.ring.vertices.push_back(it->second);
            }
            if (!complete) {
                ++data.skipped_ways;
                continue;
            }
            try {
                geom::validate_ring(fp.ring);
            } catch (const ValidationError&) {
                ++data.skipped_ways;
                continue;
            }
            fp.tags = way.tags;
            data.buildings.push_back(std::move(fp));
        }
    }

    data.roads = clip_to_area(std::move(data.roads), area);
    data.buildings = clip_to_area(std::move(data.buildings), area);
    return data;
}

} // namespace crossview::ingest
