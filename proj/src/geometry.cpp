#include "crossview/geometry.hpp"

#include "crossview/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crossview::geom {

namespace {

double cross(double ax, double ay, double bx, double by) {
    return ax * by - ay * bx;
}

// Squared distance from p to segment [a, b].
double dist_sq_point_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    const double vx = b.lon - a.lon;
    const double vy = b.lat - a.lat;
    const double wx = p.lon - a.lon;
    const double wy = p.lat - a.lat;
    const double vv = vx * vx + vy * vy;
    if (vv == 0.0) {
        return wx * wx + wy * wy;
    }
    double t = (wx * vx + wy * vy) / vv;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = wx - t * vx;
    const double dy = wy - t * vy;
    return dx * dx + dy * dy;
}

bool segments_properly_cross(const GeoPoint& a, const GeoPoint& b,
                             const GeoPoint& c, const GeoPoint& d) {
    const double d1 = cross(b.lon - a.lon, b.lat - a.lat, c.lon - a.lon, c.lat - a.lat);
    const double d2 = cross(b.lon - a.lon, b.lat - a.lat, d.lon - a.lon, d.lat - a.lat);
    const double d3 = cross(d.lon - c.lon, d.lat - c.lat, a.lon - c.lon, a.lat - c.lat);
    const double d4 = cross(d.lon - c.lon, d.lat - c.lat, b.lon - c.lon, b.lat - c.lat);
    return ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0));
}

} // namespace

double distance_sq(const GeoPoint& a, const GeoPoint& b) {
    const double dx = b.lon - a.lon;
    const double dy = b.lat - a.lat;
    return dx * dx + dy * dy;
}

double distance(const GeoPoint& a, const GeoPoint& b) {
    return std::sqrt(distance_sq(a, b));
}

void Bbox::expand(const GeoPoint& p) {
    min_lon = std::min(min_lon, p.lon);
    min_lat = std::min(min_lat, p.lat);
    max_lon = std::max(max_lon, p.lon);
    max_lat = std::max(max_lat, p.lat);
}

bool Bbox::contains(const GeoPoint& p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
}

bool Bbox::intersects_disc(const GeoPoint& center, double radius) const {
    const double dx = std::max({min_lon - center.lon, 0.0, center.lon - max_lon});
    const double dy = std::max({min_lat - center.lat, 0.0, center.lat - max_lat});
    return dx * dx + dy * dy <= radius * radius;
}

double PolygonRing::signed_area() const {
    const std::size_t n = vertices.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const GeoPoint& a = vertices[i];
        const GeoPoint& b = vertices[(i + 1) % n];
        acc += a.lon * b.lat - b.lon * a.lat;
    }
    return 0.5 * acc;
}

Bbox PolygonRing::bbox() const {
    Bbox box{vertices[0].lon, vertices[0].lat, vertices[0].lon, vertices[0].lat};
    for (const GeoPoint& v : vertices) {
        box.expand(v);
    }
    return box;
}

void validate_ring(const PolygonRing& ring) {
    std::vector<GeoPoint> verts = ring.vertices;
    // A duplicated closing vertex is tolerated on input.
    if (verts.size() >= 2 && verts.front() == verts.back()) {
        verts.pop_back();
    }
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < i; ++j) {
            if (verts[i] == verts[j]) {
                dup = true;
                break;
            }
        }
        if (!dup) ++distinct;
    }
    if (distinct < 3) {
        throw ValidationError("polygon ring needs at least 3 distinct vertices");
    }
    PolygonRing cleaned{verts};
    if (cleaned.signed_area() == 0.0) {
        throw ValidationError("polygon ring has zero area");
    }
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const GeoPoint& a = verts[i];
        const GeoPoint& b = verts[(i + 1) % n];
        if (a == b) {
            throw ValidationError("polygon ring has a zero-length edge");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            // Adjacent edges share a vertex; only non-adjacent pairs count.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const GeoPoint& c = verts[j];
            const GeoPoint& d = verts[(j + 1) % n];
            if (segments_properly_cross(a, b, c, d)) {
                throw ValidationError("polygon ring is self-intersecting");
            }
        }
    }
}

bool point_in_ring(const GeoPoint& p, const PolygonRing& ring) {
    // Even-odd crossing test.
    const std::size_t n = ring.vertices.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const GeoPoint& a = ring.vertices[i];
        const GeoPoint& b = ring.vertices[j];
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

bool point_on_ring_boundary(const GeoPoint& p, const PolygonRing& ring, double eps) {
    const std::size_t n = ring.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const GeoPoint& a = ring.vertices[i];
        const GeoPoint& b = ring.vertices[(i + 1) % n];
        if (dist_sq_point_segment(p, a, b) <= eps * eps) return true;
    }
    return false;
}

double normalize_bearing(double radians) {
    double b = std::fmod(radians, kTwoPi);
    if (b < 0.0) b += kTwoPi;
    if (b == kTwoPi) b = 0.0;
    return b;
}

double bearing_of(const GeoPoint& origin, const GeoPoint& target) {
    const double dx = target.lon - origin.lon;
    const double dy = target.lat - origin.lat;
    if (dx == 0.0 && dy == 0.0) {
        throw ValidationError("degenerate bearing");
    }
    return normalize_bearing(std::atan2(dy, dx));
}

double AngularInterval::measure() const {
    if (wraps) return (kTwoPi - start) + end;
    return end - start;
}

bool AngularInterval::contains(double bearing) const {
    const double b = normalize_bearing(bearing);
    if (wraps) return b >= start || b < end;
    if (end == kTwoPi) return b >= start; // arc reaching exactly to 2*pi
    return b >= start && b < end;
}

AngularInterval AngularInterval::ccw(double from, double to) {
    const double s = normalize_bearing(from);
    const double e = normalize_bearing(to);
    if (s == e) {
        throw ValidationError("zero-measure angular interval");
    }
    if (s < e) return AngularInterval{s, e, false};
    if (e == 0.0) return AngularInterval{s, kTwoPi, false};
    return AngularInterval{s, e, true};
}

AngularExtent angular_extent(const GeoPoint& viewpoint, const PolygonRing& obstacle) {
    if (point_on_ring_boundary(viewpoint, obstacle) || point_in_ring(viewpoint, obstacle)) {
        return AngularExtent{true, {}};
    }
    std::vector<AngularInterval> spans;
    const std::size_t n = obstacle.vertices.size();
    spans.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const GeoPoint& a = obstacle.vertices[i];
        const GeoPoint& b = obstacle.vertices[(i + 1) % n];
        const double ba = bearing_of(viewpoint, a);
        const double bb = bearing_of(viewpoint, b);
        // The edge subtends the short arc between its endpoint bearings
        // (always < pi from an outside viewpoint). Collinear edges subtend
        // nothing.
        double diff = std::remainder(bb - ba, kTwoPi);
        if (diff == 0.0) continue;
        if (diff > 0.0) {
            spans.push_back(AngularInterval::ccw(ba, bb));
        } else {
            spans.push_back(AngularInterval::ccw(bb, ba));
        }
    }
    MergedIntervals merged = merge_intervals(spans);
    return AngularExtent{false, std::move(merged.intervals)};
}

MergedIntervals merge_intervals(std::span<const AngularInterval> intervals) {
    if (intervals.empty()) return {};

    // Unroll onto the [0, 2*pi] line, splitting wrapped arcs at 0.
    struct Piece {
        double s, e;
    };
    std::vector<Piece> pieces;
    pieces.reserve(intervals.size() + 4);
    for (const AngularInterval& iv : intervals) {
        if (iv.wraps) {
            pieces.push_back({iv.start, kTwoPi});
            pieces.push_back({0.0, iv.end});
        } else {
            pieces.push_back({iv.start, iv.end});
        }
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
        if (a.s != b.s) return a.s < b.s;
        return a.e < b.e;
    });

    std::vector<Piece> merged;
    merged.push_back(pieces[0]);
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        Piece& cur = merged.back();
        if (pieces[i].s <= cur.e) {
            cur.e = std::max(cur.e, pieces[i].e);
        } else {
            merged.push_back(pieces[i]);
        }
    }

    MergedIntervals out;
    if (merged.size() == 1 && merged[0].s == 0.0 && merged[0].e == kTwoPi) {
        out.intervals.push_back(AngularInterval{0.0, kTwoPi, false});
        out.total_measure = kTwoPi;
        return out;
    }
    // Stitch coverage that touches both 0 and 2*pi back into one wrapped arc.
    bool wrap = merged.size() >= 2 && merged.front().s == 0.0 && merged.back().e == kTwoPi;
    std::size_t first = 0;
    std::size_t last = merged.size();
    if (wrap) {
        out.intervals.push_back(AngularInterval{merged.back().s, merged.front().e, true});
        first = 1;
        last = merged.size() - 1;
    }
    for (std::size_t i = first; i < last; ++i) {
        out.intervals.push_back(AngularInterval{merged[i].s, merged[i].e, false});
    }
    std::sort(out.intervals.begin(), out.intervals.end(),
              [](const AngularInterval& a, const AngularInterval& b) { return a.start < b.start; });
    for (const AngularInterval& iv : out.intervals) {
        out.total_measure += iv.measure();
    }
    out.total_measure = std::min(out.total_measure, kTwoPi);
    return out;
}

namespace {

// Nearest boundary crossing of ray (origin, dir) with the ring, up to
// max_range. Returns +inf when the ray misses.
double ring_crossing_distance(const GeoPoint& origin, double dir_x, double dir_y,
                              const PolygonRing& ring, double max_range) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = ring.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const GeoPoint& a = ring.vertices[i];
        const GeoPoint& b = ring.vertices[(i + 1) % n];
        const double ex = b.lon - a.lon;
        const double ey = b.lat - a.lat;
        const double denom = cross(ex, ey, dir_x, dir_y);
        if (denom == 0.0) continue; // parallel; grazing contact is measure-zero
        const double ox = origin.lon - a.lon;
        const double oy = origin.lat - a.lat;
        const double s = cross(ox, oy, dir_x, dir_y) / denom;
        if (s < 0.0 || s > 1.0) continue;
        const double t = cross(ox, oy, ex, ey) / denom;
        if (t <= 0.0 || t > max_range) continue;
        best = std::min(best, t);
    }
    return best;
}

} // namespace

RayHit cast_ray(const GeoPoint& origin, double bearing, double max_range,
                std::span<const PolygonRing> obstacles) {
    std::vector<std::size_t> all(obstacles.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return cast_ray(origin, bearing, max_range, obstacles, all);
}

RayHit cast_ray(const GeoPoint& origin, double bearing, double max_range,
                std::span<const PolygonRing> obstacles,
                std::span<const std::size_t> candidates) {
    if (max_range <= 0.0) {
        throw ValidationError("cast_ray requires max_range > 0");
    }
    const double dx = std::cos(bearing);
    const double dy = std::sin(bearing);

    RayHit hit{max_range, std::nullopt};
    for (std::size_t idx : candidates) {
        const PolygonRing& ring = obstacles[idx];
        const Bbox box = ring.bbox();
        if (box.contains(origin) &&
            (point_in_ring(origin, ring) || point_on_ring_boundary(origin, ring))) {
            return RayHit{0.0, idx};
        }
        const double d = ring_crossing_distance(origin, dx, dy, ring, max_range);
        if (d < hit.distance) {
            hit.distance = d;
            hit.obstacle = idx;
        }
    }
    return hit;
}

double polyline_length(std::span<const GeoPoint> polyline) {
    double len = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        len += distance(polyline[i - 1], polyline[i]);
    }
    return len;
}

std::vector<GeoPoint> interpolate_along(std::span<const GeoPoint> polyline,
                                        double spacing) {
    if (polyline.size() < 2) {
        throw ValidationError("interpolate_along requires a polyline with >= 2 vertices");
    }
    if (spacing <= 0.0) {
        throw ValidationError("interpolate_along requires spacing > 0");
    }
    const double total = polyline_length(polyline);
    if (total <= 0.0) {
        throw ValidationError("interpolate_along requires positive polyline length");
    }

    std::vector<double> cum(polyline.size(), 0.0);
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        cum[i] = cum[i - 1] + distance(polyline[i - 1], polyline[i]);
    }

    std::vector<GeoPoint> points;
    const double eps = spacing * 1e-9;
    std::size_t seg = 0;
    for (double offset = 0.0; offset < total - eps; offset += spacing) {
        while (seg + 2 < polyline.size() && cum[seg + 1] <= offset) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double t = seg_len > 0.0 ? (offset - cum[seg]) / seg_len : 0.0;
        points.push_back(GeoPoint{
            polyline[seg].lon + t * (polyline[seg + 1].lon - polyline[seg].lon),
            polyline[seg].lat + t * (polyline[seg + 1].lat - polyline[seg].lat)});
    }
    points.push_back(polyline.back());
    return points;
}

PolygonRing rect_buffer(const GeoPoint& a, const GeoPoint& b, double width) {
    if (a == b) {
        throw ValidationError("rect_buffer requires distinct segment endpoints");
    }
    if (width <= 0.0) {
        throw ValidationError("rect_buffer requires width > 0");
    }
    const double len = distance(a, b);
    const double nx = -(b.lat - a.lat) / len; // left normal
    const double ny = (b.lon - a.lon) / len;
    const double h = width / 2.0;
    PolygonRing ring{{
        GeoPoint{a.lon - nx * h, a.lat - ny * h},
        GeoPoint{b.lon - nx * h, b.lat - ny * h},
        GeoPoint{b.lon + nx * h, b.lat + ny * h},
        GeoPoint{a.lon + nx * h, a.lat + ny * h},
    }};
    return ring;
}

bool within_radius(const GeoPoint& center, const GeoPoint& point, double radius) {
    if (radius <= 0.0) {
        throw ValidationError("within_radius requires radius > 0");
    }
    return distance_sq(center, point) <= radius * radius;
}

} // namespace crossview::geom
