#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace crossview::geom {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Fixed calibration between meter-specified parameters and the raw degree
// coordinate space everything runs in. The factor is uniform over the study
// area; no latitude correction is applied beyond it.
struct Conversion {
    static constexpr double kDegPerMeter = 0.000133;
    static constexpr double kRoadWidthMeters = 14.8;
    static constexpr double kRoadWidthDegrees = kRoadWidthMeters * kDegPerMeter;

    static constexpr double meters_to_degrees(double meters) {
        return meters * kDegPerMeter;
    }
};

// Planar point in degree coordinates: x = lon, y = lat.
struct GeoPoint {
    double lon = 0.0;
    double lat = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

double distance(const GeoPoint& a, const GeoPoint& b);
double distance_sq(const GeoPoint& a, const GeoPoint& b);

struct Bbox {
    double min_lon = 0.0, min_lat = 0.0, max_lon = 0.0, max_lat = 0.0;

    void expand(const GeoPoint& p);
    bool contains(const GeoPoint& p) const;
    // True when the box and the disc (center, radius) can intersect.
    bool intersects_disc(const GeoPoint& center, double radius) const;
};

// Closed polygon ring. Vertices are stored without the duplicated closing
// point; the ring is closed logically (last connects back to first).
struct PolygonRing {
    std::vector<GeoPoint> vertices;

    std::size_t size() const { return vertices.size(); }
    const GeoPoint& operator[](std::size_t i) const { return vertices[i]; }

    double signed_area() const;
    Bbox bbox() const;
};

// Enforces the ring invariants: >=3 distinct vertices, nonzero area, no
// self-intersection. Throws ValidationError otherwise.
void validate_ring(const PolygonRing& ring);

bool point_in_ring(const GeoPoint& p, const PolygonRing& ring);
bool point_on_ring_boundary(const GeoPoint& p, const PolygonRing& ring,
                            double eps = 1e-12);

// Half-open arc [start, end) of bearings, counterclockwise. `wraps` marks
// arcs crossing bearing 0; for those start > end numerically. A full circle
// is stored as start 0, end 2*pi, wraps false.
struct AngularInterval {
    double start = 0.0; // [0, 2*pi)
    double end = 0.0;   // (0, 2*pi]
    bool wraps = false;

    double measure() const;
    bool contains(double bearing) const;

    // Arc running counterclockwise from `from` to `to` (bearings in radians,
    // any range). from == to after normalization is rejected.
    static AngularInterval ccw(double from, double to);

    friend bool operator==(const AngularInterval&, const AngularInterval&) = default;
};

// Bearings normalized to [0, 2*pi), math convention: 0 along +lon, pi/2
// along +lat.
double normalize_bearing(double radians);

// Throws ValidationError("degenerate bearing") for coincident points.
double bearing_of(const GeoPoint& origin, const GeoPoint& target);

struct AngularExtent {
    // Viewpoint inside or on the obstacle boundary; treated as fully blocked
    // by callers. `intervals` is empty in that case.
    bool enclosed = false;
    std::vector<AngularInterval> intervals;
};

// Minimal disjoint set of bearing arcs at which a ray from `viewpoint` hits
// `obstacle`. Exact per-edge analysis, so concave obstacles may yield several
// intervals.
AngularExtent angular_extent(const GeoPoint& viewpoint, const PolygonRing& obstacle);

struct MergedIntervals {
    std::vector<AngularInterval> intervals; // pairwise disjoint, sorted by start
    double total_measure = 0.0;             // sum over intervals, <= 2*pi
};

MergedIntervals merge_intervals(std::span<const AngularInterval> intervals);

struct RayHit {
    double distance = 0.0;
    std::optional<std::size_t> obstacle; // index into the obstacle span
};

// Distance to the nearest obstacle-boundary crossing along the ray, or
// max_range with no hit. An origin inside (or on) an obstacle reports
// distance 0 against that obstacle.
RayHit cast_ray(const GeoPoint& origin, double bearing, double max_range,
                std::span<const PolygonRing> obstacles);

// Same, restricted to the listed obstacle indices (e.g. from a spatial
// index). Indices are visited in the given order.
RayHit cast_ray(const GeoPoint& origin, double bearing, double max_range,
                std::span<const PolygonRing> obstacles,
                std::span<const std::size_t> candidates);

double polyline_length(std::span<const GeoPoint> polyline);

// Points at arc-length multiples of `spacing` from the start, both endpoints
// always included; consecutive points are at most `spacing` apart.
std::vector<GeoPoint> interpolate_along(std::span<const GeoPoint> polyline,
                                        double spacing);

// Axis-aligned-to-the-segment rectangle with the segment as centerline and
// the given total width.
PolygonRing rect_buffer(const GeoPoint& a, const GeoPoint& b, double width);

// Euclidean degree-space inclusion, boundary inclusive (<=). Accident counts
// depend on this rule, so it is fixed here.
bool within_radius(const GeoPoint& center, const GeoPoint& point, double radius);

} // namespace crossview::geom
