#include "crossview/visibility.hpp"

#include "crossview/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace crossview::vis {

namespace {

constexpr double kDegreesToRadians = geom::kPi / 180.0;

std::vector<geom::Bbox> footprint_boxes(
    const std::vector<ingest::BuildingFootprint>& footprints) {
    std::vector<geom::Bbox> boxes;
    boxes.reserve(footprints.size());
    for (const ingest::BuildingFootprint& fp : footprints) {
        boxes.push_back(fp.ring.bbox());
    }
    return boxes;
}

// One approach arm: path[0] is the way vertex at the node, later points run
// outward along the way.
struct Arm {
    std::vector<geom::GeoPoint> path;
};

// A merged node contributes one arm per outward direction of every
// occurrence of a constituent node id on an incident way. Order is
// deterministic: ways ascending, occurrences in way order, backward arm
// before forward arm.
std::vector<Arm> approach_arms(const network::IntersectionNode& node,
                               const std::vector<ingest::RoadSegment>& segments) {
    std::vector<Arm> arms;
    for (std::int64_t way_id : node.incident_segments) {
        const auto seg =
            std::find_if(segments.begin(), segments.end(),
                         [&](const ingest::RoadSegment& s) { return s.way_id == way_id; });
        if (seg == segments.end()) continue;
        const std::vector<std::int64_t>& ids = seg->node_ids;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!std::binary_search(node.merged_from.begin(), node.merged_from.end(),
                                    ids[i])) {
                continue;
            }
            if (i > 0) {
                Arm arm;
                for (std::size_t j = i + 1; j-- > 0;) {
                    arm.path.push_back(seg->geometry[j]);
                }
                arms.push_back(std::move(arm));
            }
            if (i + 1 < ids.size()) {
                Arm arm;
                for (std::size_t j = i; j < ids.size(); ++j) {
                    arm.path.push_back(seg->geometry[j]);
                }
                arms.push_back(std::move(arm));
            }
        }
    }
    return arms;
}

struct ArmPoint {
    geom::GeoPoint point;
    double heading = 0.0; // toward the node
};

// Point at arc length `offset` from the node end of the arm, heading along
// the local sub-segment toward the node. Zero-length sub-segments are
// skipped.
ArmPoint point_at_offset(const Arm& arm, double offset, double total) {
    offset = std::min(offset, total);
    double walked = 0.0;
    std::optional<ArmPoint> last;
    for (std::size_t j = 0; j + 1 < arm.path.size(); ++j) {
        const geom::GeoPoint& a = arm.path[j];
        const geom::GeoPoint& b = arm.path[j + 1];
        const double len = geom::distance(a, b);
        if (len == 0.0) continue;
        const double outward = geom::bearing_of(a, b);
        const double heading = geom::normalize_bearing(outward + geom::kPi);
        if (offset <= walked + len) {
            const double t = (offset - walked) / len;
            return ArmPoint{geom::GeoPoint{a.lon + t * (b.lon - a.lon),
                                           a.lat + t * (b.lat - a.lat)},
                            heading};
        }
        walked += len;
        last = ArmPoint{b, heading};
    }
    // Rounding pushed the offset past the accumulated length; the arm end is
    // the right answer.
    return *last;
}

std::vector<ArmPoint> sample_points(const Arm& arm, double spacing, double extent) {
    const double total = geom::polyline_length(arm.path);
    if (total == 0.0) return {};
    const double limit = std::min(extent, total);
    const double eps = spacing * 1e-9;
    std::vector<ArmPoint> out;
    for (double offset = 0.0; offset <= limit + eps; offset += spacing) {
        out.push_back(point_at_offset(arm, offset, total));
    }
    return out;
}

double fan_area(const std::vector<geom::GeoPoint>& vertices) {
    geom::PolygonRing ring;
    ring.vertices = vertices;
    return std::abs(ring.signed_area());
}

} // namespace

void VisibilityConfig::validate() const {
    if (!(fov_degrees > 0.0) || fov_degrees > 360.0) {
        throw ValidationError("fov_degrees must be in (0, 360]");
    }
    if (!(ray_step_degrees > 0.0)) {
        throw ValidationError("ray_step_degrees must be positive");
    }
    if (ray_count < 2) {
        throw ValidationError("ray_count must be at least 2");
    }
    if (std::abs(fov_degrees - (ray_count - 1) * ray_step_degrees) > 1e-9) {
        throw ValidationError(
            "ray_count must equal fov_degrees / ray_step_degrees + 1");
    }
    if (!(max_range_m > 0.0)) {
        throw ValidationError("max_range_m must be positive");
    }
    if (!(interp_spacing_m > 0.0)) {
        throw ValidationError("interp_spacing_m must be positive");
    }
    if (!(sample_extent_m >= 0.0)) {
        throw ValidationError("sample_extent_m must be non-negative");
    }
}

double VisibilityConfig::max_range_deg() const {
    return geom::Conversion::meters_to_degrees(max_range_m);
}

double VisibilityConfig::interp_spacing_deg() const {
    return geom::Conversion::meters_to_degrees(interp_spacing_m);
}

double VisibilityConfig::sample_extent_deg() const {
    return geom::Conversion::meters_to_degrees(sample_extent_m);
}

BuildingSet::BuildingSet(std::vector<ingest::BuildingFootprint> footprints,
                         double cell_size)
    : footprints_(std::move(footprints)),
      grid_(footprint_boxes(footprints_), cell_size) {
    rings_.reserve(footprints_.size());
    for (const ingest::BuildingFootprint& fp : footprints_) {
        rings_.push_back(fp.ring);
    }
}

std::vector<std::size_t> BuildingSet::near(const geom::GeoPoint& center,
                                           double radius) const {
    return grid_.query_disc(center, radius);
}

double view_percentage_full_circle(const geom::GeoPoint& viewpoint,
                                   const BuildingSet& buildings,
                                   double max_range_deg) {
    if (!(max_range_deg > 0.0)) {
        throw ValidationError("max range must be positive");
    }
    std::vector<geom::AngularInterval> blocked;
    for (std::size_t idx : buildings.near(viewpoint, max_range_deg)) {
        geom::AngularExtent extent =
            geom::angular_extent(viewpoint, buildings.rings()[idx]);
        if (extent.enclosed) return 0.0;
        blocked.insert(blocked.end(), extent.intervals.begin(),
                       extent.intervals.end());
    }
    const geom::MergedIntervals merged = geom::merge_intervals(blocked);
    return std::clamp(1.0 - merged.total_measure / geom::kTwoPi, 0.0, 1.0);
}

ViewSample sector_view_sample(const geom::GeoPoint& point, double heading,
                              const BuildingSet& buildings,
                              const VisibilityConfig& config) {
    config.validate();
    const double max_range = config.max_range_deg();

    ViewSample sample;
    sample.point = point;
    sample.heading = geom::normalize_bearing(heading);

    const std::vector<std::size_t> candidates = buildings.near(point, max_range);
    for (std::size_t idx : candidates) {
        const geom::PolygonRing& ring = buildings.rings()[idx];
        if (geom::point_in_ring(point, ring) ||
            geom::point_on_ring_boundary(point, ring)) {
            sample.view_percentage = 0.0;
            return sample;
        }
    }

    const double half_fov = 0.5 * config.fov_degrees;
    std::vector<geom::GeoPoint> truncated;
    std::vector<geom::GeoPoint> unobstructed;
    truncated.reserve(config.ray_count + 1);
    unobstructed.reserve(config.ray_count + 1);
    truncated.push_back(point);
    unobstructed.push_back(point);
    for (int k = 0; k < config.ray_count; ++k) {
        const double offset_deg = -half_fov + k * config.ray_step_degrees;
        const double bearing =
            geom::normalize_bearing(sample.heading + offset_deg * kDegreesToRadians);
        const geom::RayHit hit =
            geom::cast_ray(point, bearing, max_range, buildings.rings(), candidates);
        const double c = std::cos(bearing);
        const double s = std::sin(bearing);
        truncated.push_back(geom::GeoPoint{point.lon + hit.distance * c,
                                           point.lat + hit.distance * s});
        unobstructed.push_back(geom::GeoPoint{point.lon + max_range * c,
                                              point.lat + max_range * s});
    }

    // Both areas go through the same shoelace path, so a miss on every ray
    // makes the quotient exactly 1.
    const double numerator = fan_area(truncated);
    const double denominator = fan_area(unobstructed);
    sample.view_percentage = std::clamp(numerator / denominator, 0.0, 1.0);
    sample.view_polygon.vertices = std::move(truncated);
    return sample;
}

IntersectionVisibility intersection_visibility(
    const network::IntersectionNode& node,
    const std::vector<ingest::RoadSegment>& segments,
    const BuildingSet& buildings, const VisibilityConfig& config) {
    config.validate();

    IntersectionVisibility out;
    out.node_id = node.node_id;
    out.full_circle_percentage =
        view_percentage_full_circle(node.location, buildings, config.max_range_deg());

    for (const Arm& arm : approach_arms(node, segments)) {
        for (const ArmPoint& ap :
             sample_points(arm, config.interp_spacing_deg(), config.sample_extent_deg())) {
            out.samples.push_back(
                sector_view_sample(ap.point, ap.heading, buildings, config));
        }
    }
    if (out.samples.empty()) {
        throw ValidationError("no approach arms for node " +
                              std::to_string(node.node_id));
    }

    if (config.aggregate == Aggregate::min) {
        double lowest = out.samples.front().view_percentage;
        for (const ViewSample& s : out.samples) {
            lowest = std::min(lowest, s.view_percentage);
        }
        out.sector_mean_percentage = lowest;
    } else {
        double sum = 0.0;
        for (const ViewSample& s : out.samples) {
            sum += s.view_percentage;
        }
        out.sector_mean_percentage = sum / static_cast<double>(out.samples.size());
    }
    return out;
}

std::vector<IntersectionVisibility> compute_all(
    const std::vector<network::IntersectionNode>& nodes,
    const std::vector<ingest::RoadSegment>& segments,
    const BuildingSet& buildings, const VisibilityConfig& config) {
    config.validate();
    std::vector<IntersectionVisibility> out;
    out.reserve(nodes.size());
    for (const network::IntersectionNode& node : nodes) {
        out.push_back(intersection_visibility(node, segments, buildings, config));
    }
    std::sort(out.begin(), out.end(),
              [](const IntersectionVisibility& a, const IntersectionVisibility& b) {
                  return a.node_id < b.node_id;
              });
    return out;
}

} // namespace crossview::vis
