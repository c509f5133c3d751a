#pragma once

#include "crossview/geometry.hpp"
#include "crossview/ingest.hpp"
#include "crossview/network.hpp"
#include "crossview/spatial_index.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace crossview::vis {

// How per-sample sector percentages roll up into one value per intersection.
enum class Aggregate { mean, min };

// Which visibility figure feeds the modeling table.
enum class TableSource { sector_mean, full_circle };

struct VisibilityConfig {
    double fov_degrees = 80.0;
    double ray_step_degrees = 1.0;
    // Must equal fov_degrees / ray_step_degrees + 1.
    int ray_count = 81;
    double max_range_m = 100.0;
    double interp_spacing_m = 10.0;
    double sample_extent_m = 50.0;
    Aggregate aggregate = Aggregate::mean;
    TableSource table_source = TableSource::sector_mean;

    // Throws ValidationError on non-positive sizes or an inconsistent
    // ray_count.
    void validate() const;

    double max_range_deg() const;
    double interp_spacing_deg() const;
    double sample_extent_deg() const;
};

// One driver's-eye sample: a view fan cast from a point on an approach arm,
// headed toward the intersection node.
struct ViewSample {
    geom::GeoPoint point;
    // Bearing of the fan axis, radians in [0, 2*pi).
    double heading = 0.0;
    // Fan area after truncation over fan area with no obstructions, in
    // [0, 1]; exactly 1 when nothing blocks, 0 when the point is enclosed.
    double view_percentage = 0.0;
    // Fan outline: sample point then one vertex per ray in bearing order.
    // Empty when the sample point sits inside or on a building.
    geom::PolygonRing view_polygon;
};

struct IntersectionVisibility {
    std::int64_t node_id = 0;
    // 1 - (merged blocked arc measure) / (2*pi), evaluated at the node.
    double full_circle_percentage = 0.0;
    // Aggregate of samples' view_percentage per VisibilityConfig::aggregate.
    double sector_mean_percentage = 0.0;
    std::vector<ViewSample> samples;
};

// Building footprints behind a uniform-grid index for disc queries.
class BuildingSet {
public:
    explicit BuildingSet(std::vector<ingest::BuildingFootprint> footprints,
                         double cell_size = 0.00133);

    // Indices of footprints whose bounding box meets the disc, ascending.
    std::vector<std::size_t> near(const geom::GeoPoint& center,
                                  double radius) const;

    std::span<const geom::PolygonRing> rings() const { return rings_; }
    const ingest::BuildingFootprint& footprint(std::size_t index) const {
        return footprints_[index];
    }
    std::size_t size() const { return footprints_.size(); }

private:
    std::vector<ingest::BuildingFootprint> footprints_;
    std::vector<geom::PolygonRing> rings_;
    geom::BoxGrid grid_;
};

// Unobstructed fraction of the full horizon at the viewpoint: angular
// extents of all buildings within max_range_deg are merged and the blocked
// measure is taken out of 2*pi. A viewpoint inside or on a building sees 0.
double view_percentage_full_circle(const geom::GeoPoint& viewpoint,
                                   const BuildingSet& buildings,
                                   double max_range_deg);

// Casts the configured fan of rays from the point and truncates each at the
// nearest building edge within max range. The percentage normalizes the
// truncated fan area by the same fan with every ray at full range, so an
// empty scene yields exactly 1.
ViewSample sector_view_sample(const geom::GeoPoint& point, double heading,
                              const BuildingSet& buildings,
                              const VisibilityConfig& config);

// Samples every approach arm of the node at interp_spacing_m steps over the
// first sample_extent_m meters (offset endpoints inclusive), each sample
// heading toward the node, and evaluates the full-circle figure at the node
// itself.
IntersectionVisibility intersection_visibility(
    const network::IntersectionNode& node,
    const std::vector<ingest::RoadSegment>& segments,
    const BuildingSet& buildings, const VisibilityConfig& config);

// All nodes, output sorted by node_id.
std::vector<IntersectionVisibility> compute_all(
    const std::vector<network::IntersectionNode>& nodes,
    const std::vector<ingest::RoadSegment>& segments,
    const BuildingSet& buildings, const VisibilityConfig& config);

} // namespace crossview::vis
