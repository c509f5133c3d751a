#pragma once

#include "crossview/geometry.hpp"
#include "crossview/ingest.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace crossview::network {

enum class RoadType { primary, secondary };

struct IntersectionNode {
    std::int64_t node_id = 0; // smallest constituent id after merging
    geom::GeoPoint location;
    std::vector<std::int64_t> incident_segments; // way ids, sorted unique
    RoadType road_type = RoadType::secondary;
    bool has_major_arm = false; // any incident primary or secondary way
    double traffic = 0.0;
    double max_speed = 0.0;
    int accident_count = 0;
    std::vector<std::int64_t> merged_from; // original node ids, sorted
};

// One node per OSM node shared by >=2 distinct ways with >=3 incident
// segment endpoints. Dead ends and plain way-to-way continuations stay out.
// Output sorted by node_id.
std::vector<IntersectionNode> detect_intersections(
    const std::vector<ingest::RoadSegment>& segments);

// Single-linkage clustering: every pair within threshold (inclusive) shares
// a cluster; each cluster collapses to one node at the constituent centroid
// with the smallest constituent id. Output independent of input order.
std::vector<IntersectionNode> merge_close(std::vector<IntersectionNode> nodes,
                                          double threshold);

// primary when any incident way is highway-class primary, else secondary.
RoadType classify(const IntersectionNode& node,
                  const std::vector<ingest::RoadSegment>& segments);

// Sets road_type, has_major_arm, and max_speed on every node. max_speed is
// the maximum over incident ways carrying a parsed value; nodes without one
// take the modal speed over all segments (ties to the smallest value).
void apply_road_attributes(std::vector<IntersectionNode>& nodes,
                           const std::vector<ingest::RoadSegment>& segments);

struct AccidentAssignment {
    std::vector<IntersectionNode> nodes;
    std::size_t uncounted = 0; // accidents farther than radius from every node
};

// Each accident within radius (inclusive) of at least one node increments
// exactly the nearest node, ties to the smallest node_id.
AccidentAssignment assign_accidents(std::vector<IntersectionNode> nodes,
                                    const std::vector<ingest::AccidentRecord>& accidents,
                                    double radius_deg);

// traffic = aadf of the nearest count point (ties to the smallest
// count_point_id). Grid-indexed, with results identical to an exhaustive
// scan.
std::vector<IntersectionNode> assign_traffic(
    std::vector<IntersectionNode> nodes,
    const std::vector<ingest::TrafficCountPoint>& count_points);

struct ModelingRow {
    std::int64_t node_id = 0;
    int accident_count = 0;
    double visible_percentage = 0.0;
    double traffic = 0.0;
    double max_speed = 0.0;
    int road_type_primary = 0;
    int road_type_secondary = 0;
};

struct ModelingTable {
    std::vector<ModelingRow> rows; // sorted by node_id
};

// Rows for nodes with at least one accident and a primary/secondary arm.
// visible_percentage joins by node_id; nodes missing from the map get NaN
// (caught by design-matrix validation downstream).
ModelingTable finalize_dataset(
    const std::vector<IntersectionNode>& nodes,
    const std::unordered_map<std::int64_t, double>& visible_percentage);

} // namespace crossview::network
