#include "crossview/network.hpp"

#include "crossview/errors.hpp"
#include "crossview/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace crossview::network {

namespace {

void sort_unique(std::vector<std::int64_t>& ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

std::unordered_map<std::int64_t, const ingest::RoadSegment*> way_index(
    const std::vector<ingest::RoadSegment>& segments) {
    std::unordered_map<std::int64_t, const ingest::RoadSegment*> index;
    index.reserve(segments.size());
    for (const auto& seg : segments) {
        index.emplace(seg.way_id, &seg);
    }
    return index;
}

// Disjoint-set over node indexes.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(std::size_t a, std::size_t b) {
        const std::size_t ra = find(a);
        const std::size_t rb = find(b);
        if (ra != rb) parent_[std::max(ra, rb)] = std::min(ra, rb);
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

std::vector<IntersectionNode> detect_intersections(
    const std::vector<ingest::RoadSegment>& segments) {
    struct NodeUse {
        geom::GeoPoint location;
        int endpoints = 0;
        std::set<std::int64_t> ways;
    };
    // Ordered map fixes the output order by node_id.
    std::map<std::int64_t, NodeUse> uses;
    for (const auto& seg : segments) {
        for (std::size_t i = 0; i < seg.node_ids.size(); ++i) {
            NodeUse& use = uses[seg.node_ids[i]];
            use.location = seg.geometry[i];
            // Interior vertices join two sub-segments, way ends just one.
            use.endpoints += (i == 0 || i + 1 == seg.node_ids.size()) ? 1 : 2;
            use.ways.insert(seg.way_id);
        }
    }

    std::vector<IntersectionNode> nodes;
    for (const auto& [node_id, use] : uses) {
        if (use.ways.size() < 2 || use.endpoints < 3) continue;
        IntersectionNode node;
        node.node_id = node_id;
        node.location = use.location;
        node.incident_segments.assign(use.ways.begin(), use.ways.end());
        node.merged_from = {node_id};
        nodes.push_back(std::move(node));
    }
    return nodes;
}

std::vector<IntersectionNode> merge_close(std::vector<IntersectionNode> nodes,
                                          double threshold) {
    if (threshold <= 0.0) {
        throw ValidationError("merge threshold must be positive");
    }
    if (nodes.empty()) return nodes;

    std::sort(nodes.begin(), nodes.end(),
              [](const IntersectionNode& a, const IntersectionNode& b) {
                  return a.node_id < b.node_id;
              });

    UnionFind clusters(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (geom::within_radius(nodes[i].location, nodes[j].location, threshold)) {
                clusters.unite(i, j);
            }
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        groups[clusters.find(i)].push_back(i);
    }

    std::vector<IntersectionNode> merged;
    merged.reserve(groups.size());
    for (const auto& [root, members] : groups) {
        if (members.size() == 1) {
            merged.push_back(std::move(nodes[members[0]]));
            continue;
        }
        IntersectionNode node;
        node.node_id = std::numeric_limits<std::int64_t>::max();
        double lon = 0.0;
        double lat = 0.0;
        // Members arrive in ascending node_id order, so the centroid sum
        // order is input-order independent.
        for (std::size_t idx : members) {
            const IntersectionNode& m = nodes[idx];
            node.node_id = std::min(node.node_id, m.node_id);
            lon += m.location.lon;
            lat += m.location.lat;
            node.incident_segments.insert(node.incident_segments.end(),
                                          m.incident_segments.begin(),
                                          m.incident_segments.end());
            node.merged_from.insert(node.merged_from.end(), m.merged_from.begin(),
                                    m.merged_from.end());
        }
        node.location = geom::GeoPoint{lon / members.size(), lat / members.size()};
        sort_unique(node.incident_segments);
        sort_unique(node.merged_from);
        merged.push_back(std::move(node));
    }
    std::sort(merged.begin(), merged.end(),
              [](const IntersectionNode& a, const IntersectionNode& b) {
                  return a.node_id < b.node_id;
              });
    return merged;
}

RoadType classify(const IntersectionNode& node,
                  const std::vector<ingest::RoadSegment>& segments) {
    if (node.incident_segments.empty()) {
        throw ValidationError("cannot classify a node with no incident segments");
    }
    const auto ways = way_index(segments);
    for (std::int64_t way_id : node.incident_segments) {
        const auto it = ways.find(way_id);
        if (it != ways.end() &&
            it->second->highway_class == ingest::HighwayClass::primary) {
            return RoadType::primary;
        }
    }
    return RoadType::secondary;
}

void apply_road_attributes(std::vector<IntersectionNode>& nodes,
                           const std::vector<ingest::RoadSegment>& segments) {
    const auto ways = way_index(segments);

    // Study-area modal speed: most frequent parsed value, ties to the
    // smallest. Ordered map makes the tie-break order explicit.
    std::map<double, std::size_t> speed_counts;
    for (const auto& seg : segments) {
        if (seg.max_speed) ++speed_counts[seg.max_speed->value];
    }
    double modal_speed = 0.0;
    bool have_modal = false;
    std::size_t best_count = 0;
    for (const auto& [value, count] : speed_counts) {
        if (count > best_count) {
            best_count = count;
            modal_speed = value;
            have_modal = true;
        }
    }

    for (IntersectionNode& node : nodes) {
        node.road_type = classify(node, segments);
        node.has_major_arm = false;
        double max_speed = 0.0;
        bool have_speed = false;
        for (std::int64_t way_id : node.incident_segments) {
            const auto it = ways.find(way_id);
            if (it == ways.end()) continue;
            const ingest::RoadSegment& seg = *it->second;
            if (seg.highway_class == ingest::HighwayClass::primary ||
                seg.highway_class == ingest::HighwayClass::secondary) {
                node.has_major_arm = true;
            }
            if (seg.max_speed) {
                max_speed = std::max(max_speed, seg.max_speed->value);
                have_speed = true;
            }
        }
        if (have_speed) {
            node.max_speed = max_speed;
        } else if (have_modal) {
            node.max_speed = modal_speed;
        } else {
            throw ValidationError("no speed data in study area");
        }
    }
}

AccidentAssignment assign_accidents(std::vector<IntersectionNode> nodes,
                                    const std::vector<ingest::AccidentRecord>& accidents,
                                    double radius_deg) {
    if (radius_deg <= 0.0) {
        throw ValidationError("accident radius must be positive");
    }
    AccidentAssignment out;
    if (nodes.empty()) {
        out.nodes = std::move(nodes);
        out.uncounted = accidents.size();
        return out;
    }

    std::vector<geom::PointGrid::Entry> entries;
    entries.reserve(nodes.size());
    for (const IntersectionNode& node : nodes) {
        entries.push_back({node.location, static_cast<std::uint64_t>(node.node_id)});
    }
    const geom::PointGrid grid(std::move(entries), radius_deg);

    for (const auto& accident : accidents) {
        const auto hit = grid.nearest(accident.location, radius_deg);
        if (!hit) {
            ++out.uncounted;
            continue;
        }
        ++nodes[hit->index].accident_count;
    }
    out.nodes = std::move(nodes);
    return out;
}

std::vector<IntersectionNode> assign_traffic(
    std::vector<IntersectionNode> nodes,
    const std::vector<ingest::TrafficCountPoint>& count_points) {
    if (count_points.empty()) {
        throw ValidationError("no traffic data");
    }
    if (nodes.empty()) return nodes;

    geom::Bbox box{count_points[0].location.lon, count_points[0].location.lat,
                   count_points[0].location.lon, count_points[0].location.lat};
    for (const auto& p : count_points) box.expand(p.location);
    for (const auto& n : nodes) box.expand(n.location);
    const double diagonal = std::hypot(box.max_lon - box.min_lon,
                                       box.max_lat - box.min_lat);
    const double search_radius = diagonal + 1.0;
    const double cell =
        std::max(1e-12, diagonal / std::sqrt(static_cast<double>(count_points.size()) + 1.0));

    std::vector<geom::PointGrid::Entry> entries;
    entries.reserve(count_points.size());
    for (const auto& p : count_points) {
        entries.push_back({p.location, static_cast<std::uint64_t>(p.count_point_id)});
    }
    const geom::PointGrid grid(std::move(entries), cell);

    for (IntersectionNode& node : nodes) {
        const auto hit = grid.nearest(node.location, search_radius);
        if (!hit) {
            throw ValidationError("no traffic data");
        }
        node.traffic = count_points[hit->index].aadf;
    }
    return nodes;
}

ModelingTable finalize_dataset(
    const std::vector<IntersectionNode>& nodes,
    const std::unordered_map<std::int64_t, double>& visible_percentage) {
    ModelingTable table;
    for (const IntersectionNode& node : nodes) {
        if (node.accident_count < 1 || !node.has_major_arm) continue;
        ModelingRow row;
        row.node_id = node.node_id;
        row.accident_count = node.accident_count;
        const auto it = visible_percentage.find(node.node_id);
        row.visible_percentage =
            it != visible_percentage.end() ? it->second
                                           : std::numeric_limits<double>::quiet_NaN();
        row.traffic = node.traffic;
        row.max_speed = node.max_speed;
        row.road_type_primary = node.road_type == RoadType::primary ? 1 : 0;
        row.road_type_secondary = node.road_type == RoadType::secondary ? 1 : 0;
        table.rows.push_back(row);
    }
    if (table.rows.empty()) {
        throw ValidationError("no modelable intersections");
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const ModelingRow& a, const ModelingRow& b) {
                  return a.node_id < b.node_id;
              });
    return table;
}

} // namespace crossview::network
