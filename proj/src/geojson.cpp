#include "crossview/geojson.hpp"

#include "crossview/errors.hpp"

#include <string>
#include <unordered_map>
#include <utility>

namespace crossview::geojson {

namespace {

using nlohmann::json;

json coordinates_of(const geom::GeoPoint& point) {
    return json::array({point.lon, point.lat});
}

json closed_ring(const geom::PolygonRing& ring) {
    json coords = json::array();
    for (const geom::GeoPoint& vertex : ring.vertices) {
        coords.push_back(coordinates_of(vertex));
    }
    coords.push_back(coordinates_of(ring.vertices.front()));
    return coords;
}

json point_feature(const vis::IntersectionVisibility& entry,
                   const geom::GeoPoint& location) {
    json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {
        {"type", "Point"},
        {"coordinates", coordinates_of(location)},
    };
    feature["properties"] = {
        {"feature_type", "intersection"},
        {"node_id", entry.node_id},
        {"full_circle_percentage", entry.full_circle_percentage},
        {"sector_mean_percentage", entry.sector_mean_percentage},
        {"sample_count", entry.samples.size()},
    };
    return feature;
}

json sample_feature(std::int64_t node_id, const vis::ViewSample& sample) {
    json feature;
    feature["type"] = "Feature";
    if (sample.view_polygon.vertices.empty()) {
        feature["geometry"] = nullptr;
    } else {
        feature["geometry"] = {
            {"type", "Polygon"},
            {"coordinates", json::array({closed_ring(sample.view_polygon)})},
        };
    }
    feature["properties"] = {
        {"feature_type", "view_sample"},
        {"node_id", node_id},
        {"heading", sample.heading},
        {"view_percentage", sample.view_percentage},
        {"point", coordinates_of(sample.point)},
    };
    return feature;
}

} // namespace

nlohmann::json document(
    const std::vector<vis::IntersectionVisibility>& results,
    const std::vector<network::IntersectionNode>& nodes) {
    std::unordered_map<std::int64_t, const geom::GeoPoint*> locations;
    locations.reserve(nodes.size());
    for (const network::IntersectionNode& node : nodes) {
        locations.emplace(node.node_id, &node.location);
    }

    json features = json::array();
    for (const vis::IntersectionVisibility& entry : results) {
        const auto it = locations.find(entry.node_id);
        if (it == locations.end()) {
            throw ValidationError("visibility entry for unknown node " +
                                  std::to_string(entry.node_id));
        }
        features.push_back(point_feature(entry, *it->second));
        for (const vis::ViewSample& sample : entry.samples) {
            features.push_back(sample_feature(entry.node_id, sample));
        }
    }
    json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = std::move(features);
    return doc;
}

std::string emit(const pipeline::StudyState& state) {
    return document(state.visibility, state.nodes).dump();
}

} // namespace crossview::geojson
