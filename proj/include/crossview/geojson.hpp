#pragma once

#include "crossview/network.hpp"
#include "crossview/pipeline.hpp"
#include "crossview/visibility.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace crossview::geojson {

// FeatureCollection with, per visibility entry in stored (node_id) order,
// one Point feature at the node location followed by one Polygon feature per
// view sample. Polygon rings close by repeating the first coordinate. A
// sample enclosed by a building has no outline and carries a null geometry.
// Every entry must match a node by node_id.
nlohmann::json document(const std::vector<vis::IntersectionVisibility>& results,
                        const std::vector<network::IntersectionNode>& nodes);

// document(state.visibility, state.nodes) serialized compactly.
std::string emit(const pipeline::StudyState& state);

} // namespace crossview::geojson
