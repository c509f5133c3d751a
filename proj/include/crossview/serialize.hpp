#pragma once

#include "crossview/geometry.hpp"
#include "crossview/ingest.hpp"
#include "crossview/network.hpp"
#include "crossview/poisson_glm.hpp"
#include "crossview/visibility.hpp"

#include "json.hpp"

// ADL hooks so nlohmann::json converts the domain types directly. Points
// serialize as [lon, lat]; enums serialize as strings and reject unknown
// values with SchemaError.

namespace crossview::geom {
void to_json(nlohmann::json& j, const GeoPoint& p);
void from_json(const nlohmann::json& j, GeoPoint& p);
void to_json(nlohmann::json& j, const PolygonRing& ring);
void from_json(const nlohmann::json& j, PolygonRing& ring);
} // namespace crossview::geom

namespace crossview::ingest {
void to_json(nlohmann::json& j, const MaxSpeed& speed);
void from_json(const nlohmann::json& j, MaxSpeed& speed);
void to_json(nlohmann::json& j, const RoadSegment& segment);
void from_json(const nlohmann::json& j, RoadSegment& segment);
void to_json(nlohmann::json& j, const BuildingFootprint& footprint);
void from_json(const nlohmann::json& j, BuildingFootprint& footprint);
void to_json(nlohmann::json& j, const AccidentRecord& record);
void from_json(const nlohmann::json& j, AccidentRecord& record);
void to_json(nlohmann::json& j, const TrafficCountPoint& point);
void from_json(const nlohmann::json& j, TrafficCountPoint& point);
} // namespace crossview::ingest

namespace crossview::network {
void to_json(nlohmann::json& j, const IntersectionNode& node);
void from_json(const nlohmann::json& j, IntersectionNode& node);
void to_json(nlohmann::json& j, const ModelingRow& row);
void from_json(const nlohmann::json& j, ModelingRow& row);
void to_json(nlohmann::json& j, const ModelingTable& table);
void from_json(const nlohmann::json& j, ModelingTable& table);
} // namespace crossview::network

namespace crossview::vis {
void to_json(nlohmann::json& j, const ViewSample& sample);
void from_json(const nlohmann::json& j, ViewSample& sample);
void to_json(nlohmann::json& j, const IntersectionVisibility& result);
void from_json(const nlohmann::json& j, IntersectionVisibility& result);
} // namespace crossview::vis

namespace crossview::glm {
void to_json(nlohmann::json& j, const GlmFit& fit);
void from_json(const nlohmann::json& j, GlmFit& fit);
void to_json(nlohmann::json& j, const ModelComparison& cmp);
void from_json(const nlohmann::json& j, ModelComparison& cmp);
} // namespace crossview::glm
