#include "crossview/serialize.hpp"

#include "crossview/errors.hpp"

#include <string>

namespace {

template <typename Enum>
struct EnumName {
    Enum value;
    const char* name;
};

template <typename Enum, std::size_t N>
nlohmann::json enum_to_json(Enum value, const EnumName<Enum> (&names)[N]) {
    for (const auto& entry : names) {
        if (entry.value == value) return entry.name;
    }
    throw crossview::SchemaError("unserializable enum value");
}

template <typename Enum, std::size_t N>
Enum enum_from_json(const nlohmann::json& j, const EnumName<Enum> (&names)[N],
                    const char* what) {
    const std::string text = j.get<std::string>();
    for (const auto& entry : names) {
        if (text == entry.name) return entry.value;
    }
    throw crossview::SchemaError("unknown " + std::string(what) + " \"" + text +
                                 "\"");
}

constexpr EnumName<crossview::ingest::HighwayClass> kHighwayNames[] = {
    {crossview::ingest::HighwayClass::primary, "primary"},
    {crossview::ingest::HighwayClass::secondary, "secondary"},
    {crossview::ingest::HighwayClass::other, "other"},
};

constexpr EnumName<crossview::ingest::SpeedUnit> kSpeedUnitNames[] = {
    {crossview::ingest::SpeedUnit::kmh, "kmh"},
    {crossview::ingest::SpeedUnit::mph, "mph"},
};

constexpr EnumName<crossview::network::RoadType> kRoadTypeNames[] = {
    {crossview::network::RoadType::primary, "primary"},
    {crossview::network::RoadType::secondary, "secondary"},
};

} // namespace

namespace crossview::geom {

void to_json(nlohmann::json& j, const GeoPoint& p) {
    j = nlohmann::json::array({p.lon, p.lat});
}

void from_json(const nlohmann::json& j, GeoPoint& p) {
    if (!j.is_array() || j.size() != 2) {
        throw SchemaError("point must be a [lon, lat] pair");
    }
    p.lon = j[0].get<double>();
    p.lat = j[1].get<double>();
}

void to_json(nlohmann::json& j, const PolygonRing& ring) {
    j = ring.vertices;
}

void from_json(const nlohmann::json& j, PolygonRing& ring) {
    ring.vertices = j.get<std::vector<GeoPoint>>();
}

} // namespace crossview::geom

namespace crossview::ingest {

void to_json(nlohmann::json& j, const MaxSpeed& speed) {
    j = nlohmann::json{{"value", speed.value},
                       {"unit", enum_to_json(speed.unit, kSpeedUnitNames)}};
}

void from_json(const nlohmann::json& j, MaxSpeed& speed) {
    speed.value = j.at("value").get<double>();
    speed.unit = enum_from_json(j.at("unit"), kSpeedUnitNames, "speed unit");
}

void to_json(nlohmann::json& j, const RoadSegment& segment) {
    j = nlohmann::json{
        {"way_id", segment.way_id},
        {"geometry", segment.geometry},
        {"highway_class", enum_to_json(segment.highway_class, kHighwayNames)},
        {"node_ids", segment.node_ids},
    };
    j["max_speed"] =
        segment.max_speed ? nlohmann::json(*segment.max_speed) : nlohmann::json();
}

void from_json(const nlohmann::json& j, RoadSegment& segment) {
    segment.way_id = j.at("way_id").get<std::int64_t>();
    segment.geometry = j.at("geometry").get<std::vector<geom::GeoPoint>>();
    segment.highway_class =
        enum_from_json(j.at("highway_class"), kHighwayNames, "highway class");
    segment.node_ids = j.at("node_ids").get<std::vector<std::int64_t>>();
    const nlohmann::json& speed = j.at("max_speed");
    segment.max_speed =
        speed.is_null() ? std::nullopt : std::optional<MaxSpeed>(speed.get<MaxSpeed>());
}

void to_json(nlohmann::json& j, const BuildingFootprint& footprint) {
    j = nlohmann::json{{"way_id", footprint.way_id},
                       {"ring", footprint.ring},
                       {"tags", footprint.tags}};
}

void from_json(const nlohmann::json& j, BuildingFootprint& footprint) {
    footprint.way_id = j.at("way_id").get<std::int64_t>();
    footprint.ring = j.at("ring").get<geom::PolygonRing>();
    footprint.tags =
        j.at("tags").get<std::vector<std::pair<std::string, std::string>>>();
}

void to_json(nlohmann::json& j, const AccidentRecord& record) {
    j = nlohmann::json{{"accident_id", record.accident_id},
                       {"location", record.location},
                       {"year", record.year},
                       {"severity", record.severity}};
}

void from_json(const nlohmann::json& j, AccidentRecord& record) {
    record.accident_id = j.at("accident_id").get<std::string>();
    record.location = j.at("location").get<geom::GeoPoint>();
    record.year = j.at("year").get<int>();
    record.severity = j.at("severity").get<std::string>();
}

void to_json(nlohmann::json& j, const TrafficCountPoint& point) {
    j = nlohmann::json{{"count_point_id", point.count_point_id},
                       {"location", point.location},
                       {"aadf", point.aadf}};
}

void from_json(const nlohmann::json& j, TrafficCountPoint& point) {
    point.count_point_id = j.at("count_point_id").get<std::int64_t>();
    point.location = j.at("location").get<geom::GeoPoint>();
    point.aadf = j.at("aadf").get<double>();
}

} // namespace crossview::ingest

namespace crossview::network {

void to_json(nlohmann::json& j, const IntersectionNode& node) {
    j = nlohmann::json{
        {"node_id", node.node_id},
        {"location", node.location},
        {"incident_segments", node.incident_segments},
        {"road_type", enum_to_json(node.road_type, kRoadTypeNames)},
        {"has_major_arm", node.has_major_arm},
        {"traffic", node.traffic},
        {"max_speed", node.max_speed},
        {"accident_count", node.accident_count},
        {"merged_from", node.merged_from},
    };
}

void from_json(const nlohmann::json& j, IntersectionNode& node) {
    node.node_id = j.at("node_id").get<std::int64_t>();
    node.location = j.at("location").get<geom::GeoPoint>();
    node.incident_segments =
        j.at("incident_segments").get<std::vector<std::int64_t>>();
    node.road_type = enum_from_json(j.at("road_type"), kRoadTypeNames, "road type");
    node.has_major_arm = j.at("has_major_arm").get<bool>();
    node.traffic = j.at("traffic").get<double>();
    node.max_speed = j.at("max_speed").get<double>();
    node.accident_count = j.at("accident_count").get<int>();
    node.merged_from = j.at("merged_from").get<std::vector<std::int64_t>>();
}

void to_json(nlohmann::json& j, const ModelingRow& row) {
    j = nlohmann::json{
        {"node_id", row.node_id},
        {"accident_count", row.accident_count},
        {"visible_percentage", row.visible_percentage},
        {"traffic", row.traffic},
        {"max_speed", row.max_speed},
        {"road_type_primary", row.road_type_primary},
        {"road_type_secondary", row.road_type_secondary},
    };
}

void from_json(const nlohmann::json& j, ModelingRow& row) {
    row.node_id = j.at("node_id").get<std::int64_t>();
    row.accident_count = j.at("accident_count").get<int>();
    row.visible_percentage = j.at("visible_percentage").get<double>();
    row.traffic = j.at("traffic").get<double>();
    row.max_speed = j.at("max_speed").get<double>();
    row.road_type_primary = j.at("road_type_primary").get<int>();
    row.road_type_secondary = j.at("road_type_secondary").get<int>();
}

void to_json(nlohmann::json& j, const ModelingTable& table) {
    j = nlohmann::json{{"rows", table.rows}};
}

void from_json(const nlohmann::json& j, ModelingTable& table) {
    table.rows = j.at("rows").get<std::vector<ModelingRow>>();
}

} // namespace crossview::network

namespace crossview::vis {

void to_json(nlohmann::json& j, const ViewSample& sample) {
    j = nlohmann::json{
        {"point", sample.point},
        {"heading", sample.heading},
        {"view_percentage", sample.view_percentage},
        {"view_polygon", sample.view_polygon},
    };
}

void from_json(const nlohmann::json& j, ViewSample& sample) {
    sample.point = j.at("point").get<geom::GeoPoint>();
    sample.heading = j.at("heading").get<double>();
    sample.view_percentage = j.at("view_percentage").get<double>();
    sample.view_polygon = j.at("view_polygon").get<geom::PolygonRing>();
}

void to_json(nlohmann::json& j, const IntersectionVisibility& result) {
    j = nlohmann::json{
        {"node_id", result.node_id},
        {"full_circle_percentage", result.full_circle_percentage},
        {"sector_mean_percentage", result.sector_mean_percentage},
        {"samples", result.samples},
    };
}

void from_json(const nlohmann::json& j, IntersectionVisibility& result) {
    result.node_id = j.at("node_id").get<std::int64_t>();
    result.full_circle_percentage = j.at("full_circle_percentage").get<double>();
    result.sector_mean_percentage = j.at("sector_mean_percentage").get<double>();
    result.samples = j.at("samples").get<std::vector<ViewSample>>();
}

} // namespace crossview::vis

namespace crossview::glm {

void to_json(nlohmann::json& j, const GlmFit& fit) {
    j = nlohmann::json{
        {"column_names", fit.column_names},
        {"dropped_columns", fit.dropped_columns},
        {"coefficients", fit.coefficients},
        {"std_errors", fit.std_errors},
        {"z_values", fit.z_values},
        {"p_values", fit.p_values},
        {"n_obs", fit.n_obs},
        {"k", fit.k},
        {"df_residual", fit.df_residual},
        {"log_likelihood", fit.log_likelihood},
        {"null_log_likelihood", fit.null_log_likelihood},
        {"deviance", fit.deviance},
        {"null_deviance", fit.null_deviance},
        {"pearson_chi2", fit.pearson_chi2},
        {"aic", fit.aic},
        {"bic_standard", fit.bic_standard},
        {"bic_deviance", fit.bic_deviance},
        {"pseudo_r2_cs", fit.pseudo_r2_cs},
        {"iterations", fit.iterations},
        {"converged", fit.converged},
        {"fitted", fit.fitted},
    };
}

void from_json(const nlohmann::json& j, GlmFit& fit) {
    fit.column_names = j.at("column_names").get<std::vector<std::string>>();
    fit.dropped_columns = j.at("dropped_columns").get<std::vector<std::string>>();
    fit.coefficients = j.at("coefficients").get<std::vector<double>>();
    fit.std_errors = j.at("std_errors").get<std::vector<double>>();
    fit.z_values = j.at("z_values").get<std::vector<double>>();
    fit.p_values = j.at("p_values").get<std::vector<double>>();
    fit.n_obs = j.at("n_obs").get<std::size_t>();
    fit.k = j.at("k").get<std::size_t>();
    fit.df_residual = j.at("df_residual").get<std::size_t>();
    fit.log_likelihood = j.at("log_likelihood").get<double>();
    fit.null_log_likelihood = j.at("null_log_likelihood").get<double>();
    fit.deviance = j.at("deviance").get<double>();
    fit.null_deviance = j.at("null_deviance").get<double>();
    fit.pearson_chi2 = j.at("pearson_chi2").get<double>();
    fit.aic = j.at("aic").get<double>();
    fit.bic_standard = j.at("bic_standard").get<double>();
    fit.bic_deviance = j.at("bic_deviance").get<double>();
    fit.pseudo_r2_cs = j.at("pseudo_r2_cs").get<double>();
    fit.iterations = j.at("iterations").get<int>();
    fit.converged = j.at("converged").get<bool>();
    fit.fitted = j.at("fitted").get<std::vector<double>>();
}

void to_json(nlohmann::json& j, const ModelComparison& cmp) {
    j = nlohmann::json{
        {"aic_model1", cmp.aic_model1},
        {"aic_model2", cmp.aic_model2},
        {"delta_aic", cmp.delta_aic},
        {"bic_deviance_model1", cmp.bic_deviance_model1},
        {"bic_deviance_model2", cmp.bic_deviance_model2},
        {"delta_bic_deviance", cmp.delta_bic_deviance},
        {"preferred", cmp.preferred},
    };
}

void from_json(const nlohmann::json& j, ModelComparison& cmp) {
    cmp.aic_model1 = j.at("aic_model1").get<double>();
    cmp.aic_model2 = j.at("aic_model2").get<double>();
    cmp.delta_aic = j.at("delta_aic").get<double>();
    cmp.bic_deviance_model1 = j.at("bic_deviance_model1").get<double>();
    cmp.bic_deviance_model2 = j.at("bic_deviance_model2").get<double>();
    cmp.delta_bic_deviance = j.at("delta_bic_deviance").get<double>();
    cmp.preferred = j.at("preferred").get<int>();
}

} // namespace crossview::glm
