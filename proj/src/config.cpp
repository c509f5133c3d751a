#include "crossview/config.hpp"

#include "crossview/errors.hpp"
#include "crossview/fileio.hpp"

#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <string>

namespace crossview::cfg {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const char* where,
                  std::initializer_list<const char*> known) {
    if (!obj.is_object()) {
        throw SchemaError(std::string(where) + " must be a JSON object");
    }
    for (const auto& item : obj.items()) {
        const bool ok = std::any_of(known.begin(), known.end(),
                                    [&](const char* k) { return item.key() == k; });
        if (!ok) {
            throw SchemaError("unknown config key \"" + std::string(where) + "." +
                              item.key() + "\"");
        }
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

std::string resolved(const std::string& path, const std::string& base_dir) {
    if (path.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return p.lexically_normal().string();
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void parse_study_area(const json& obj, ingest::StudyArea& area) {
    require_keys(obj, "study_area", {"center", "radius_m"});
    if (auto it = obj.find("center"); it != obj.end()) {
        const json& c = *it;
        if (!c.is_array() || c.size() != 2) {
            throw SchemaError("study_area.center must be a [lon, lat] pair");
        }
        area.center.lon = c[0].get<double>();
        area.center.lat = c[1].get<double>();
    }
    read_field(obj, "radius_m", area.radius_m);
}

void parse_visibility(const json& obj, vis::VisibilityConfig& v) {
    require_keys(obj, "visibility",
                 {"fov_degrees", "ray_step_degrees", "ray_count", "max_range_m",
                  "interp_spacing_m", "sample_extent_m", "aggregate",
                  "table_source"});
    read_field(obj, "fov_degrees", v.fov_degrees);
    read_field(obj, "ray_step_degrees", v.ray_step_degrees);
    read_field(obj, "ray_count", v.ray_count);
    read_field(obj, "max_range_m", v.max_range_m);
    read_field(obj, "interp_spacing_m", v.interp_spacing_m);
    read_field(obj, "sample_extent_m", v.sample_extent_m);
    if (auto it = obj.find("aggregate"); it != obj.end()) {
        const std::string name = it->get<std::string>();
        if (name == "mean") {
            v.aggregate = vis::Aggregate::mean;
        } else if (name == "min") {
            v.aggregate = vis::Aggregate::min;
        } else {
            throw SchemaError("unknown visibility.aggregate \"" + name + "\"");
        }
    }
    if (auto it = obj.find("table_source"); it != obj.end()) {
        const std::string name = it->get<std::string>();
        if (name == "sector_mean") {
            v.table_source = vis::TableSource::sector_mean;
        } else if (name == "full_circle") {
            v.table_source = vis::TableSource::full_circle;
        } else {
            throw SchemaError("unknown visibility.table_source \"" + name + "\"");
        }
    }
}

void parse_accident_columns(const json& obj, ingest::AccidentColumns& cols) {
    require_keys(obj, "accident_columns",
                 {"id", "longitude", "latitude", "year", "date", "severity"});
    read_field(obj, "id", cols.id);
    read_field(obj, "longitude", cols.longitude);
    read_field(obj, "latitude", cols.latitude);
    read_field(obj, "year", cols.year);
    read_field(obj, "date", cols.date);
    read_field(obj, "severity", cols.severity);
}

void parse_aadf_columns(const json& obj, ingest::TrafficColumns& cols) {
    require_keys(obj, "aadf_columns", {"id", "latitude", "longitude", "flow"});
    read_field(obj, "id", cols.id);
    read_field(obj, "latitude", cols.latitude);
    read_field(obj, "longitude", cols.longitude);
    read_field(obj, "flow", cols.flow);
}

void parse_inputs(const json& obj, InputPaths& inputs) {
    require_keys(obj, "inputs", {"osm", "accidents", "aadf"});
    read_field(obj, "osm", inputs.osm);
    read_field(obj, "accidents", inputs.accidents);
    read_field(obj, "aadf", inputs.aadf);
}

void parse_output(const json& obj, OutputPaths& output) {
    require_keys(obj, "output",
                 {"stage_dir", "report_json", "report_text", "geojson",
                  "modeling_csv"});
    read_field(obj, "stage_dir", output.stage_dir);
    read_field(obj, "report_json", output.report_json);
    read_field(obj, "report_text", output.report_text);
    read_field(obj, "geojson", output.geojson);
    read_field(obj, "modeling_csv", output.modeling_csv);
}

} // namespace

void RunConfig::validate() const {
    if (!(study_area.radius_m > 0.0)) {
        throw ValidationError("study_area.radius_m must be positive");
    }
    if (!(buffer_radius_deg > 0.0)) {
        throw ValidationError("buffer_radius_deg must be positive");
    }
    if (!(merge_threshold_deg > 0.0)) {
        throw ValidationError("merge_threshold_deg must be positive");
    }
    visibility.validate();
    if (output.stage_dir.empty()) {
        throw ValidationError("output.stage_dir must not be empty");
    }
}

const char* model_selection_name(ModelSelection models) {
    switch (models) {
    case ModelSelection::model1: return "1";
    case ModelSelection::model2: return "2";
    case ModelSelection::both: return "both";
    }
    throw ValidationError("invalid model selection");
}

ModelSelection model_selection_from_name(const std::string& name) {
    if (name == "1") return ModelSelection::model1;
    if (name == "2") return ModelSelection::model2;
    if (name == "both") return ModelSelection::both;
    throw SchemaError("unknown model selection \"" + name +
                      "\" (expected 1, 2, or both)");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(),
                         e.byte);
    }
    require_keys(doc, "config",
                 {"study_area", "inputs", "min_year", "buffer_radius_deg",
                  "merge_threshold_deg", "visibility", "accident_columns",
                  "aadf_columns", "models", "output"});

    RunConfig config;
    try {
        if (auto it = doc.find("study_area"); it != doc.end()) {
            parse_study_area(*it, config.study_area);
        }
        if (auto it = doc.find("inputs"); it != doc.end()) {
            parse_inputs(*it, config.inputs);
        }
        read_field(doc, "min_year", config.min_year);
        read_field(doc, "buffer_radius_deg", config.buffer_radius_deg);
        read_field(doc, "merge_threshold_deg", config.merge_threshold_deg);
        if (auto it = doc.find("visibility"); it != doc.end()) {
            parse_visibility(*it, config.visibility);
        }
        if (auto it = doc.find("accident_columns"); it != doc.end()) {
            parse_accident_columns(*it, config.accident_columns);
        }
        if (auto it = doc.find("aadf_columns"); it != doc.end()) {
            parse_aadf_columns(*it, config.aadf_columns);
        }
        if (auto it = doc.find("models"); it != doc.end()) {
            config.models = model_selection_from_name(it->get<std::string>());
        }
        if (auto it = doc.find("output"); it != doc.end()) {
            parse_output(*it, config.output);
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config field has the wrong type: ") +
                          e.what());
    }
    config.inputs.osm = resolved(config.inputs.osm, base_dir);
    config.inputs.accidents = resolved(config.inputs.accidents, base_dir);
    config.inputs.aadf = resolved(config.inputs.aadf, base_dir);
    config.output.stage_dir = resolved(config.output.stage_dir, base_dir);
    config.output.report_json = resolved(config.output.report_json, base_dir);
    config.output.report_text = resolved(config.output.report_text, base_dir);
    config.output.geojson = resolved(config.output.geojson, base_dir);
    config.output.modeling_csv = resolved(config.output.modeling_csv, base_dir);
    config.validate();
    return config;
}

RunConfig load_config(const std::string& path) {
    const std::string text = io::read_file(path);
    const std::string base_dir =
        std::filesystem::path(path).parent_path().string();
    return parse_config(text, base_dir);
}

} // namespace crossview::cfg
