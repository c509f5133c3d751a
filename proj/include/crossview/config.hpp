#pragma once

#include "crossview/ingest.hpp"
#include "crossview/visibility.hpp"

#include <string>

namespace crossview::cfg {

enum class ModelSelection { model1, model2, both };

struct OutputPaths {
    std::string stage_dir = "stages";
    std::string report_json = "report.json";
    std::string report_text = "report.txt";
    std::string geojson = "visibility.geojson";
    std::string modeling_csv = "modeling_table.csv";
};

struct InputPaths {
    std::string osm;
    std::string accidents;
    std::string aadf;
};

// One JSON document drives a whole run; every tunable constant is a named,
// defaulted field so a new study area is a new config file, not a code path.
struct RunConfig {
    ingest::StudyArea study_area{{-0.19123, 51.50212}, 3000.0};
    InputPaths inputs;
    int min_year = 2010;
    double buffer_radius_deg = 0.0003;
    double merge_threshold_deg = 0.0003;
    vis::VisibilityConfig visibility;
    ingest::AccidentColumns accident_columns;
    ingest::TrafficColumns aadf_columns;
    ModelSelection models = ModelSelection::both;
    OutputPaths output;

    // Thresholds must be positive and the visibility block self-consistent.
    void validate() const;
};

const char* model_selection_name(ModelSelection models);
ModelSelection model_selection_from_name(const std::string& name);

// Parses a config document. Unknown keys raise SchemaError naming the key;
// absent keys keep their defaults. Relative input and output paths resolve
// against base_dir.
RunConfig parse_config(const std::string& text, const std::string& base_dir);

// Reads and parses path, resolving relative paths in the document against
// the config file's parent directory.
RunConfig load_config(const std::string& path);

} // namespace crossview::cfg
