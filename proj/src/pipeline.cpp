#include "crossview/pipeline.hpp"

#include "crossview/errors.hpp"
#include "crossview/fileio.hpp"
#include "crossview/serialize.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace crossview::pipeline {

namespace {

using nlohmann::json;

constexpr const char* kStageNames[] = {"ingested", "networked", "visible",
                                       "assigned", "fitted"};

std::string checkpoint_path(Stage stage, const std::string& stage_dir) {
    return (std::filesystem::path(stage_dir) /
            (std::string(stage_name(stage)) + ".json"))
        .string();
}

template <typename T>
json optional_to_json(const std::optional<T>& value) {
    return value ? json(*value) : json();
}

template <typename T>
std::optional<T> optional_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

StudyState stage_ingest(const cfg::RunConfig& config) {
    if (config.inputs.osm.empty()) {
        throw ValidationError("config has no inputs.osm path");
    }
    if (config.inputs.accidents.empty()) {
        throw ValidationError("config has no inputs.accidents path");
    }
    if (config.inputs.aadf.empty()) {
        throw ValidationError("config has no inputs.aadf path");
    }

    StudyState state;
    const std::string xml = io::read_file(config.inputs.osm);
    ingest::OsmData osm = ingest::parse_osm_extract(xml, config.study_area);
    state.roads = std::move(osm.roads);
    state.buildings = std::move(osm.buildings);
    state.skipped_ways = osm.skipped_ways;

    const std::string accident_text = io::read_file(config.inputs.accidents);
    ingest::AccidentParse accidents = ingest::parse_accident_csv(
        accident_text, config.min_year, config.accident_columns);
    state.rejected_accidents = accidents.rejected;
    state.accidents =
        ingest::clip_to_area(std::move(accidents.records), config.study_area);

    const std::string aadf_text = io::read_file(config.inputs.aadf);
    ingest::TrafficParse traffic =
        ingest::parse_aadf_csv(aadf_text, config.aadf_columns);
    state.rejected_traffic = traffic.rejected;
    state.traffic =
        ingest::clip_to_area(std::move(traffic.points), config.study_area);
    return state;
}

StudyState stage_network(StudyState state, const cfg::RunConfig& config) {
    std::vector<network::IntersectionNode> detected =
        network::detect_intersections(state.roads);
    state.detected_intersections = detected.size();
    state.nodes =
        network::merge_close(std::move(detected), config.merge_threshold_deg);
    network::apply_road_attributes(state.nodes, state.roads);
    return state;
}

StudyState stage_visibility(StudyState state, const cfg::RunConfig& config) {
    const vis::BuildingSet buildings(state.buildings);
    state.visibility =
        vis::compute_all(state.nodes, state.roads, buildings, config.visibility);
    return state;
}

StudyState stage_assign(StudyState state, const cfg::RunConfig& config) {
    network::AccidentAssignment assignment = network::assign_accidents(
        std::move(state.nodes), state.accidents, config.buffer_radius_deg);
    state.uncounted_accidents = assignment.uncounted;
    state.nodes = network::assign_traffic(std::move(assignment.nodes),
                                          state.traffic);

    std::unordered_map<std::int64_t, double> visible;
    visible.reserve(state.visibility.size());
    for (const vis::IntersectionVisibility& entry : state.visibility) {
        visible[entry.node_id] =
            config.visibility.table_source == vis::TableSource::full_circle
                ? entry.full_circle_percentage
                : entry.sector_mean_percentage;
    }
    state.table = network::finalize_dataset(state.nodes, visible);
    return state;
}

StudyState stage_fit(StudyState state, const cfg::RunConfig& config) {
    const bool want1 = config.models != cfg::ModelSelection::model2;
    const bool want2 = config.models != cfg::ModelSelection::model1;
    if (want1) {
        state.model1 = glm::fit_poisson_irls(glm::build_design(state.table, 1));
    }
    if (want2) {
        state.model2 = glm::fit_poisson_irls(glm::build_design(state.table, 2));
    }
    if (want1 && want2) {
        state.comparison = glm::compare_models(*state.model1, *state.model2);
    }
    return state;
}

} // namespace

const char* stage_name(Stage stage) {
    return kStageNames[static_cast<int>(stage)];
}

Stage stage_from_name(const std::string& name) {
    for (Stage stage : kStages) {
        if (name == stage_name(stage)) return stage;
    }
    throw SchemaError("unknown stage \"" + name + "\"");
}

std::optional<Stage> previous_stage(Stage stage) {
    const int index = static_cast<int>(stage);
    if (index == 0) return std::nullopt;
    return kStages[index - 1];
}

nlohmann::json state_to_json(const StudyState& state) {
    json j;
    j["roads"] = state.roads;
    j["buildings"] = state.buildings;
    j["accidents"] = state.accidents;
    j["traffic"] = state.traffic;
    j["skipped_ways"] = state.skipped_ways;
    j["rejected_accidents"] = state.rejected_accidents;
    j["rejected_traffic"] = state.rejected_traffic;
    j["detected_intersections"] = state.detected_intersections;
    j["nodes"] = state.nodes;
    j["visibility"] = state.visibility;
    j["uncounted_accidents"] = state.uncounted_accidents;
    j["table"] = state.table;
    j["model1"] = optional_to_json(state.model1);
    j["model2"] = optional_to_json(state.model2);
    j["comparison"] = optional_to_json(state.comparison);
    return j;
}

StudyState state_from_json(const nlohmann::json& j) {
    StudyState state;
    state.roads = j.at("roads").get<std::vector<ingest::RoadSegment>>();
    state.buildings =
        j.at("buildings").get<std::vector<ingest::BuildingFootprint>>();
    state.accidents =
        j.at("accidents").get<std::vector<ingest::AccidentRecord>>();
    state.traffic =
        j.at("traffic").get<std::vector<ingest::TrafficCountPoint>>();
    state.skipped_ways = j.at("skipped_ways").get<std::size_t>();
    state.rejected_accidents = j.at("rejected_accidents").get<std::size_t>();
    state.rejected_traffic = j.at("rejected_traffic").get<std::size_t>();
    state.detected_intersections =
        j.at("detected_intersections").get<std::size_t>();
    state.nodes = j.at("nodes").get<std::vector<network::IntersectionNode>>();
    state.visibility =
        j.at("visibility").get<std::vector<vis::IntersectionVisibility>>();
    state.uncounted_accidents = j.at("uncounted_accidents").get<std::size_t>();
    state.table = j.at("table").get<network::ModelingTable>();
    state.model1 = optional_from_json<glm::GlmFit>(j.at("model1"));
    state.model2 = optional_from_json<glm::GlmFit>(j.at("model2"));
    state.comparison =
        optional_from_json<glm::ModelComparison>(j.at("comparison"));
    return state;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string content_hash(const StudyState& state) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0')
        << fnv1a64(state_to_json(state).dump());
    return out.str();
}

Checkpoint run_stage(Stage stage, const cfg::RunConfig& config,
                     const std::optional<Checkpoint>& prior) {
    config.validate();
    const std::optional<Stage> expected = previous_stage(stage);
    if (!expected) {
        if (prior) {
            throw ValidationError(
                "the ingest stage starts a run and takes no prior checkpoint");
        }
    } else {
        if (!prior) {
            throw ValidationError(std::string("stage \"") + stage_name(stage) +
                                  "\" requires the \"" + stage_name(*expected) +
                                  "\" checkpoint");
        }
        if (prior->stage != *expected) {
            throw ValidationError(std::string("stage \"") + stage_name(stage) +
                                  "\" requires the \"" + stage_name(*expected) +
                                  "\" checkpoint, got \"" +
                                  stage_name(prior->stage) + "\"");
        }
    }

    StudyState state;
    switch (stage) {
    case Stage::ingested:
        state = stage_ingest(config);
        break;
    case Stage::networked:
        state = stage_network(prior->state, config);
        break;
    case Stage::visible:
        state = stage_visibility(prior->state, config);
        break;
    case Stage::assigned:
        state = stage_assign(prior->state, config);
        break;
    case Stage::fitted:
        state = stage_fit(prior->state, config);
        break;
    }

    Checkpoint checkpoint;
    checkpoint.stage = stage;
    checkpoint.state = std::move(state);
    checkpoint.hash = content_hash(checkpoint.state);
    return checkpoint;
}

void save_checkpoint(const Checkpoint& checkpoint,
                     const std::string& stage_dir) {
    json j;
    j["stage"] = stage_name(checkpoint.stage);
    j["hash"] = checkpoint.hash;
    j["payload"] = state_to_json(checkpoint.state);
    io::write_file(checkpoint_path(checkpoint.stage, stage_dir), j.dump());
}

bool checkpoint_exists(Stage stage, const std::string& stage_dir) {
    return std::filesystem::exists(checkpoint_path(stage, stage_dir));
}

Checkpoint load_checkpoint(Stage stage, const std::string& stage_dir) {
    const std::string path = checkpoint_path(stage, stage_dir);
    if (!std::filesystem::exists(path)) {
        throw ValidationError(std::string("no \"") + stage_name(stage) +
                              "\" checkpoint at " + path +
                              "; run the earlier stages first");
    }
    const std::string text = io::read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("checkpoint " + path + " is not valid JSON: " +
                          e.what());
    }
    Checkpoint checkpoint;
    try {
        checkpoint.stage = stage_from_name(j.at("stage").get<std::string>());
        checkpoint.hash = j.at("hash").get<std::string>();
        checkpoint.state = state_from_json(j.at("payload"));
    } catch (const json::exception& e) {
        throw SchemaError("checkpoint " + path + " is malformed: " + e.what());
    }
    if (checkpoint.stage != stage) {
        throw SchemaError("checkpoint " + path + " holds stage \"" +
                          stage_name(checkpoint.stage) + "\", expected \"" +
                          stage_name(stage) + "\"");
    }
    if (content_hash(checkpoint.state) != checkpoint.hash) {
        throw SchemaError("checkpoint " + path +
                          " failed hash verification; payload was altered");
    }
    return checkpoint;
}

Checkpoint execute_stage(Stage stage, const cfg::RunConfig& config) {
    std::optional<Checkpoint> prior;
    if (const std::optional<Stage> expected = previous_stage(stage)) {
        prior = load_checkpoint(*expected, config.output.stage_dir);
    }
    Checkpoint checkpoint = run_stage(stage, config, prior);
    save_checkpoint(checkpoint, config.output.stage_dir);
    return checkpoint;
}

Checkpoint run_all(const cfg::RunConfig& config) {
    std::optional<Checkpoint> current;
    for (Stage stage : kStages) {
        current = run_stage(stage, config, current);
        save_checkpoint(*current, config.output.stage_dir);
    }
    return *current;
}

} // namespace crossview::pipeline
