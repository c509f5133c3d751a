#pragma once

#include "crossview/config.hpp"
#include "crossview/ingest.hpp"
#include "crossview/network.hpp"
#include "crossview/poisson_glm.hpp"
#include "crossview/visibility.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crossview::pipeline {

// Stages run strictly in this order; each consumes the previous checkpoint.
enum class Stage { ingested, networked, visible, assigned, fitted };

constexpr Stage kStages[] = {Stage::ingested, Stage::networked, Stage::visible,
                             Stage::assigned, Stage::fitted};

const char* stage_name(Stage stage);
Stage stage_from_name(const std::string& name); // SchemaError on unknown
std::optional<Stage> previous_stage(Stage stage);

// Everything the run has produced so far. Fields beyond the current stage
// hold their defaults, so one type serves every checkpoint.
struct StudyState {
    // ingested
    std::vector<ingest::RoadSegment> roads;
    std::vector<ingest::BuildingFootprint> buildings;
    std::vector<ingest::AccidentRecord> accidents;
    std::vector<ingest::TrafficCountPoint> traffic;
    std::size_t skipped_ways = 0;
    std::size_t rejected_accidents = 0;
    std::size_t rejected_traffic = 0;
    // networked
    std::size_t detected_intersections = 0; // before proximity merging
    std::vector<network::IntersectionNode> nodes;
    // visible
    std::vector<vis::IntersectionVisibility> visibility;
    // assigned
    std::size_t uncounted_accidents = 0;
    network::ModelingTable table;
    // fitted
    std::optional<glm::GlmFit> model1;
    std::optional<glm::GlmFit> model2;
    std::optional<glm::ModelComparison> comparison;
};

// Canonical serialization: nlohmann::json orders keys, so the dump of this
// document is byte-stable for equal states and safe to hash.
nlohmann::json state_to_json(const StudyState& state);
StudyState state_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits of fnv1a64 over the canonical state dump.
std::string content_hash(const StudyState& state);

struct Checkpoint {
    Stage stage = Stage::ingested;
    std::string hash;
    StudyState state;
};

// Executes exactly one stage. The ingest stage wants no prior checkpoint;
// every other stage requires the checkpoint of the immediately preceding
// stage. Violations raise ValidationError; unreadable source files raise
// IoError naming the path.
Checkpoint run_stage(Stage stage, const cfg::RunConfig& config,
                     const std::optional<Checkpoint>& prior);

// Checkpoint files live at <stage_dir>/<stage>.json holding {stage, hash,
// payload}. Loading verifies the stored hash against the payload and raises
// SchemaError on any mismatch or malformed document; a missing file raises
// ValidationError, since it means the stage has not run yet.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& stage_dir);
Checkpoint load_checkpoint(Stage stage, const std::string& stage_dir);
bool checkpoint_exists(Stage stage, const std::string& stage_dir);

// Loads the prior checkpoint from config.output.stage_dir, runs the stage,
// and saves the result there.
Checkpoint execute_stage(Stage stage, const cfg::RunConfig& config);

// All five stages in order, checkpointing each.
Checkpoint run_all(const cfg::RunConfig& config);

} // namespace crossview::pipeline
