#pragma once

#include "crossview/network.hpp"
#include "crossview/pipeline.hpp"

#include <string>

namespace crossview::report {

// Per-variable summary over the modeling table. SD is the sample standard
// deviation (n - 1 denominator); fewer than two rows give 0.
struct VariableStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double sd = 0.0;
};

VariableStats stats_of(const std::vector<double>& values);

// JSON document with "summary" (dataset counts and per-variable statistics),
// "models" (model1/model2 with every fit field, null when not requested),
// and "comparison". Requires at least one fitted model.
std::string report_json(const pipeline::StudyState& state);

// Human-readable rendering of the same content: dataset block, one aligned
// coefficient table per model with Coef./Std.Err./z/P>|z| columns, and the
// model comparison.
std::string report_text(const pipeline::StudyState& state);

// Modeling table as CSV with the exact header
// accident_count,visible_percentage,traffic,max_speed,road_type_primary,road_type_secondary
std::string modeling_csv(const network::ModelingTable& table);

} // namespace crossview::report
