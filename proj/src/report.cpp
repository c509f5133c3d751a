#include "crossview/report.hpp"

#include "crossview/errors.hpp"
#include "crossview/serialize.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <utility>
#include <vector>

namespace crossview::report {

namespace {

using nlohmann::json;

constexpr int kNameWidth = 20;
constexpr int kValueWidth = 14;

// Column extractors pair a report label with the table field it summarizes.
const std::vector<std::pair<const char*, double (*)(const network::ModelingRow&)>>
    kVariables = {
        {"accident_count",
         [](const network::ModelingRow& r) { return double(r.accident_count); }},
        {"visible_percentage",
         [](const network::ModelingRow& r) { return r.visible_percentage; }},
        {"traffic", [](const network::ModelingRow& r) { return r.traffic; }},
        {"max_speed", [](const network::ModelingRow& r) { return r.max_speed; }},
        {"road_type_primary",
         [](const network::ModelingRow& r) { return double(r.road_type_primary); }},
        {"road_type_secondary",
         [](const network::ModelingRow& r) {
             return double(r.road_type_secondary);
         }},
};

std::vector<double> column_values(const network::ModelingTable& table,
                                  double (*get)(const network::ModelingRow&)) {
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const network::ModelingRow& row : table.rows) {
        values.push_back(get(row));
    }
    return values;
}

json counts_json(const pipeline::StudyState& state) {
    return json{
        {"road_segments", state.roads.size()},
        {"buildings", state.buildings.size()},
        {"skipped_ways", state.skipped_ways},
        {"accidents", state.accidents.size()},
        {"rejected_accidents", state.rejected_accidents},
        {"accidents_assigned",
         state.accidents.size() - state.uncounted_accidents},
        {"accidents_uncounted", state.uncounted_accidents},
        {"traffic_points", state.traffic.size()},
        {"rejected_traffic", state.rejected_traffic},
        {"intersections_detected", state.detected_intersections},
        {"intersections", state.nodes.size()},
        {"modeling_rows", state.table.rows.size()},
    };
}

json variables_json(const network::ModelingTable& table) {
    json vars;
    for (const auto& [name, get] : kVariables) {
        const VariableStats stats = stats_of(column_values(table, get));
        vars[name] = json{{"min", stats.min},
                          {"max", stats.max},
                          {"mean", stats.mean},
                          {"sd", stats.sd}};
    }
    return vars;
}

void require_fitted(const pipeline::StudyState& state) {
    if (!state.model1 && !state.model2) {
        throw ValidationError("report requires a fitted checkpoint");
    }
}

std::string fixed_str(double value, int precision) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << value;
    return out.str();
}

void count_line(std::ostringstream& out, const char* label, std::size_t value) {
    out << std::left << std::setw(24) << label << std::right << std::setw(10)
        << value << "\n";
}

void stat_line(std::ostringstream& out, const char* label, double value) {
    out << std::left << std::setw(24) << label << std::right
        << std::setw(kValueWidth) << fixed_str(value, 4) << "\n";
}

void heading(std::ostringstream& out, const std::string& title, char rule) {
    out << title << "\n" << std::string(title.size(), rule) << "\n";
}

std::string model_formula(const glm::GlmFit& fit) {
    std::string formula = "accident_count ~";
    bool first = true;
    for (const std::string& name : fit.column_names) {
        if (name == "const") continue;
        formula += first ? " " : " + ";
        formula += name;
        first = false;
    }
    if (first) formula += " 1";
    return formula;
}

void model_text(std::ostringstream& out, const char* title,
                const glm::GlmFit& fit) {
    heading(out, std::string(title) + ": " + model_formula(fit), '-');
    count_line(out, "observations", fit.n_obs);
    count_line(out, "parameters", fit.k);
    count_line(out, "df residual", fit.df_residual);
    count_line(out, "iterations", std::size_t(fit.iterations));
    out << std::left << std::setw(24) << "converged" << std::right
        << std::setw(10) << (fit.converged ? "yes" : "no") << "\n";
    stat_line(out, "log-likelihood", fit.log_likelihood);
    stat_line(out, "null log-likelihood", fit.null_log_likelihood);
    stat_line(out, "deviance", fit.deviance);
    stat_line(out, "null deviance", fit.null_deviance);
    stat_line(out, "Pearson chi2", fit.pearson_chi2);
    stat_line(out, "AIC", fit.aic);
    stat_line(out, "BIC (standard)", fit.bic_standard);
    stat_line(out, "BIC (deviance)", fit.bic_deviance);
    stat_line(out, "pseudo R2 (Cox-Snell)", fit.pseudo_r2_cs);
    out << "\n";

    out << std::left << std::setw(kNameWidth) << "Column" << std::right
        << std::setw(kValueWidth) << "Coef." << std::setw(kValueWidth)
        << "Std.Err." << std::setw(kValueWidth) << "z" << std::setw(kValueWidth)
        << "P>|z|" << "\n";
    for (std::size_t i = 0; i < fit.column_names.size(); ++i) {
        out << std::left << std::setw(kNameWidth) << fit.column_names[i]
            << std::right << std::setw(kValueWidth)
            << fixed_str(fit.coefficients[i], 6) << std::setw(kValueWidth)
            << fixed_str(fit.std_errors[i], 6) << std::setw(kValueWidth)
            << fixed_str(fit.z_values[i], 3) << std::setw(kValueWidth)
            << fixed_str(fit.p_values[i], 4) << "\n";
    }
    for (const std::string& name : fit.dropped_columns) {
        out << "dropped: " << name << "\n";
    }
    out << "\n";
}

} // namespace

VariableStats stats_of(const std::vector<double>& values) {
    VariableStats stats;
    if (values.empty()) return stats;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    stats.min = *lo;
    stats.max = *hi;
    double sum = 0.0;
    for (const double v : values) sum += v;
    stats.mean = sum / double(values.size());
    if (values.size() < 2) return stats;
    double ss = 0.0;
    for (const double v : values) {
        ss += (v - stats.mean) * (v - stats.mean);
    }
    stats.sd = std::sqrt(ss / double(values.size() - 1));
    return stats;
}

std::string report_json(const pipeline::StudyState& state) {
    require_fitted(state);
    json doc;
    doc["summary"] = json{{"counts", counts_json(state)},
                          {"variables", variables_json(state.table)}};
    doc["models"] = json{
        {"model1", state.model1 ? json(*state.model1) : json()},
        {"model2", state.model2 ? json(*state.model2) : json()},
    };
    doc["comparison"] = state.comparison ? json(*state.comparison) : json();
    return doc.dump(2) + "\n";
}

std::string report_text(const pipeline::StudyState& state) {
    require_fitted(state);
    std::ostringstream out;
    heading(out, "Intersection visibility regression report", '=');
    out << "\n";

    heading(out, "Dataset", '-');
    count_line(out, "road segments", state.roads.size());
    count_line(out, "buildings", state.buildings.size());
    count_line(out, "skipped ways", state.skipped_ways);
    count_line(out, "accidents kept", state.accidents.size());
    count_line(out, "accidents rejected", state.rejected_accidents);
    count_line(out, "accidents assigned",
               state.accidents.size() - state.uncounted_accidents);
    count_line(out, "accidents uncounted", state.uncounted_accidents);
    count_line(out, "traffic count points", state.traffic.size());
    count_line(out, "rejected traffic rows", state.rejected_traffic);
    count_line(out, "intersections detected", state.detected_intersections);
    count_line(out, "intersections merged", state.nodes.size());
    count_line(out, "modeling rows", state.table.rows.size());
    out << "\n";

    out << std::left << std::setw(kNameWidth) << "Variable" << std::right
        << std::setw(kValueWidth) << "Min" << std::setw(kValueWidth) << "Max"
        << std::setw(kValueWidth) << "Mean" << std::setw(kValueWidth) << "SD"
        << "\n";
    for (const auto& [name, get] : kVariables) {
        const VariableStats stats = stats_of(column_values(state.table, get));
        out << std::left << std::setw(kNameWidth) << name << std::right
            << std::setw(kValueWidth) << fixed_str(stats.min, 4)
            << std::setw(kValueWidth) << fixed_str(stats.max, 4)
            << std::setw(kValueWidth) << fixed_str(stats.mean, 4)
            << std::setw(kValueWidth) << fixed_str(stats.sd, 4) << "\n";
    }
    out << "\n";

    if (state.model1) model_text(out, "Model 1", *state.model1);
    if (state.model2) model_text(out, "Model 2", *state.model2);

    if (state.comparison) {
        const glm::ModelComparison& cmp = *state.comparison;
        heading(out, "Model comparison", '-');
        out << std::left << std::setw(kNameWidth) << "" << std::right
            << std::setw(kValueWidth) << "Model 1" << std::setw(kValueWidth)
            << "Model 2" << std::setw(kValueWidth) << "Delta" << "\n";
        out << std::left << std::setw(kNameWidth) << "AIC" << std::right
            << std::setw(kValueWidth) << fixed_str(cmp.aic_model1, 4)
            << std::setw(kValueWidth) << fixed_str(cmp.aic_model2, 4)
            << std::setw(kValueWidth) << fixed_str(cmp.delta_aic, 4) << "\n";
        out << std::left << std::setw(kNameWidth) << "BIC (deviance)"
            << std::right << std::setw(kValueWidth)
            << fixed_str(cmp.bic_deviance_model1, 4) << std::setw(kValueWidth)
            << fixed_str(cmp.bic_deviance_model2, 4) << std::setw(kValueWidth)
            << fixed_str(cmp.delta_bic_deviance, 4) << "\n";
        out << "preferred: model " << cmp.preferred << "\n";
    }
    return out.str();
}

std::string modeling_csv(const network::ModelingTable& table) {
    std::string out =
        "accident_count,visible_percentage,traffic,max_speed,road_type_primary,"
        "road_type_secondary\n";
    for (const network::ModelingRow& row : table.rows) {
        out += std::to_string(row.accident_count);
        out += ',';
        out += json(row.visible_percentage).dump();
        out += ',';
        out += json(row.traffic).dump();
        out += ',';
        out += json(row.max_speed).dump();
        out += ',';
        out += std::to_string(row.road_type_primary);
        out += ',';
        out += std::to_string(row.road_type_secondary);
        out += '\n';
    }
    return out;
}

} // namespace crossview::report
