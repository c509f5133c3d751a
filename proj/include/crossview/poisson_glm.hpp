#pragma once

#include "crossview/network.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace crossview::glm {

// Row-major design matrix with a named column layout and the count response.
struct DesignMatrix {
    std::vector<std::string> column_names;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values; // n_rows * n_cols, row-major
    std::vector<double> response;

    double at(std::size_t row, std::size_t col) const {
        return values[row * n_cols + col];
    }
};

// Model 1 regresses accident counts on traffic, speed, and road-type
// dummies; model 2 adds visible_percentage right after the intercept.
// Throws ValidationError on an empty table, non-finite cells, or negative
// counts.
DesignMatrix build_design(const network::ModelingTable& table, int model);

struct IrlsOptions {
    double tolerance = 1e-8; // max |coefficient change| between iterations
    int max_iterations = 25;
};

struct GlmFit {
    // Columns kept after collinearity drops, in input order.
    std::vector<std::string> column_names;
    std::vector<std::string> dropped_columns;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> z_values;
    std::vector<double> p_values;

    std::size_t n_obs = 0;
    std::size_t k = 0; // retained columns
    std::size_t df_residual = 0;

    double log_likelihood = 0.0;
    double null_log_likelihood = 0.0; // intercept-only refit
    double deviance = 0.0;
    double null_deviance = 0.0;
    double pearson_chi2 = 0.0;
    double aic = 0.0;
    double bic_standard = 0.0;
    double bic_deviance = 0.0;
    double pseudo_r2_cs = 0.0;

    int iterations = 0;
    bool converged = false;

    std::vector<double> fitted; // mu per observation
};

// Poisson regression with a log link via iteratively reweighted least
// squares. Linear predictor starts at log(y + 0.5); each step solves the
// weighted normal equations through a rank-revealing QR that drops a column
// linearly dependent on the columns to its left (so the leftmost of a
// collinear group is the one retained).
GlmFit fit_poisson_irls(const DesignMatrix& design, const IrlsOptions& options = {});

// Information-criterion arithmetic shared by the fitter and reports.
double aic_from(double log_likelihood, std::size_t k);
double bic_standard_from(double log_likelihood, std::size_t k, std::size_t n_obs);
// Deviance-based variant: deviance - df_residual * ln(n_obs).
double bic_deviance_from(double deviance, std::size_t df_residual,
                         std::size_t n_obs);
// Cox-Snell pseudo R^2: 1 - exp(-(2/n) * (ll - ll_null)).
double pseudo_r2_cs_from(double log_likelihood, double null_log_likelihood,
                         std::size_t n_obs);

struct ModelComparison {
    double aic_model1 = 0.0;
    double aic_model2 = 0.0;
    double delta_aic = 0.0; // model1 - model2
    double bic_deviance_model1 = 0.0;
    double bic_deviance_model2 = 0.0;
    double delta_bic_deviance = 0.0; // model1 - model2
    int preferred = 0;               // lower AIC wins
};

// Throws ValidationError when the fits cover different observation counts.
ModelComparison compare_models(const GlmFit& model1, const GlmFit& model2);

} // namespace crossview::glm
