#include "crossview/poisson_glm.hpp"

#include "crossview/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace crossview::glm {

namespace {

// Columns whose orthogonal residual falls below this fraction of their
// original norm are treated as linear combinations of columns to their left.
constexpr double kRankTolerance = 1e-9;

double column_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

// Modified Gram-Schmidt with a reorthogonalization pass. Returns the indexes
// of columns that are (numerically) linear combinations of earlier ones;
// those columns get no Q vector.
std::vector<std::size_t> gram_schmidt(const std::vector<std::vector<double>>& columns,
                                      std::vector<std::vector<double>>& q) {
    std::vector<std::size_t> dropped;
    q.clear();
    for (std::size_t j = 0; j < columns.size(); ++j) {
        std::vector<double> v = columns[j];
        const double original = column_norm(v);
        for (int pass = 0; pass < 2; ++pass) {
            for (const std::vector<double>& qi : q) {
                const double r = dot(qi, v);
                for (std::size_t row = 0; row < v.size(); ++row) {
                    v[row] -= r * qi[row];
                }
            }
        }
        const double residual = column_norm(v);
        if (residual <= kRankTolerance * original || original == 0.0) {
            dropped.push_back(j);
            continue;
        }
        for (double& x : v) x /= residual;
        q.push_back(std::move(v));
    }
    return dropped;
}

// QR factorization of the full-rank matrix given as columns; R is p x p
// upper triangular, row-major.
struct Qr {
    std::vector<std::vector<double>> q;
    std::vector<double> r;
};

Qr qr_decompose(const std::vector<std::vector<double>>& columns) {
    const std::size_t p = columns.size();
    Qr qr;
    qr.r.assign(p * p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> v = columns[j];
        const double original = column_norm(v);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < qr.q.size(); ++i) {
                const double r = dot(qr.q[i], v);
                qr.r[i * p + j] += r;
                for (std::size_t row = 0; row < v.size(); ++row) {
                    v[row] -= r * qr.q[i][row];
                }
            }
        }
        const double residual = column_norm(v);
        if (residual <= kRankTolerance * original || original == 0.0) {
            throw ValidationError("design matrix lost rank during reweighting");
        }
        qr.r[j * p + j] = residual;
        for (double& x : v) x /= residual;
        qr.q.push_back(std::move(v));
    }
    return qr;
}

// Solves R x = rhs by back substitution.
std::vector<double> back_substitute(const std::vector<double>& r, std::size_t p,
                                    const std::vector<double>& rhs) {
    std::vector<double> x(p, 0.0);
    for (std::size_t j = p; j-- > 0;) {
        double v = rhs[j];
        for (std::size_t k = j + 1; k < p; ++k) v -= r[j * p + k] * x[k];
        x[j] = v / r[j * p + j];
    }
    return x;
}

// diag((R^T R)^-1): squared row norms of R^-1.
std::vector<double> covariance_diagonal(const std::vector<double>& r, std::size_t p) {
    std::vector<double> diag(p, 0.0);
    std::vector<double> unit(p, 0.0);
    // Column c of R^-1 solves R x = e_c; entry j of that column contributes
    // to row j's squared norm.
    for (std::size_t c = 0; c < p; ++c) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[c] = 1.0;
        const std::vector<double> col = back_substitute(r, p, unit);
        for (std::size_t j = 0; j <= c; ++j) diag[j] += col[j] * col[j];
    }
    return diag;
}

double poisson_log_likelihood(const std::vector<double>& y,
                              const std::vector<double>& mu) {
    double ll = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ll += y[i] * std::log(mu[i]) - mu[i] - std::lgamma(y[i] + 1.0);
    }
    return ll;
}

double poisson_deviance(const std::vector<double>& y, const std::vector<double>& mu) {
    double dev = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double term = y[i] > 0.0 ? y[i] * std::log(y[i] / mu[i]) : 0.0;
        dev += term - (y[i] - mu[i]);
    }
    return 2.0 * dev;
}

struct CoreFit {
    std::vector<double> coefficients;
    std::vector<double> covariance_diag;
    std::vector<double> mu;
    int iterations = 0;
    bool converged = false;
};

// IRLS on a full-rank column set.
CoreFit irls(const std::vector<std::vector<double>>& columns,
             const std::vector<double>& y, const IrlsOptions& options) {
    const std::size_t n = y.size();
    const std::size_t p = columns.size();

    std::vector<double> eta(n);
    for (std::size_t i = 0; i < n; ++i) eta[i] = std::log(y[i] + 0.5);

    std::vector<double> mu(n);
    std::vector<std::vector<double>> weighted(p, std::vector<double>(n));
    std::vector<double> rhs(n);
    std::vector<double> beta;

    CoreFit fit;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        fit.iterations = iter;
        for (std::size_t i = 0; i < n; ++i) {
            mu[i] = std::exp(eta[i]);
            const double sw = std::sqrt(mu[i]);
            const double z = eta[i] + (y[i] - mu[i]) / mu[i];
            rhs[i] = sw * z;
            for (std::size_t j = 0; j < p; ++j) {
                weighted[j][i] = sw * columns[j][i];
            }
        }
        const Qr qr = qr_decompose(weighted);
        std::vector<double> qtb(p, 0.0);
        for (std::size_t j = 0; j < p; ++j) qtb[j] = dot(qr.q[j], rhs);
        std::vector<double> next = back_substitute(qr.r, p, qtb);

        bool converged = false;
        if (!beta.empty()) {
            double delta = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                delta = std::max(delta, std::abs(next[j] - beta[j]));
            }
            converged = delta < options.tolerance;
        }
        beta = std::move(next);
        for (std::size_t i = 0; i < n; ++i) {
            double v = 0.0;
            for (std::size_t j = 0; j < p; ++j) v += columns[j][i] * beta[j];
            eta[i] = v;
        }
        if (converged) {
            fit.converged = true;
            break;
        }
    }

    for (std::size_t i = 0; i < n; ++i) mu[i] = std::exp(eta[i]);

    // Covariance evaluated at the weights of the final coefficients.
    for (std::size_t i = 0; i < n; ++i) {
        const double sw = std::sqrt(mu[i]);
        for (std::size_t j = 0; j < p; ++j) weighted[j][i] = sw * columns[j][i];
    }
    const Qr qr = qr_decompose(weighted);
    fit.covariance_diag = covariance_diagonal(qr.r, p);
    fit.coefficients = std::move(beta);
    fit.mu = std::move(mu);
    return fit;
}

} // namespace

DesignMatrix build_design(const network::ModelingTable& table, int model) {
    if (model != 1 && model != 2) {
        throw ValidationError("model must be 1 or 2");
    }
    if (table.rows.empty()) {
        throw ValidationError("modeling table is empty");
    }

    DesignMatrix design;
    design.column_names.push_back("const");
    if (model == 2) design.column_names.push_back("visible_percentage");
    design.column_names.insert(design.column_names.end(),
                               {"traffic", "max_speed", "road_type_primary",
                                "road_type_secondary"});
    design.n_rows = table.rows.size();
    design.n_cols = design.column_names.size();
    design.values.reserve(design.n_rows * design.n_cols);
    design.response.reserve(design.n_rows);

    for (const network::ModelingRow& row : table.rows) {
        std::vector<double> cells;
        cells.push_back(1.0);
        if (model == 2) cells.push_back(row.visible_percentage);
        cells.push_back(row.traffic);
        cells.push_back(row.max_speed);
        cells.push_back(static_cast<double>(row.road_type_primary));
        cells.push_back(static_cast<double>(row.road_type_secondary));
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!std::isfinite(cells[c])) {
                throw ValidationError("non-finite " + design.column_names[c] +
                                      " for node " + std::to_string(row.node_id));
            }
        }
        if (row.accident_count < 0) {
            throw ValidationError("negative accident count for node " +
                                  std::to_string(row.node_id));
        }
        design.values.insert(design.values.end(), cells.begin(), cells.end());
        design.response.push_back(static_cast<double>(row.accident_count));
    }
    return design;
}

GlmFit fit_poisson_irls(const DesignMatrix& design, const IrlsOptions& options) {
    const std::size_t n = design.n_rows;
    const std::size_t p = design.n_cols;
    if (n == 0 || p == 0) {
        throw ValidationError("design matrix is empty");
    }
    if (design.values.size() != n * p || design.response.size() != n ||
        design.column_names.size() != p) {
        throw ValidationError("design matrix dimensions are inconsistent");
    }
    if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
        throw ValidationError("invalid IRLS options");
    }

    double response_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = design.response[i];
        if (!std::isfinite(y) || y < 0.0) {
            throw ValidationError("response must be finite and non-negative");
        }
        response_sum += y;
    }
    if (response_sum == 0.0) {
        throw ValidationError("response is all zeros");
    }
    for (double v : design.values) {
        if (!std::isfinite(v)) {
            throw ValidationError("design matrix contains non-finite values");
        }
    }

    std::vector<std::vector<double>> columns(p, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) columns[j][i] = design.at(i, j);
    }

    // Collinearity is structural, so the retained set is decided once on the
    // unweighted design; positive weights cannot change column dependence.
    std::vector<std::vector<double>> probe;
    const std::vector<std::size_t> dropped = gram_schmidt(columns, probe);

    GlmFit fit;
    std::vector<std::vector<double>> retained;
    for (std::size_t j = 0, d = 0; j < p; ++j) {
        if (d < dropped.size() && dropped[d] == j) {
            fit.dropped_columns.push_back(design.column_names[j]);
            ++d;
            continue;
        }
        fit.column_names.push_back(design.column_names[j]);
        retained.push_back(columns[j]);
    }
    if (retained.empty()) {
        throw ValidationError("no usable columns in the design matrix");
    }
    if (n < retained.size()) {
        throw ValidationError("more parameters than observations");
    }

    const CoreFit core = irls(retained, design.response, options);

    fit.n_obs = n;
    fit.k = retained.size();
    fit.df_residual = n - fit.k;
    fit.coefficients = core.coefficients;
    fit.iterations = core.iterations;
    fit.converged = core.converged;
    fit.fitted = core.mu;
    for (std::size_t j = 0; j < fit.k; ++j) {
        const double se = std::sqrt(core.covariance_diag[j]);
        fit.std_errors.push_back(se);
        const double z = fit.coefficients[j] / se;
        fit.z_values.push_back(z);
        fit.p_values.push_back(std::erfc(std::abs(z) / std::sqrt(2.0)));
    }

    fit.log_likelihood = poisson_log_likelihood(design.response, core.mu);
    fit.deviance = poisson_deviance(design.response, core.mu);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = design.response[i] - core.mu[i];
        fit.pearson_chi2 += r * r / core.mu[i];
    }

    // Intercept-only refit through the same machinery anchors the null
    // figures.
    const std::vector<std::vector<double>> intercept{std::vector<double>(n, 1.0)};
    const CoreFit null_core = irls(intercept, design.response, options);
    fit.null_log_likelihood = poisson_log_likelihood(design.response, null_core.mu);
    fit.null_deviance = poisson_deviance(design.response, null_core.mu);

    fit.aic = aic_from(fit.log_likelihood, fit.k);
    fit.bic_standard = bic_standard_from(fit.log_likelihood, fit.k, n);
    fit.bic_deviance = bic_deviance_from(fit.deviance, fit.df_residual, n);
    fit.pseudo_r2_cs =
        pseudo_r2_cs_from(fit.log_likelihood, fit.null_log_likelihood, n);
    return fit;
}

double aic_from(double log_likelihood, std::size_t k) {
    return -2.0 * log_likelihood + 2.0 * static_cast<double>(k);
}

double bic_standard_from(double log_likelihood, std::size_t k, std::size_t n_obs) {
    return -2.0 * log_likelihood +
           static_cast<double>(k) * std::log(static_cast<double>(n_obs));
}

double bic_deviance_from(double deviance, std::size_t df_residual,
                         std::size_t n_obs) {
    return deviance -
           static_cast<double>(df_residual) * std::log(static_cast<double>(n_obs));
}

double pseudo_r2_cs_from(double log_likelihood, double null_log_likelihood,
                         std::size_t n_obs) {
    return 1.0 - std::exp(-(2.0 / static_cast<double>(n_obs)) *
                          (log_likelihood - null_log_likelihood));
}

ModelComparison compare_models(const GlmFit& model1, const GlmFit& model2) {
    if (model1.n_obs != model2.n_obs) {
        throw ValidationError("model comparison requires identical observations");
    }
    ModelComparison cmp;
    cmp.aic_model1 = model1.aic;
    cmp.aic_model2 = model2.aic;
    cmp.delta_aic = model1.aic - model2.aic;
    cmp.bic_deviance_model1 = model1.bic_deviance;
    cmp.bic_deviance_model2 = model2.bic_deviance;
    cmp.delta_bic_deviance = model1.bic_deviance - model2.bic_deviance;
    cmp.preferred = model1.aic <= model2.aic ? 1 : 2;
    return cmp;
}

} // namespace crossview::glm
