#include "trajbench/generator.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "trajbench/association.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/rng.hpp"

namespace trajbench {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

int level_from_quantile(double u, const std::vector<double>& probs) {
    double cum = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        cum += probs[k];
        if (u < cum) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size()) - 1;
}

void check_loading(double lambda, const std::string& name) {
    if (lambda < -1.0 || lambda > 1.0) {
        throw ConfigError("generator: loading for \"" + name + "\" must lie in [-1, 1]");
    }
}

}  // namespace

void GeneratorSpec::validate() const {
    schema.validate();
    if (n_patients == 0) throw ConfigError("generator: n_patients must be positive");
    if (rho < 0.0 || rho >= 1.0) throw ConfigError("generator: rho must lie in [0, 1)");
    if (numeric_loadings.size() != schema.numeric_count() ||
        numeric_params.size() != schema.numeric_count()) {
        throw ConfigError("generator: numeric loadings/params must match the schema");
    }
    if (categorical_loadings.size() != schema.categorical_count() ||
        categorical_cutpoints.size() != schema.categorical_count()) {
        throw ConfigError("generator: categorical loadings/cutpoints must match the schema");
    }
    for (std::size_t f = 0; f < schema.numeric_count(); ++f) {
        check_loading(numeric_loadings[f], schema.numeric_features[f].name);
        if (numeric_params[f].sigma <= 0.0) {
            throw ConfigError("generator: sigma for \"" + schema.numeric_features[f].name +
                              "\" must be positive");
        }
    }
    for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
        const auto& feature = schema.categorical_features[f];
        check_loading(categorical_loadings[f], feature.name);
        const auto& probs = categorical_cutpoints[f];
        if (probs.size() != feature.levels.size()) {
            throw ConfigError("generator: cutpoint count for \"" + feature.name +
                              "\" must match its level count");
        }
        double total = 0.0;
        for (double p : probs) {
            if (p < 0.0) throw ConfigError("generator: negative level probability for \"" + feature.name + "\"");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw ConfigError("generator: level probabilities for \"" + feature.name +
                              "\" must sum to 1 (got " + std::to_string(total) + ")");
        }
    }
}

Cohort generate_synthetic_cohort(const GeneratorSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t t_len = spec.schema.sequence_length;
    const std::size_t nn = spec.schema.numeric_count();
    const std::size_t nc = spec.schema.categorical_count();
    const double innovation = std::sqrt(1.0 - spec.rho * spec.rho);

    Cohort cohort;
    cohort.schema = spec.schema;
    cohort.patients.resize(spec.n_patients);
    for (std::size_t p = 0; p < spec.n_patients; ++p) {
        Rng rng(derive_seed(seed, "generator-patient", p));
        PatientTrajectory traj;
        char id[16];
        std::snprintf(id, sizeof(id), "P%06zu", p + 1);
        traj.patient_id = id;
        traj.numeric_values.resize(t_len * nn);
        traj.categorical_values.resize(t_len * nc);

        double z = rng.normal();
        for (std::size_t t = 0; t < t_len; ++t) {
            if (t > 0) z = spec.rho * z + innovation * rng.normal();
            for (std::size_t f = 0; f < nn; ++f) {
                const double lambda = spec.numeric_loadings[f];
                const double y = lambda * z + std::sqrt(1.0 - lambda * lambda) * rng.normal();
                double x = spec.numeric_params[f].mu + spec.numeric_params[f].sigma * y;
                if (spec.schema.numeric_features[f].log_scale) x = std::exp(x);
                traj.numeric_values[t * nn + f] = x;
            }
            for (std::size_t f = 0; f < nc; ++f) {
                const double lambda = spec.categorical_loadings[f];
                const double y = lambda * z + std::sqrt(1.0 - lambda * lambda) * rng.normal();
                traj.categorical_values[t * nc + f] = level_from_quantile(normal_cdf(y), spec.categorical_cutpoints[f]);
            }
        }
        cohort.patients[p] = std::move(traj);
    }
    return cohort;
}

namespace {

// One Monte-Carlo replicate of the pooled-window association, simulating the
// latent construction directly (independent of generate_synthetic_cohort).
double mc_replicate(const GeneratorSpec& spec, std::size_t gi, std::size_t gj,
                    std::size_t window_begin, std::size_t window_end, std::size_t n_patients,
                    Rng& rng) {
    const std::size_t nn = spec.schema.numeric_count();
    const double innovation = std::sqrt(1.0 - spec.rho * spec.rho);
    const std::size_t steps = window_end - window_begin;

    auto draw_feature = [&](std::size_t g, double z, bool& is_numeric) -> double {
        if (g < nn) {
            is_numeric = true;
            const double lambda = spec.numeric_loadings[g];
            const double y = lambda * z + std::sqrt(1.0 - lambda * lambda) * rng.normal();
            double x = spec.numeric_params[g].mu + spec.numeric_params[g].sigma * y;
            if (spec.schema.numeric_features[g].log_scale) x = std::exp(x);
            return x;
        }
        is_numeric = false;
        const std::size_t f = g - nn;
        const double lambda = spec.categorical_loadings[f];
        const double y = lambda * z + std::sqrt(1.0 - lambda * lambda) * rng.normal();
        return static_cast<double>(level_from_quantile(normal_cdf(y), spec.categorical_cutpoints[f]));
    };

    std::vector<double> col_i, col_j;
    col_i.reserve(n_patients * steps);
    col_j.reserve(n_patients * steps);
    bool i_numeric = true, j_numeric = true;
    for (std::size_t p = 0; p < n_patients; ++p) {
        // Stationary start directly at the window.
        double z = rng.normal();
        for (std::size_t s = 0; s < steps; ++s) {
            if (s > 0) z = spec.rho * z + innovation * rng.normal();
            col_i.push_back(draw_feature(gi, z, i_numeric));
            col_j.push_back(draw_feature(gj, z, j_numeric));
        }
    }

    if (i_numeric && j_numeric) return pearson_r(col_i, col_j);
    if (!i_numeric && !j_numeric) {
        std::vector<int> a(col_i.size()), b(col_j.size());
        for (std::size_t k = 0; k < col_i.size(); ++k) {
            a[k] = static_cast<int>(col_i[k]);
            b[k] = static_cast<int>(col_j[k]);
        }
        return cramers_v(a, b);
    }
    const auto& numeric = i_numeric ? col_i : col_j;
    const auto& categorical = i_numeric ? col_j : col_i;
    std::vector<int> groups(categorical.size());
    for (std::size_t k = 0; k < categorical.size(); ++k) groups[k] = static_cast<int>(categorical[k]);
    return correlation_ratio_eta(numeric, groups);
}

}  // namespace

AssociationEstimate analytic_association(const GeneratorSpec& spec, std::size_t feature_i,
                                         std::size_t feature_j, std::size_t window_begin,
                                         std::size_t window_end, std::uint64_t mc_seed,
                                         std::size_t mc_patients, std::size_t mc_replicates) {
    spec.validate();
    const std::size_t nn = spec.schema.numeric_count();
    const std::size_t total = nn + spec.schema.categorical_count();
    if (feature_i >= total || feature_j >= total) throw ContractError("analytic_association: feature index out of range");
    if (window_begin >= window_end || window_end > spec.schema.sequence_length) {
        throw ContractError("analytic_association: invalid window");
    }

    const bool analytic = feature_i < nn && feature_j < nn &&
                          !spec.schema.numeric_features[feature_i].log_scale &&
                          !spec.schema.numeric_features[feature_j].log_scale;
    AssociationEstimate est;
    if (analytic) {
        est.analytic = true;
        est.value = feature_i == feature_j ? 1.0 : spec.numeric_loadings[feature_i] * spec.numeric_loadings[feature_j];
        return est;
    }

    est.mc_patients = mc_patients;
    est.mc_replicates = mc_replicates;
    std::vector<double> replicates(mc_replicates);
    for (std::size_t r = 0; r < mc_replicates; ++r) {
        Rng rng(derive_seed(mc_seed, "assoc-mc", r));
        replicates[r] = mc_replicate(spec, feature_i, feature_j, window_begin, window_end, mc_patients, rng);
    }
    double mean = 0.0;
    for (double v : replicates) mean += v;
    mean /= static_cast<double>(mc_replicates);
    double var = 0.0;
    for (double v : replicates) var += (v - mean) * (v - mean);
    var /= static_cast<double>(mc_replicates - 1);
    est.value = mean;
    est.std_error = std::sqrt(var / static_cast<double>(mc_replicates));
    return est;
}

GeneratorSpec default_generator_spec(const std::string& dataset_id, std::size_t n_patients) {
    GeneratorSpec spec;
    spec.schema = make_schema(dataset_id);
    spec.n_patients = n_patients;
    spec.rho = 0.8;
    if (dataset_id == "art_hiv") {
        // Log-scale viral load: mu/sigma from the median and IQR on log scale.
        spec.numeric_params = {{3.6579046498145056, 3.1924767125769087}, {466.40, 434.833209785026}};
        spec.numeric_loadings = {0.8, -0.6};
        spec.categorical_cutpoints = {
            {0.482, 0.292, 0.025, 0.139, 0.048, 0.014},
            {0.226, 0.043, 0.069, 0.662},
            {0.064, 0.100, 0.001, 0.026, 0.047, 0.762},
        };
        spec.categorical_loadings = {0.3, 0.4, 0.2};
    } else if (dataset_id == "hypotension") {
        spec.numeric_params = {
            {65.34, 8.813936249073388},
            {4.6654182663334485, 0.643677889317821},  // urine on log scale
            {1.50, 0.3780578206078577},
        };
        spec.numeric_loadings = {-0.7, -0.5, 0.7};
        spec.categorical_cutpoints = {
            {0.8415, 0.0834, 0.0368, 0.0383},
            {0.9732, 0.0028, 0.0146, 0.0094},
        };
        spec.categorical_loadings = {0.6, 0.3};
    } else {
        throw ConfigError("no default generator calibration for dataset \"" + dataset_id + "\"");
    }
    return spec;
}

}  // namespace trajbench
