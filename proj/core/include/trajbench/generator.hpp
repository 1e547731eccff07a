#pragma once

#include <cstdint>
#include <vector>

#include "trajbench/cohort.hpp"
#include "trajbench/schema.hpp"

namespace trajbench {

struct NumericParams {
    double mu = 0.0;
    double sigma = 1.0;  // on the feature's (possibly log) scale
};

// Latent-factor cohort generator. One AR(1) latent path per patient drives
// every feature through its loading, so every pairwise association is known
// in closed form (numeric, linear scale) or estimable by Monte Carlo.
struct GeneratorSpec {
    FeatureSchema schema;
    std::size_t n_patients = 0;
    double rho = 0.0;  // lag-1 autocorrelation of the latent path, in [0, 1)
    std::vector<double> numeric_loadings;      // lambda per numeric feature, in [-1, 1]
    std::vector<double> categorical_loadings;  // lambda per categorical feature
    std::vector<NumericParams> numeric_params;
    std::vector<std::vector<double>> categorical_cutpoints;  // level probabilities per feature

    void validate() const;
};

// Table-calibrated defaults for the built-in datasets.
GeneratorSpec default_generator_spec(const std::string& dataset_id, std::size_t n_patients);

// Deterministic given (spec, seed); patient p draws from an independent
// substream derived from (seed, p), so generation order never matters.
Cohort generate_synthetic_cohort(const GeneratorSpec& spec, std::uint64_t seed);

struct AssociationEstimate {
    double value = 0.0;
    double std_error = 0.0;  // zero for the analytic case
    bool analytic = false;
    std::size_t mc_patients = 0;   // per-replicate sample size (Monte Carlo only)
    std::size_t mc_replicates = 0;
};

// Ground-truth association between two features of the generated process,
// pooled over patients and steps of [window_begin, window_end) (0-based,
// half-open). Numeric pairs on linear scale resolve to lambda_i * lambda_j in
// closed form; every other combination is estimated by seeded Monte Carlo
// with the same pooled-window design.
AssociationEstimate analytic_association(const GeneratorSpec& spec, std::size_t feature_i,
                                         std::size_t feature_j, std::size_t window_begin,
                                         std::size_t window_end, std::uint64_t mc_seed = 7,
                                         std::size_t mc_patients = 500, std::size_t mc_replicates = 16);

}  // namespace trajbench
