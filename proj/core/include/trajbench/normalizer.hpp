#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trajbench/cohort.hpp"
#include "trajbench/schema.hpp"

namespace trajbench {

// Per-feature z-scoring statistics, fitted on the training patients'
// observation windows only. Features flagged log_scale are standardized on
// the log scale (statistics of log(x), inversion exponentiates), keeping
// heavy-tailed features well-conditioned for the models.
struct Normalizer {
    std::vector<double> mean;       // per numeric feature, on the feature's model scale
    std::vector<double> stddev;     // population standard deviation, > 0
    std::vector<bool> log_scale;    // echoed from the schema at fit time

    bool fitted() const { return !mean.empty(); }
};

// Fits on steps [window_begin, window_end) (0-based) of the listed patients.
Normalizer fit_normalizer(const Cohort& cohort, const std::vector<std::string>& patient_ids,
                          std::size_t window_begin, std::size_t window_end);

// Raw feature value -> z-score on the feature's model scale.
double apply_normalizer(const Normalizer& normalizer, double value, std::size_t feature);

// z-score -> raw feature value.
double invert_normalizer(const Normalizer& normalizer, double z, std::size_t feature);

}  // namespace trajbench
