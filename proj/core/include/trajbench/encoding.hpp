#pragma once

#include <vector>

#include "trajbench/cohort.hpp"
#include "trajbench/gaps.hpp"
#include "trajbench/normalizer.hpp"
#include "trajbench/schema.hpp"
#include "trajbench/tensor.hpp"

namespace trajbench {

// Width of one encoded step: |numeric| + total one-hot levels + 1 (Δt channel).
std::size_t encoded_dim(const FeatureSchema& schema);

// One encoded input row: z-scored numerics, one-hot categoricals, Δt/g_max.
std::vector<double> encode_step(const std::vector<double>& numeric_raw, const std::vector<int>& levels,
                                std::size_t delta_t, const FeatureSchema& schema,
                                const Normalizer& normalizer, std::size_t g_max);

// Encodes the retained visits of a trajectory as a |retained| x D matrix.
Tensor encode_visits(const PatientTrajectory& trajectory, const VisitIndexSet& visits,
                     const FeatureSchema& schema, const Normalizer& normalizer,
                     const IrregularitySpec& irregularity);

struct DecodedStep {
    std::vector<double> numeric;  // raw feature scale
    std::vector<int> levels;      // argmax of each one-hot block
    double delta_t_scaled = 0.0;  // Δt/g_max as encoded
};

DecodedStep decode_step(const std::vector<double>& row, const FeatureSchema& schema,
                        const Normalizer& normalizer);

}  // namespace trajbench
