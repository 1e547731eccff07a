#pragma once

#include "trajbench/heads.hpp"
#include "trajbench/schema.hpp"
#include "trajbench/tensor.hpp"

namespace trajbench {

struct LossWeights {
    double numeric = 1.0;
    double categorical = 1.0;
};

// Extracts the integer level targets of one categorical feature from encoded
// one-hot target rows.
std::vector<int> onehot_targets(const Tensor& targets, const FeatureSchema& schema,
                                std::size_t cat_feature);

// weights.numeric * MSE over z-scored numeric channels plus
// weights.categorical * mean cross-entropy over the categorical heads, both
// averaged over steps. targets are encoded visit rows aligned with preds.
Tensor reconstruction_loss(const SequencePrediction& preds, const Tensor& targets,
                           const FeatureSchema& schema, const LossWeights& weights);

}  // namespace trajbench
