#include "trajbench/loss.hpp"

#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/ops.hpp"

namespace trajbench {

std::vector<int> onehot_targets(const Tensor& targets, const FeatureSchema& schema,
                                std::size_t cat_feature) {
    if (cat_feature >= schema.categorical_count()) {
        throw ContractError("onehot_targets: categorical feature index out of range");
    }
    std::size_t offset = schema.numeric_count();
    for (std::size_t f = 0; f < cat_feature; ++f) offset += schema.categorical_features[f].levels.size();
    const std::size_t levels = schema.categorical_features[cat_feature].levels.size();

    const auto values = targets.values();
    const std::size_t width = targets.cols();
    std::vector<int> out(targets.rows(), -1);
    for (std::size_t t = 0; t < targets.rows(); ++t) {
        for (std::size_t k = 0; k < levels; ++k) {
            if (values[t * width + offset + k] == 1.0) {
                out[t] = static_cast<int>(k);
                break;
            }
        }
        if (out[t] < 0) {
            throw ContractError("onehot_targets: target row " + std::to_string(t) +
                                " has no active level for \"" +
                                schema.categorical_features[cat_feature].name + "\"");
        }
    }
    return out;
}

Tensor reconstruction_loss(const SequencePrediction& preds, const Tensor& targets,
                           const FeatureSchema& schema, const LossWeights& weights) {
    if (targets.shape().size() != 2 || targets.cols() != encoded_dim(schema)) {
        throw ContractError("reconstruction_loss: targets must be encoded visit rows");
    }
    if (preds.steps != targets.rows()) {
        throw ContractError("reconstruction_loss: prediction and target lengths differ (" +
                            std::to_string(preds.steps) + " vs " + std::to_string(targets.rows()) + ")");
    }
    const std::size_t nn = schema.numeric_count();
    const std::size_t nc = schema.categorical_count();
    if (weights.numeric < 0.0 || weights.categorical < 0.0) {
        throw ContractError("reconstruction_loss: loss weights must be non-negative");
    }

    Tensor total = Tensor::scalar(0.0);
    if (nn > 0) {
        total = add(total, scale(mse_loss(preds.numeric, slice_cols(targets, 0, nn)), weights.numeric));
    }
    if (nc > 0) {
        Tensor cat_total = Tensor::scalar(0.0);
        for (std::size_t f = 0; f < nc; ++f) {
            cat_total = add(cat_total, cross_entropy_loss(preds.categorical_logits[f],
                                                          onehot_targets(targets, schema, f)));
        }
        total = add(total, scale(cat_total, weights.categorical / static_cast<double>(nc)));
    }
    return total;
}

}  // namespace trajbench
