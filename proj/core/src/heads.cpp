#include "trajbench/heads.hpp"

#include <cmath>

#include "trajbench/errors.hpp"
#include "trajbench/ops.hpp"

namespace trajbench {

void init_xavier(Tensor& weight, Rng& stream) {
    const auto& shape = weight.shape();
    if (shape.size() != 2) throw ContractError("init_xavier: expected a rank-2 weight");
    const double bound = std::sqrt(6.0 / static_cast<double>(shape[0] + shape[1]));
    for (double& v : weight.values_mut()) v = stream.uniform(-bound, bound);
}

void add_output_head_params(ParamStore& params, const FeatureSchema& schema, std::size_t hidden_dim,
                            Rng& init_stream) {
    init_xavier(params.add("head.numeric.weight", {hidden_dim, schema.numeric_count()}), init_stream);
    params.add("head.numeric.bias", {1, schema.numeric_count()});
    for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
        const std::size_t levels = schema.categorical_features[f].levels.size();
        const std::string base = "head.categorical." + std::to_string(f);
        init_xavier(params.add(base + ".weight", {hidden_dim, levels}), init_stream);
        params.add(base + ".bias", {1, levels});
    }
}

SequencePrediction apply_output_head(const Tensor& hidden, const ParamStore& params,
                                     const FeatureSchema& schema) {
    if (hidden.shape().size() != 2) throw ContractError("output head: hidden states must be rank-2");
    SequencePrediction pred;
    pred.steps = hidden.shape()[0];
    pred.numeric = add_rowvec(matmul(hidden, params.get("head.numeric.weight")),
                              params.get("head.numeric.bias"));
    pred.categorical_logits.reserve(schema.categorical_count());
    for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
        const std::string base = "head.categorical." + std::to_string(f);
        pred.categorical_logits.push_back(
            add_rowvec(matmul(hidden, params.get(base + ".weight")), params.get(base + ".bias")));
    }
    return pred;
}

std::size_t output_head_param_count(const FeatureSchema& schema, std::size_t hidden_dim) {
    std::size_t total = hidden_dim * schema.numeric_count() + schema.numeric_count();
    for (const auto& f : schema.categorical_features) {
        total += hidden_dim * f.levels.size() + f.levels.size();
    }
    return total;
}

}  // namespace trajbench
