#pragma once

#include <vector>

#include "trajbench/params.hpp"
#include "trajbench/rng.hpp"
#include "trajbench/schema.hpp"
#include "trajbench/tensor.hpp"

namespace trajbench {

// Predictions for a run of consecutive steps: per-step z-scored numeric
// outputs and one logit row per categorical feature.
struct SequencePrediction {
    std::size_t steps = 0;
    Tensor numeric;                           // {steps, |numeric|}
    std::vector<Tensor> categorical_logits;   // per categorical feature: {steps, levels}
};

// Shared per-feature output head: one linear map hidden -> |numeric| plus one
// linear map hidden -> level count per categorical feature.
void add_output_head_params(ParamStore& params, const FeatureSchema& schema, std::size_t hidden_dim,
                            Rng& init_stream);

SequencePrediction apply_output_head(const Tensor& hidden, const ParamStore& params,
                                     const FeatureSchema& schema);

std::size_t output_head_param_count(const FeatureSchema& schema, std::size_t hidden_dim);

// Xavier-uniform initialization for a {fan_in, fan_out} weight matrix.
void init_xavier(Tensor& weight, Rng& stream);

}  // namespace trajbench
