#pragma once

#include "trajbench/heads.hpp"
#include "trajbench/model_config.hpp"
#include "trajbench/params.hpp"
#include "trajbench/schema.hpp"
#include "trajbench/tensor.hpp"

namespace trajbench {

// Adds and initializes the reduced causal-transformer parameters: input
// projection, learned positional embeddings, `layers` pre-norm blocks of
// multi-head causal self-attention + feed-forward, a final layer norm, and
// the shared per-feature output head.
void add_transformer_params(ParamStore& params, const ModelConfig& config, const FeatureSchema& schema,
                            Rng& init_stream);

// steps is {T, D} with T <= max_positions; position t's prediction depends
// only on rows 0..t and targets the next retained visit.
SequencePrediction transformer_forward(const Tensor& steps, const ParamStore& params,
                                       const ModelConfig& config, const FeatureSchema& schema);

std::size_t transformer_param_count(const ModelConfig& config, const FeatureSchema& schema);

}  // namespace trajbench
