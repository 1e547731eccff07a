#pragma once

#include <utility>

#include "trajbench/heads.hpp"
#include "trajbench/model_config.hpp"
#include "trajbench/params.hpp"
#include "trajbench/schema.hpp"
#include "trajbench/tensor.hpp"

namespace trajbench {

// One LSTM step. x is {1, D}, h and c are {1, H}; wx is {D, 4H}, wh is
// {H, 4H}, b is {1, 4H} with gate blocks ordered [input, forget, cell,
// output]. Returns (h', c').
std::pair<Tensor, Tensor> lstm_cell(const Tensor& x, const Tensor& h, const Tensor& c,
                                    const Tensor& wx, const Tensor& wh, const Tensor& b);

// Adds and initializes the seq2seq parameters: a single shared cell (used for
// both the encoder pass and the decoder pass, which keeps the parameter count
// at one 64-unit layer) plus the per-feature output head.
void add_lstm_params(ParamStore& params, const ModelConfig& config, const FeatureSchema& schema,
                     Rng& init_stream);

// Encoder consumes the retained observation visits; the final (h, c)
// initializes the decoder, which is teacher-forced over decoder_inputs and
// emits one prediction per decoder input row.
SequencePrediction seq2seq_forward(const Tensor& encoder_steps, const Tensor& decoder_inputs,
                                   const ParamStore& params, const ModelConfig& config,
                                   const FeatureSchema& schema);

std::size_t lstm_param_count(const ModelConfig& config, const FeatureSchema& schema);

}  // namespace trajbench
