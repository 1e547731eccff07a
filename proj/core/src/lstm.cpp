#include "trajbench/lstm.hpp"

#include "trajbench/errors.hpp"
#include "trajbench/ops.hpp"

namespace trajbench {

std::pair<Tensor, Tensor> lstm_cell(const Tensor& x, const Tensor& h, const Tensor& c,
                                    const Tensor& wx, const Tensor& wh, const Tensor& b) {
    const std::size_t hidden = h.cols();
    if (wx.cols() != 4 * hidden || wh.cols() != 4 * hidden || b.cols() != 4 * hidden) {
        throw ShapeError("lstm_cell: gate widths must be 4x hidden size");
    }
    const Tensor z = add_rowvec(add(matmul(x, wx), matmul(h, wh)), b);
    const Tensor i = sigmoid(slice_cols(z, 0, hidden));
    const Tensor f = sigmoid(slice_cols(z, hidden, hidden));
    const Tensor g = tanh(slice_cols(z, 2 * hidden, hidden));
    const Tensor o = sigmoid(slice_cols(z, 3 * hidden, hidden));
    const Tensor c_next = add(mul(f, c), mul(i, g));
    const Tensor h_next = mul(o, tanh(c_next));
    return {h_next, c_next};
}

void add_lstm_params(ParamStore& params, const ModelConfig& config, const FeatureSchema& schema,
                     Rng& init_stream) {
    const std::size_t d = config.input_dim;
    const std::size_t h = config.hidden_dim;
    init_xavier(params.add("cell.wx", {d, 4 * h}), init_stream);
    init_xavier(params.add("cell.wh", {h, 4 * h}), init_stream);
    params.add("cell.b", {1, 4 * h});
    add_output_head_params(params, schema, h, init_stream);
}

SequencePrediction seq2seq_forward(const Tensor& encoder_steps, const Tensor& decoder_inputs,
                                   const ParamStore& params, const ModelConfig& config,
                                   const FeatureSchema& schema) {
    if (encoder_steps.shape().size() != 2 || encoder_steps.rows() == 0) {
        throw ContractError("seq2seq_forward: encoder input must be a nonempty matrix");
    }
    if (decoder_inputs.shape().size() != 2 || decoder_inputs.rows() == 0) {
        throw ContractError("seq2seq_forward: decoder input must be a nonempty matrix");
    }
    if (encoder_steps.cols() != config.input_dim || decoder_inputs.cols() != config.input_dim) {
        throw ShapeError("seq2seq_forward: step width does not match input_dim");
    }

    const Tensor& wx = params.get("cell.wx");
    const Tensor& wh = params.get("cell.wh");
    const Tensor& b = params.get("cell.b");

    Tensor h = Tensor::zeros({1, config.hidden_dim});
    Tensor c = Tensor::zeros({1, config.hidden_dim});
    for (std::size_t t = 0; t < encoder_steps.rows(); ++t) {
        std::tie(h, c) = lstm_cell(slice_rows(encoder_steps, t, 1), h, c, wx, wh, b);
    }

    std::vector<Tensor> decoder_states;
    decoder_states.reserve(decoder_inputs.rows());
    for (std::size_t t = 0; t < decoder_inputs.rows(); ++t) {
        std::tie(h, c) = lstm_cell(slice_rows(decoder_inputs, t, 1), h, c, wx, wh, b);
        decoder_states.push_back(h);
    }
    return apply_output_head(concat_rows(decoder_states), params, schema);
}

std::size_t lstm_param_count(const ModelConfig& config, const FeatureSchema& schema) {
    const std::size_t d = config.input_dim;
    const std::size_t h = config.hidden_dim;
    return 4 * (d * h + h * h + h) + output_head_param_count(schema, h);
}

}  // namespace trajbench
