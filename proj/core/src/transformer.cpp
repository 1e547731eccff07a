#include "trajbench/transformer.hpp"

#include <cmath>
#include <string>

#include "trajbench/errors.hpp"
#include "trajbench/ops.hpp"

namespace trajbench {

namespace {

std::string block_name(std::size_t layer, const char* suffix) {
    return "block" + std::to_string(layer) + "." + suffix;
}

}  // namespace

void add_transformer_params(ParamStore& params, const ModelConfig& config, const FeatureSchema& schema,
                            Rng& init_stream) {
    const std::size_t d = config.input_dim;
    const std::size_t h = config.hidden_dim;
    const std::size_t f = config.ffn_dim;

    init_xavier(params.add("embed.weight", {d, h}), init_stream);
    params.add("embed.bias", {1, h});
    Tensor& pos = params.add("pos", {config.max_positions, h});
    for (double& v : pos.values_mut()) v = init_stream.normal(0.0, 0.02);

    for (std::size_t l = 0; l < config.layers; ++l) {
        for (double& v : params.add(block_name(l, "ln1.gain"), {1, h}).values_mut()) v = 1.0;
        params.add(block_name(l, "ln1.bias"), {1, h});
        init_xavier(params.add(block_name(l, "attn.wq"), {h, h}), init_stream);
        params.add(block_name(l, "attn.bq"), {1, h});
        init_xavier(params.add(block_name(l, "attn.wk"), {h, h}), init_stream);
        params.add(block_name(l, "attn.bk"), {1, h});
        init_xavier(params.add(block_name(l, "attn.wv"), {h, h}), init_stream);
        params.add(block_name(l, "attn.bv"), {1, h});
        init_xavier(params.add(block_name(l, "attn.wo"), {h, h}), init_stream);
        params.add(block_name(l, "attn.bo"), {1, h});
        for (double& v : params.add(block_name(l, "ln2.gain"), {1, h}).values_mut()) v = 1.0;
        params.add(block_name(l, "ln2.bias"), {1, h});
        init_xavier(params.add(block_name(l, "ffn.w1"), {h, f}), init_stream);
        params.add(block_name(l, "ffn.b1"), {1, f});
        init_xavier(params.add(block_name(l, "ffn.w2"), {f, h}), init_stream);
        params.add(block_name(l, "ffn.b2"), {1, h});
    }
    for (double& v : params.add("final_ln.gain", {1, h}).values_mut()) v = 1.0;
    params.add("final_ln.bias", {1, h});
    add_output_head_params(params, schema, h, init_stream);
}

SequencePrediction transformer_forward(const Tensor& steps, const ParamStore& params,
                                       const ModelConfig& config, const FeatureSchema& schema) {
    if (steps.shape().size() != 2 || steps.rows() == 0) {
        throw ContractError("transformer_forward: input must be a nonempty matrix");
    }
    if (steps.cols() != config.input_dim) {
        throw ShapeError("transformer_forward: step width does not match input_dim");
    }
    const std::size_t t_len = steps.rows();
    if (t_len > config.max_positions) {
        throw ConfigError("transformer_forward: sequence length " + std::to_string(t_len) +
                          " exceeds max_positions " + std::to_string(config.max_positions));
    }
    const std::size_t head_dim = config.hidden_dim / config.heads;
    const double attn_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

    Tensor x = add(add_rowvec(matmul(steps, params.get("embed.weight")), params.get("embed.bias")),
                   slice_rows(params.get("pos"), 0, t_len));

    for (std::size_t l = 0; l < config.layers; ++l) {
        const Tensor attn_in =
            layer_norm(x, params.get(block_name(l, "ln1.gain")), params.get(block_name(l, "ln1.bias")));
        const Tensor q =
            add_rowvec(matmul(attn_in, params.get(block_name(l, "attn.wq"))), params.get(block_name(l, "attn.bq")));
        const Tensor k =
            add_rowvec(matmul(attn_in, params.get(block_name(l, "attn.wk"))), params.get(block_name(l, "attn.bk")));
        const Tensor v =
            add_rowvec(matmul(attn_in, params.get(block_name(l, "attn.wv"))), params.get(block_name(l, "attn.bv")));

        std::vector<Tensor> head_outputs;
        head_outputs.reserve(config.heads);
        for (std::size_t head = 0; head < config.heads; ++head) {
            const Tensor qh = slice_cols(q, head * head_dim, head_dim);
            const Tensor kh = slice_cols(k, head * head_dim, head_dim);
            const Tensor vh = slice_cols(v, head * head_dim, head_dim);
            const Tensor weights = causal_row_softmax(scale(matmul(qh, transpose(kh)), attn_scale));
            head_outputs.push_back(matmul(weights, vh));
        }
        const Tensor attn_out = add_rowvec(matmul(concat_cols(head_outputs), params.get(block_name(l, "attn.wo"))),
                                           params.get(block_name(l, "attn.bo")));
        x = add(x, attn_out);

        const Tensor ffn_in =
            layer_norm(x, params.get(block_name(l, "ln2.gain")), params.get(block_name(l, "ln2.bias")));
        const Tensor ffn_hidden =
            relu(add_rowvec(matmul(ffn_in, params.get(block_name(l, "ffn.w1"))), params.get(block_name(l, "ffn.b1"))));
        const Tensor ffn_out =
            add_rowvec(matmul(ffn_hidden, params.get(block_name(l, "ffn.w2"))), params.get(block_name(l, "ffn.b2")));
        x = add(x, ffn_out);
    }

    x = layer_norm(x, params.get("final_ln.gain"), params.get("final_ln.bias"));
    return apply_output_head(x, params, schema);
}

std::size_t transformer_param_count(const ModelConfig& config, const FeatureSchema& schema) {
    const std::size_t d = config.input_dim;
    const std::size_t h = config.hidden_dim;
    const std::size_t f = config.ffn_dim;
    const std::size_t per_block = 2 * h            // ln1
                                  + 4 * (h * h + h)  // attention projections
                                  + 2 * h            // ln2
                                  + (h * f + f) + (f * h + h);
    return (d * h + h) + config.max_positions * h + config.layers * per_block + 2 * h +
           output_head_param_count(schema, h);
}

}  // namespace trajbench
