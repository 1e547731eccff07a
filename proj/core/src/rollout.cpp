#include "trajbench/rollout.hpp"

#include <algorithm>
#include <cmath>

#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/ops.hpp"
#include "trajbench/rng.hpp"

namespace trajbench {

namespace {

int sample_level(std::span<const double> logits, Rng& stream) {
    double max_logit = logits[0];
    for (double l : logits) max_logit = std::max(max_logit, l);
    double total = 0.0;
    std::vector<double> weights(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
        weights[j] = std::exp(logits[j] - max_logit);
        total += weights[j];
    }
    const double u = stream.uniform01() * total;
    double cum = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        cum += weights[j];
        if (u < cum) return static_cast<int>(j);
    }
    return static_cast<int>(weights.size()) - 1;
}

int argmax_level(std::span<const double> logits) {
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace

SynthesizedWindow rollout(const Model& model, const Normalizer& normalizer,
                          const PatientTrajectory& trajectory, std::size_t observation_length,
                          std::size_t horizon, const IrregularitySpec& irregularity,
                          const RolloutOptions& options) {
    if (horizon < 1) throw ContractError("rollout: horizon must be >= 1");
    if (observation_length < 1 || observation_length > model.schema.sequence_length) {
        throw ContractError("rollout: observation_length out of range");
    }
    if (!normalizer.fitted()) throw ContractError("rollout: normalizer is not fitted");
    const FeatureSchema& schema = model.schema;
    const std::size_t nn = schema.numeric_count();
    const std::size_t nc = schema.categorical_count();
    const std::size_t width = encoded_dim(schema);
    const double dt_channel = 1.0 / static_cast<double>(irregularity.g_max);

    std::span<const double> residual_std;
    Rng stream(options.seed);
    if (options.stochastic) {
        if (!model.params.has("residual_std")) {
            throw ContractError("rollout: stochastic decoding requires the residual_std buffer");
        }
        residual_std = model.params.get("residual_std").values();
    }

    NoGradGuard no_grad;
    // Test-side conditioning is always on the complete observation window.
    const Tensor observed = encode_visits(trajectory, complete_visits(observation_length), schema,
                                          normalizer, irregularity);

    SynthesizedWindow window;
    window.horizon = horizon;
    window.numeric.reserve(horizon * nn);
    window.categorical.reserve(horizon * nc);

    // Decodes one prediction row, appends raw outputs, and builds the encoded
    // input row fed back for the next step.
    auto decode_and_reencode = [&](const SequencePrediction& pred, std::size_t row) {
        std::vector<double> next(width, 0.0);
        const auto numeric_values = pred.numeric.values();
        for (std::size_t f = 0; f < nn; ++f) {
            double z = numeric_values[row * nn + f];
            if (options.stochastic) z += residual_std[f] * stream.normal();
            window.numeric.push_back(invert_normalizer(normalizer, z, f));
            next[f] = z;
        }
        std::size_t offset = nn;
        for (std::size_t f = 0; f < nc; ++f) {
            const std::size_t levels = schema.categorical_features[f].levels.size();
            const auto logits = pred.categorical_logits[f].values().subspan(row * levels, levels);
            const int level = options.stochastic ? sample_level(logits, stream) : argmax_level(logits);
            window.categorical.push_back(level);
            next[offset + static_cast<std::size_t>(level)] = 1.0;
            offset += levels;
        }
        next[offset] = dt_channel;
        return next;
    };

    if (model.config.kind == ModelKind::LstmSeq2Seq) {
        const Tensor& wx = model.params.get("cell.wx");
        const Tensor& wh = model.params.get("cell.wh");
        const Tensor& b = model.params.get("cell.b");
        Tensor h = Tensor::zeros({1, model.config.hidden_dim});
        Tensor c = Tensor::zeros({1, model.config.hidden_dim});
        for (std::size_t t = 0; t < observed.rows(); ++t) {
            std::tie(h, c) = lstm_cell(slice_rows(observed, t, 1), h, c, wx, wh, b);
        }
        const auto observed_values = observed.values();
        std::vector<double> next(observed_values.end() - static_cast<std::ptrdiff_t>(width),
                                 observed_values.end());
        next[width - 1] = dt_channel;
        for (std::size_t s = 0; s < horizon; ++s) {
            std::tie(h, c) = lstm_cell(Tensor::from_values({1, width}, next), h, c, wx, wh, b);
            const SequencePrediction pred = apply_output_head(h, model.params, schema);
            next = decode_and_reencode(pred, 0);
        }
    } else {
        if (observation_length + horizon - 1 > model.config.max_positions) {
            throw ConfigError("rollout: observation window plus horizon exceeds max_positions");
        }
        const auto observed_values = observed.values();
        std::vector<double> context(observed_values.begin(), observed_values.end());
        for (std::size_t s = 0; s < horizon; ++s) {
            const std::size_t t_len = context.size() / width;
            const Tensor ctx = Tensor::from_values({t_len, width}, context);
            const SequencePrediction pred = transformer_forward(ctx, model.params, model.config, schema);
            const auto next = decode_and_reencode(pred, t_len - 1);
            if (s + 1 < horizon) context.insert(context.end(), next.begin(), next.end());
        }
    }
    return window;
}

WindowColumns pool_synthesized(const std::vector<SynthesizedWindow>& windows,
                               const FeatureSchema& schema) {
    if (windows.empty()) throw ContractError("pool_synthesized: no windows");
    WindowColumns out;
    out.numeric.resize(schema.numeric_count());
    out.categorical.resize(schema.categorical_count());
    for (const auto& window : windows) {
        for (std::size_t t = 0; t < window.horizon; ++t) {
            for (std::size_t f = 0; f < schema.numeric_count(); ++f) {
                out.numeric[f].push_back(window.numeric[t * schema.numeric_count() + f]);
            }
            for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
                out.categorical[f].push_back(window.categorical[t * schema.categorical_count() + f]);
            }
        }
    }
    return out;
}

}  // namespace trajbench
