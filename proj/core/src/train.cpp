#include "trajbench/train.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "trajbench/adam.hpp"
#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/ops.hpp"

namespace trajbench {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (lr <= 0.0) throw ConfigError("train: lr must be positive");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (numeric_loss_weight < 0.0 || categorical_loss_weight < 0.0) {
        throw ConfigError("train: loss weights must be non-negative");
    }
    if (numeric_loss_weight == 0.0 && categorical_loss_weight == 0.0) {
        throw ConfigError("train: loss weights must not both be zero");
    }
    if (clip_gradients && clip_norm <= 0.0) throw ConfigError("train: clip_norm must be positive");
}

namespace {

struct TrainingExample {
    Tensor encoder_or_inputs;
    Tensor decoder_inputs;  // LSTM only
    Tensor targets;
    std::size_t steps = 0;
};

Tensor rows_tensor(std::span<const double> data, std::size_t width, std::size_t row_begin,
                   std::size_t row_end) {
    std::vector<double> out(data.begin() + static_cast<std::ptrdiff_t>(row_begin * width),
                            data.begin() + static_cast<std::ptrdiff_t>(row_end * width));
    return Tensor::from_values({row_end - row_begin, width}, std::move(out));
}

// Builds the model-specific (inputs, targets) pair from the encoded retained
// visits of one patient; returns nullopt when the retained set is too short
// to form a single prediction.
std::optional<TrainingExample> make_example(const Tensor& encoded, const VisitIndexSet& visits,
                                            const ModelConfig& model_cfg, std::size_t g_max) {
    const std::size_t k = encoded.rows();
    if (k < 2) return std::nullopt;
    const std::size_t width = encoded.cols();
    const auto values = encoded.values();

    TrainingExample example;
    if (model_cfg.kind == ModelKind::LstmSeq2Seq) {
        const std::size_t m = (k + 1) / 2;  // encoder takes the first ceil(k/2) visits
        example.encoder_or_inputs = rows_tensor(values, width, 0, m);
        // Teacher forcing: decoder input j is the visit preceding target m+j,
        // with the Δt channel replaced by the target's Δt.
        std::vector<double> dec(values.begin() + static_cast<std::ptrdiff_t>((m - 1) * width),
                                values.begin() + static_cast<std::ptrdiff_t>((k - 1) * width));
        for (std::size_t j = 0; j + m < k; ++j) {
            dec[j * width + width - 1] =
                static_cast<double>(visits.delta_t[m + j]) / static_cast<double>(g_max);
        }
        example.decoder_inputs = Tensor::from_values({k - m, width}, std::move(dec));
        example.targets = rows_tensor(values, width, m, k);
    } else {
        example.encoder_or_inputs = rows_tensor(values, width, 0, k - 1);
        example.targets = rows_tensor(values, width, 1, k);
    }
    example.steps = example.targets.rows();
    return example;
}

SequencePrediction forward_example(const TrainingExample& example, const Model& model) {
    if (model.config.kind == ModelKind::LstmSeq2Seq) {
        return seq2seq_forward(example.encoder_or_inputs, example.decoder_inputs, model.params,
                               model.config, model.schema);
    }
    return transformer_forward(example.encoder_or_inputs, model.params, model.config, model.schema);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& stream) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(stream.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

void clip_gradient_norm(const std::vector<Tensor>& params, double max_norm) {
    double sq = 0.0;
    for (const Tensor& p : params) {
        for (double g : p.grad()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm <= max_norm || norm == 0.0) return;
    const double factor = max_norm / norm;
    for (Tensor p : params) {  // handle copy shares storage
        for (double& g : p.grad_mut()) g *= factor;
    }
}

}  // namespace

TrainOutput train(const ModelConfig& model_cfg, const Cohort& cohort, const SplitResult& split,
                  const IrregularitySpec& irregularity, const TrainConfig& train_cfg) {
    model_cfg.validate();
    train_cfg.validate();
    irregularity.validate();
    if (split.train_patient_ids.empty()) throw ContractError("train: no training patients");
    if (split.prediction_end() != cohort.schema.sequence_length) {
        throw ConfigError("train: split windows do not cover the schema sequence length");
    }

    std::unordered_map<std::string, std::size_t> cohort_index;
    for (std::size_t p = 0; p < cohort.patients.size(); ++p) {
        cohort_index.emplace(cohort.patients[p].patient_id, p);
    }
    for (const auto& id : split.train_patient_ids) {
        if (!cohort_index.count(id)) throw ContractError("train: unknown train patient id \"" + id + "\"");
    }
    const std::unordered_set<std::string> test_ids(split.test_patient_ids.begin(),
                                                   split.test_patient_ids.end());

    TrainOutput out;
    out.normalizer = fit_normalizer(cohort, split.train_patient_ids, split.observation_begin(),
                                    split.observation_end());
    out.model = make_model(model_cfg, cohort.schema);
    TrainReport& report = out.report;

    // Visit masks: per-patient substreams keyed by cohort index so the masks
    // are independent of split order and batch traversal.
    auto masks_for = [&](std::uint64_t mask_seed) {
        std::unordered_map<std::size_t, VisitIndexSet> masks;
        for (const auto& id : split.train_patient_ids) {
            const std::size_t p = cohort_index.at(id);
            Rng stream(derive_seed(mask_seed, "gaps-patient", p));
            masks.emplace(p, sample_gaps(split.observation_length, irregularity, stream));
        }
        return masks;
    };
    auto fixed_masks = masks_for(irregularity.seed);

    auto audit_access = [&](const PatientTrajectory& traj, const VisitIndexSet& visits) {
        if (test_ids.count(traj.patient_id)) ++report.test_patient_reads;
        for (std::size_t step : visits.retained) {
            if (step > split.observation_length) ++report.prediction_window_reads;
        }
    };

    AdamConfig adam_cfg;
    adam_cfg.lr = train_cfg.lr;
    const std::vector<Tensor> trainable = out.model.params.trainable_tensors();
    AdamOptimizer optimizer(trainable, adam_cfg);
    const LossWeights weights{train_cfg.numeric_loss_weight, train_cfg.categorical_loss_weight};

    for (std::size_t epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        const auto* masks = &fixed_masks;
        std::unordered_map<std::size_t, VisitIndexSet> epoch_masks;
        if (irregularity.resample_per_epoch) {
            epoch_masks = masks_for(derive_seed(irregularity.seed, "gaps-epoch", epoch));
            masks = &epoch_masks;
        }

        Rng shuffle_stream(derive_seed(train_cfg.seed, "epoch-shuffle", epoch));
        const auto order = shuffled_indices(split.train_patient_ids.size(), shuffle_stream);

        double epoch_loss_sum = 0.0;
        std::size_t epoch_steps = 0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += train_cfg.batch_size, ++batch_index) {
            const std::size_t end = std::min(begin + train_cfg.batch_size, order.size());
            Tensor batch_sum = Tensor::scalar(0.0);
            std::size_t batch_steps = 0;
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t p = cohort_index.at(split.train_patient_ids[order[k]]);
                const auto& traj = cohort.patients[p];
                const auto& visits = masks->at(p);
                audit_access(traj, visits);
                const Tensor encoded =
                    encode_visits(traj, visits, cohort.schema, out.normalizer, irregularity);
                auto example = make_example(encoded, visits, model_cfg, irregularity.g_max);
                if (!example) {
                    ++report.skipped_sequences;
                    continue;
                }
                try {
                    const SequencePrediction pred = forward_example(*example, out.model);
                    const Tensor loss = reconstruction_loss(pred, example->targets, cohort.schema, weights);
                    batch_sum = add(batch_sum, scale(loss, static_cast<double>(example->steps)));
                    batch_steps += example->steps;
                } catch (const NumericError& e) {
                    throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                       ", batch " + std::to_string(batch_index + 1) + ": " + e.what());
                }
            }
            if (batch_steps == 0) continue;

            Tensor batch_loss = scale(batch_sum, 1.0 / static_cast<double>(batch_steps));
            const double loss_value = batch_loss.value();
            if (!std::isfinite(loss_value)) {
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                   ", batch " + std::to_string(batch_index + 1) + ": " +
                                   std::to_string(loss_value));
            }
            optimizer.zero_grad();
            batch_loss.backward();
            if (train_cfg.clip_gradients) clip_gradient_norm(trainable, train_cfg.clip_norm);
            optimizer.step();

            epoch_loss_sum += loss_value * static_cast<double>(batch_steps);
            epoch_steps += batch_steps;
        }
        if (epoch_steps == 0) throw ContractError("train: no usable training sequences");
        report.epoch_loss.push_back(epoch_loss_sum / static_cast<double>(epoch_steps));
        report.epoch_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count());
    }
    report.adam_steps = optimizer.step_count();

    // Residual spread of the trained model on its own training examples, kept
    // as a buffer so stochastic rollout can add matched numeric noise.
    {
        NoGradGuard no_grad;
        const std::size_t nn = cohort.schema.numeric_count();
        std::vector<double> sq_sum(nn, 0.0);
        std::size_t rows = 0;
        for (const auto& id : split.train_patient_ids) {
            const std::size_t p = cohort_index.at(id);
            const auto& traj = cohort.patients[p];
            const auto& visits = fixed_masks.at(p);
            audit_access(traj, visits);
            const Tensor encoded = encode_visits(traj, visits, cohort.schema, out.normalizer, irregularity);
            auto example = make_example(encoded, visits, model_cfg, irregularity.g_max);
            if (!example) continue;
            const SequencePrediction pred = forward_example(*example, out.model);
            const auto pv = pred.numeric.values();
            const auto tv = example->targets.values();
            const std::size_t width = example->targets.cols();
            for (std::size_t t = 0; t < example->steps; ++t) {
                for (std::size_t f = 0; f < nn; ++f) {
                    const double d = pv[t * nn + f] - tv[t * width + f];
                    sq_sum[f] += d * d;
                }
            }
            rows += example->steps;
        }
        Tensor& residual = out.model.params.add_buffer("residual_std", {1, nn});
        auto rv = residual.values_mut();
        for (std::size_t f = 0; f < nn; ++f) {
            rv[f] = rows > 0 ? std::sqrt(sq_sum[f] / static_cast<double>(rows)) : 0.0;
        }
    }

    report.final_checksum = out.model.params.checksum();
    return out;
}

}  // namespace trajbench
