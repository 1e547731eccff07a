#pragma once

#include <cstdint>
#include <vector>

#include "trajbench/cohort.hpp"
#include "trajbench/gaps.hpp"
#include "trajbench/loss.hpp"
#include "trajbench/model.hpp"
#include "trajbench/normalizer.hpp"
#include "trajbench/split.hpp"

namespace trajbench {

struct TrainConfig {
    std::size_t epochs = 10;
    double lr = 1e-3;
    std::size_t batch_size = 32;
    double numeric_loss_weight = 1.0;
    double categorical_loss_weight = 1.0;
    bool clip_gradients = false;  // off by default; clips the global norm when enabled
    double clip_norm = 5.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainReport {
    std::vector<double> epoch_loss;     // step-weighted mean training loss per epoch
    std::vector<double> epoch_seconds;  // wall clock, reported out-of-band of deterministic artifacts
    std::uint64_t final_checksum = 0;
    std::size_t adam_steps = 0;
    std::size_t skipped_sequences = 0;  // retained sets too short to form a training pair
    // Leakage audit: counts of training-time reads that touched test patients
    // or prediction-window steps. Both must stay zero.
    std::size_t test_patient_reads = 0;
    std::size_t prediction_window_reads = 0;
};

struct TrainOutput {
    Model model;
    Normalizer normalizer;
    TrainReport report;
};

// Trains for exactly cfg.epochs epochs of Adam over seeded-shuffled
// minibatches of the train patients' subsampled observation windows. The
// LSTM uses the encoder/decoder layout (first ceil(k/2) retained visits
// encode, the rest are teacher-forced targets); the transformer predicts the
// next retained visit at every position. After training, per-feature
// residual standard deviations are estimated on the training examples and
// stored as the "residual_std" buffer for stochastic rollout decoding.
TrainOutput train(const ModelConfig& model_cfg, const Cohort& cohort, const SplitResult& split,
                  const IrregularitySpec& irregularity, const TrainConfig& train_cfg);

}  // namespace trajbench
