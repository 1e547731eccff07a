#pragma once

#include <cstdint>
#include <vector>

#include "trajbench/association.hpp"
#include "trajbench/cohort.hpp"
#include "trajbench/gaps.hpp"
#include "trajbench/model.hpp"
#include "trajbench/normalizer.hpp"

namespace trajbench {

struct RolloutOptions {
    // Default decoding is deterministic: numeric = head output (mean),
    // categorical = argmax. The stochastic option samples categoricals from
    // the softmax and perturbs numerics with the trained residual spread.
    bool stochastic = false;
    std::uint64_t seed = 0;
};

// A synthesized prediction window in schema units, one row per future step.
struct SynthesizedWindow {
    std::size_t horizon = 0;
    std::vector<double> numeric;    // horizon x |numeric|, raw scale
    std::vector<int> categorical;   // horizon x |categorical|, level indices
};

// Conditions on the complete observation window (steps 1..observation_length
// of the trajectory) and autoregressively generates `horizon` further steps,
// feeding each decoded prediction back in with Δt = 1.
SynthesizedWindow rollout(const Model& model, const Normalizer& normalizer,
                          const PatientTrajectory& trajectory, std::size_t observation_length,
                          std::size_t horizon, const IrregularitySpec& irregularity,
                          const RolloutOptions& options);

// Pools synthesized windows into per-feature columns for fidelity probes.
WindowColumns pool_synthesized(const std::vector<SynthesizedWindow>& windows,
                               const FeatureSchema& schema);

}  // namespace trajbench
