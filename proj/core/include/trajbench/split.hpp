#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trajbench/cohort.hpp"

namespace trajbench {

struct SplitSpec {
    double train_fraction = 0.8;
    std::size_t observation_length = 0;  // 40 for art_hiv, 32 for hypotension
    std::size_t prediction_length = 0;   // 20 for art_hiv, 16 for hypotension
    std::uint64_t seed = 0;

    void validate(const FeatureSchema& schema) const;
};

struct SplitResult {
    std::vector<std::string> train_patient_ids;
    std::vector<std::string> test_patient_ids;
    std::size_t observation_length = 0;
    std::size_t prediction_length = 0;

    // 0-based half-open step windows over the stored trajectories.
    std::size_t observation_begin() const { return 0; }
    std::size_t observation_end() const { return observation_length; }
    std::size_t prediction_begin() const { return observation_length; }
    std::size_t prediction_end() const { return observation_length + prediction_length; }
};

// Seeded patient-level split: shuffles ids by a seeded permutation and takes
// the first floor(train_fraction * N) as train.
SplitResult dual_split(const Cohort& cohort, const SplitSpec& spec);

// Default 80/20 + 2:1 temporal split for a shipped dataset.
SplitSpec default_split_spec(const FeatureSchema& schema, std::uint64_t seed);

}  // namespace trajbench
