#pragma once

#include <cstdint>
#include <vector>

#include "trajbench/rng.hpp"

namespace trajbench {

struct IrregularitySpec {
    std::size_t g_max = 1;            // presets: 10/35 (monthly), 8/28 (hourly)
    bool resample_per_epoch = false;  // default: one fixed visit mask per run
    std::uint64_t seed = 0;

    void validate() const;
};

// Retained visit steps (1-based, strictly increasing, always starting at 1)
// and the elapsed gaps between consecutive retained visits.
struct VisitIndexSet {
    std::vector<std::size_t> retained;
    std::vector<std::size_t> delta_t;  // delta_t[0] = 0

    std::size_t size() const { return retained.size(); }
};

std::vector<std::size_t> compute_delta_t(const std::vector<std::size_t>& retained);

// Starts at step 1 and repeatedly draws a gap uniformly from {1,...,g_max},
// retaining steps until the first draw overflows observation_length.
VisitIndexSet sample_gaps(std::size_t observation_length, const IrregularitySpec& spec, Rng& stream);

// The complete visit set {1,...,observation_length} with unit gaps, used for
// test-side observation windows, which are never subsampled.
VisitIndexSet complete_visits(std::size_t observation_length);

}  // namespace trajbench
