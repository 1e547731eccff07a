#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace trajbench {

// Seeded random stream with hand-rolled distribution transforms.
//
// The mt19937_64 engine is fully specified by the standard, but the standard
// distribution adaptors are not; uniform/normal draws are implemented here so
// that the same seed yields the same values on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Uniform on the integers {lo, ..., hi}, inclusive, via rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Standard normal via Box-Muller; caches the paired draw.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent sub-seed from a master seed and a stage label, so
// that changing one stage's draw count never perturbs another stage's stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

// Indexed variant for per-patient / per-epoch substreams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

}  // namespace trajbench
