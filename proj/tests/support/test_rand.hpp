#pragma once

#include <vector>

#include "trajbench/rng.hpp"
#include "trajbench/tensor.hpp"

namespace trajbench::testing {

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return Tensor::from_values(std::move(shape), std::move(v));
}

// Random tensor whose entries stay away from zero; used around kinks (relu).
inline Tensor random_tensor_away_from_zero(Shape shape, Rng& rng, double min_abs = 0.05) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    std::vector<double> v(n);
    for (double& x : v) {
        const double mag = min_abs + rng.uniform01();
        x = rng.uniform01() < 0.5 ? -mag : mag;
    }
    return Tensor::from_values(std::move(shape), std::move(v));
}

}  // namespace trajbench::testing
