#pragma once

#include <cstdint>
#include <vector>

#include "trajbench/tensor.hpp"

namespace trajbench {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Adam with bias correction. One (m, v) pair per parameter tensor; the step
// counter advances by exactly one per step() across all parameters.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<Tensor> params, AdamConfig config = {});

    // Requires every parameter to carry a populated gradient.
    void step();
    void zero_grad();

    std::int64_t step_count() const { return t_; }
    const AdamConfig& config() const { return config_; }

private:
    std::vector<Tensor> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    AdamConfig config_;
    std::int64_t t_ = 0;
};

}  // namespace trajbench
