#include "trajbench/adam.hpp"

#include <cmath>
#include <string>

#include "trajbench/errors.hpp"

namespace trajbench {

AdamOptimizer::AdamOptimizer(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    if (config_.lr <= 0.0) throw ConfigError("adam: learning rate must be positive");
    if (config_.beta1 < 0.0 || config_.beta1 >= 1.0) throw ConfigError("adam: beta1 must be in [0, 1)");
    if (config_.beta2 < 0.0 || config_.beta2 >= 1.0) throw ConfigError("adam: beta2 must be in [0, 1)");
    if (config_.epsilon <= 0.0) throw ConfigError("adam: epsilon must be positive");
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor& p : params_) {
        m_.emplace_back(p.numel(), 0.0);
        v_.emplace_back(p.numel(), 0.0);
    }
}

void AdamOptimizer::step() {
    for (std::size_t idx = 0; idx < params_.size(); ++idx) {
        if (!params_[idx].has_grad()) {
            throw ContractError("adam: parameter " + std::to_string(idx) + " has no populated gradient");
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t idx = 0; idx < params_.size(); ++idx) {
        auto w = params_[idx].values_mut();
        const auto g = params_[idx].grad();
        auto& m = m_[idx];
        auto& v = v_[idx];
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            w[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
        }
    }
}

void AdamOptimizer::zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
}

}  // namespace trajbench
