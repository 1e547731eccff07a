#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace trajbench {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);

namespace detail {

struct TensorNode {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // materialized lazily, same length as data
    bool requires_grad = false;
    bool backward_done = false;  // set on a node that served as a backward root
    const char* op = nullptr;    // null for leaves
    std::vector<std::shared_ptr<TensorNode>> parents;
    // Pulls this node's grad into the parents' grads (accumulating).
    std::function<void(const TensorNode&)> backprop;

    std::size_t numel() const { return data.size(); }
    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
};

}  // namespace detail

// Toggles reverse-mode graph recording for the current thread. Rollout and
// other inference paths disable it to avoid building throwaway graphs.
class GradMode {
public:
    static bool enabled();
    static void set(bool on);
};

struct NoGradGuard {
    NoGradGuard() : prev_(GradMode::enabled()) { GradMode::set(false); }
    ~NoGradGuard() { GradMode::set(prev_); }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool prev_;
};

// Dense row-major tensor of 64-bit floats. Copies are handles sharing the
// same storage and graph node. Ops record reverse-mode graph edges whenever
// grad recording is on and some input requires a gradient.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape);
    static Tensor full(Shape shape, double value);
    static Tensor scalar(double value);  // shape {1}
    static Tensor from_values(Shape shape, std::vector<double> values);
    static Tensor row(std::vector<double> values);  // shape {1, n}
    static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const;
    std::size_t numel() const;
    bool is_scalar() const { return defined() && numel() == 1; }
    // Rank-2 accessors; rank-1 tensors count as a single row.
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<const double> values() const;
    std::span<double> values_mut();
    double value() const;  // scalar content
    double at(std::size_t i) const;
    double at(std::size_t r, std::size_t c) const;

    Tensor& set_requires_grad(bool enable = true);
    bool requires_grad() const;
    bool has_grad() const;
    std::span<const double> grad() const;
    std::span<double> grad_mut();
    void zero_grad();

    // Reverse-mode accumulation from this scalar root. Running it twice on
    // the same root without rebuilding the graph is a StateError.
    void backward();

    detail::TensorNode* node() const { return node_.get(); }
    const std::shared_ptr<detail::TensorNode>& node_ptr() const { return node_; }

    static Tensor wrap(std::shared_ptr<detail::TensorNode> node) { return Tensor(std::move(node)); }

private:
    explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
    std::shared_ptr<detail::TensorNode> node_;
};

namespace detail {

// Builds an op result; drops graph edges when recording is off or no parent
// needs gradients. Throws NumericError if the forward produced NaN/Inf.
Tensor make_op(const char* op, Shape shape, std::vector<double> data,
               std::vector<Tensor> parents,
               std::function<void(const TensorNode&)> backprop);

void check_finite(const std::vector<double>& data, const char* op);

}  // namespace detail

}  // namespace trajbench
