#include "trajbench/tensor.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "trajbench/errors.hpp"

namespace trajbench {

namespace {
thread_local bool g_grad_enabled = true;

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

void validate_shape(const Shape& shape) {
    if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
    for (std::size_t d : shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_to_string(shape));
    }
}
}  // namespace

std::string shape_to_string(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

bool GradMode::enabled() { return g_grad_enabled; }
void GradMode::set(bool on) { g_grad_enabled = on; }

Tensor Tensor::zeros(Shape shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(Shape shape, double value) {
    validate_shape(shape);
    auto node = std::make_shared<detail::TensorNode>();
    node->data.assign(shape_numel(shape), value);
    node->shape = std::move(shape);
    return Tensor(std::move(node));
}

Tensor Tensor::scalar(double value) { return from_values({1}, {value}); }

Tensor Tensor::from_values(Shape shape, std::vector<double> values) {
    validate_shape(shape);
    if (shape_numel(shape) != values.size()) {
        throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                         shape_to_string(shape));
    }
    auto node = std::make_shared<detail::TensorNode>();
    node->shape = std::move(shape);
    node->data = std::move(values);
    return Tensor(std::move(node));
}

Tensor Tensor::row(std::vector<double> values) {
    const std::size_t n = values.size();
    return from_values({1, n}, std::move(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    if (r == 0) throw ShapeError("matrix literal must have at least one row");
    const std::size_t c = rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("ragged matrix literal");
        data.insert(data.end(), row.begin(), row.end());
    }
    return from_values({r, c}, std::move(data));
}

const Shape& Tensor::shape() const {
    if (!node_) throw StateError("shape() on an undefined tensor");
    return node_->shape;
}

std::size_t Tensor::numel() const {
    if (!node_) throw StateError("numel() on an undefined tensor");
    return node_->data.size();
}

std::size_t Tensor::rows() const {
    const Shape& s = shape();
    return s.size() >= 2 ? s[0] : 1;
}

std::size_t Tensor::cols() const {
    const Shape& s = shape();
    return s.size() >= 2 ? s[1] : s[0];
}

std::span<const double> Tensor::values() const {
    if (!node_) throw StateError("values() on an undefined tensor");
    return node_->data;
}

std::span<double> Tensor::values_mut() {
    if (!node_) throw StateError("values_mut() on an undefined tensor");
    return node_->data;
}

double Tensor::value() const {
    if (!is_scalar()) throw ContractError("value() requires a scalar tensor, shape is " + shape_to_string(shape()));
    return node_->data[0];
}

double Tensor::at(std::size_t i) const {
    if (i >= numel()) throw ContractError("index out of range");
    return node_->data[i];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    const std::size_t nc = cols();
    if (r >= rows() || c >= nc) throw ContractError("index out of range");
    return node_->data[r * nc + c];
}

Tensor& Tensor::set_requires_grad(bool enable) {
    if (!node_) throw StateError("set_requires_grad() on an undefined tensor");
    node_->requires_grad = enable;
    return *this;
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

bool Tensor::has_grad() const { return node_ && node_->grad.size() == node_->data.size(); }

std::span<const double> Tensor::grad() const {
    if (!has_grad()) throw ContractError("gradient not populated");
    return node_->grad;
}

std::span<double> Tensor::grad_mut() {
    if (!node_) throw StateError("grad_mut() on an undefined tensor");
    node_->ensure_grad();
    return node_->grad;
}

void Tensor::zero_grad() {
    if (!node_) return;
    node_->grad.assign(node_->data.size(), 0.0);
    node_->backward_done = false;
}

void Tensor::backward() {
    if (!node_) throw StateError("backward() on an undefined tensor");
    if (numel() != 1) {
        throw ContractError("backward() requires a scalar root, shape is " + shape_to_string(shape()));
    }
    if (node_->backward_done) {
        throw StateError("backward() already ran on this root; rebuild the graph or zero gradients first");
    }
    node_->backward_done = true;

    // Post-order DFS (iterative); only nodes that require grad can reach parameters.
    std::vector<detail::TensorNode*> order;
    std::unordered_set<detail::TensorNode*> visited;
    struct Frame {
        detail::TensorNode* node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack;
    if (node_->requires_grad) stack.push_back({node_.get(), 0});
    visited.insert(node_.get());
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next_parent < top.node->parents.size()) {
            detail::TensorNode* parent = top.node->parents[top.next_parent++].get();
            if (parent->requires_grad && visited.insert(parent).second) {
                stack.push_back({parent, 0});
            }
        } else {
            order.push_back(top.node);
            stack.pop_back();
        }
    }

    node_->ensure_grad();
    node_->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::TensorNode* n = *it;
        if (n->backprop) n->backprop(*n);
    }
}

namespace detail {

void check_finite(const std::vector<double>& data, const char* op) {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(op) + " produced a non-finite value");
        }
    }
}

Tensor make_op(const char* op, Shape shape, std::vector<double> data, std::vector<Tensor> parents,
               std::function<void(const TensorNode&)> backprop) {
    check_finite(data, op);
    auto node = std::make_shared<TensorNode>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    node->op = op;

    bool track = GradMode::enabled();
    if (track) {
        bool any = false;
        for (const Tensor& p : parents) any = any || p.requires_grad();
        track = any;
    }
    if (track) {
        node->requires_grad = true;
        node->parents.reserve(parents.size());
        for (Tensor& p : parents) node->parents.push_back(p.node_ptr());
        node->backprop = std::move(backprop);
    }
    return Tensor::wrap(std::move(node));
}

}  // namespace detail

}  // namespace trajbench
