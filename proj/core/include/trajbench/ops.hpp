#pragma once

#include <span>
#include <vector>

#include "trajbench/tensor.hpp"

namespace trajbench {

enum class Act { Sigmoid, Tanh, Relu };

// Matrix product of rank-2 tensors (m x k) . (k x n).
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor transpose(const Tensor& a);

// Elementwise, same shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// Multiply by a compile-time constant (not a graph value).
Tensor scale(const Tensor& a, double factor);

// Adds a {1, n} row vector to every row of an {m, n} matrix.
Tensor add_rowvec(const Tensor& a, const Tensor& row);

Tensor activation(Act kind, const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);

// Softmax over a vector (shape {k} or {1, k}); max-subtracted.
Tensor softmax(const Tensor& x);

// Row-wise softmax over the causal prefix: row i normalizes columns 0..i and
// leaves columns > i exactly zero. Entries beyond the prefix are never read,
// which is what makes the causality guarantee bit-exact.
Tensor causal_row_softmax(const Tensor& scores);

// Row-wise layer normalization with learned gain/bias (both {1, n}).
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);

// Sum of all entries, scalar result.
Tensor sum(const Tensor& a);

// Mean of squared differences over all entries.
Tensor mse_loss(const Tensor& pred, const Tensor& target);

// Mean negative log-softmax of the target class; logits {n, k}, one target
// index per row. Stabilized via log-sum-exp.
Tensor cross_entropy_loss(const Tensor& logits, const std::vector<int>& targets);

}  // namespace trajbench
