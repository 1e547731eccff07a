#include "trajbench/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trajbench/errors.hpp"

namespace trajbench {

namespace {

using detail::TensorNode;

void require_rank2(const Tensor& t, const char* op) {
    if (t.shape().size() != 2) {
        throw ShapeError(std::string(op) + ": expected a rank-2 tensor, got shape " + shape_to_string(t.shape()));
    }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                         shape_to_string(b.shape()));
    }
}

// Accumulates into a parent's grad buffer if it participates in the graph.
std::vector<double>* grad_of(const TensorNode& out, std::size_t parent) {
    TensorNode* p = out.parents[parent].get();
    if (!p->requires_grad) return nullptr;
    p->ensure_grad();
    return &p->grad;
}

const std::vector<double>& data_of(const TensorNode& out, std::size_t parent) {
    return out.parents[parent]->data;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank2(a, "matmul");
    require_rank2(b, "matmul");
    const std::size_t m = a.shape()[0], k = a.shape()[1];
    const std::size_t k2 = b.shape()[0], n = b.shape()[1];
    if (k != k2) {
        throw ShapeError("matmul: inner dimensions disagree, " + shape_to_string(a.shape()) + " x " +
                         shape_to_string(b.shape()));
    }
    std::vector<double> out(m * n, 0.0);
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double aik = av[i * k + kk];
            if (aik == 0.0) continue;
            const double* brow = &bv[kk * n];
            double* orow = &out[i * n];
            for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
        }
    }
    return detail::make_op(
        "matmul", {m, n}, std::move(out), {a, b}, [m, k, n](const TensorNode& o) {
            const auto& av = data_of(o, 0);
            const auto& bv = data_of(o, 1);
            if (auto* da = grad_of(o, 0)) {
                // dA = dC . B^T
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t kk = 0; kk < k; ++kk) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) acc += o.grad[i * n + j] * bv[kk * n + j];
                        (*da)[i * k + kk] += acc;
                    }
            }
            if (auto* db = grad_of(o, 1)) {
                // dB = A^T . dC
                for (std::size_t kk = 0; kk < k; ++kk)
                    for (std::size_t j = 0; j < n; ++j) {
                        double acc = 0.0;
                        for (std::size_t i = 0; i < m; ++i) acc += av[i * k + kk] * o.grad[i * n + j];
                        (*db)[kk * n + j] += acc;
                    }
            }
        });
}

Tensor transpose(const Tensor& a) {
    require_rank2(a, "transpose");
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    std::vector<double> out(m * n);
    const auto av = a.values();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = av[i * n + j];
    return detail::make_op("transpose", {n, m}, std::move(out), {a}, [m, n](const TensorNode& o) {
        if (auto* da = grad_of(o, 0)) {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) (*da)[i * n + j] += o.grad[j * m + i];
        }
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    const auto av = a.values();
    const auto bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
    return detail::make_op("add", a.shape(), std::move(out), {a, b}, [](const TensorNode& o) {
        for (std::size_t p = 0; p < 2; ++p) {
            if (auto* d = grad_of(o, p)) {
                for (std::size_t i = 0; i < o.grad.size(); ++i) (*d)[i] += o.grad[i];
            }
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    const auto av = a.values();
    const auto bv = b.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    return detail::make_op("mul", a.shape(), std::move(out), {a, b}, [](const TensorNode& o) {
        const auto& av = data_of(o, 0);
        const auto& bv = data_of(o, 1);
        if (auto* da = grad_of(o, 0)) {
            for (std::size_t i = 0; i < o.grad.size(); ++i) (*da)[i] += o.grad[i] * bv[i];
        }
        if (auto* db = grad_of(o, 1)) {
            for (std::size_t i = 0; i < o.grad.size(); ++i) (*db)[i] += o.grad[i] * av[i];
        }
    });
}

Tensor scale(const Tensor& a, double factor) {
    const auto av = a.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * factor;
    return detail::make_op("scale", a.shape(), std::move(out), {a}, [factor](const TensorNode& o) {
        if (auto* da = grad_of(o, 0)) {
            for (std::size_t i = 0; i < o.grad.size(); ++i) (*da)[i] += o.grad[i] * factor;
        }
    });
}

Tensor add_rowvec(const Tensor& a, const Tensor& row) {
    require_rank2(a, "add_rowvec");
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    if (row.numel() != n) {
        throw ShapeError("add_rowvec: row vector length " + std::to_string(row.numel()) +
                         " does not match column count " + std::to_string(n));
    }
    const auto av = a.values();
    const auto rv = row.values();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = av[i * n + j] + rv[j];
    return detail::make_op("add_rowvec", a.shape(), std::move(out), {a, row}, [m, n](const TensorNode& o) {
        if (auto* da = grad_of(o, 0)) {
            for (std::size_t i = 0; i < o.grad.size(); ++i) (*da)[i] += o.grad[i];
        }
        if (auto* dr = grad_of(o, 1)) {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) (*dr)[j] += o.grad[i * n + j];
        }
    });
}

Tensor activation(Act kind, const Tensor& x) {
    const auto xv = x.values();
    std::vector<double> out(xv.size());
    switch (kind) {
        case Act::Sigmoid:
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double v = xv[i];
                // Overflow-safe logistic.
                out[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
            }
            return detail::make_op("sigmoid", x.shape(), std::move(out), {x}, [](const TensorNode& o) {
                if (auto* dx = grad_of(o, 0)) {
                    for (std::size_t i = 0; i < o.grad.size(); ++i) {
                        const double y = o.data[i];
                        (*dx)[i] += o.grad[i] * y * (1.0 - y);
                    }
                }
            });
        case Act::Tanh:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(xv[i]);
            return detail::make_op("tanh", x.shape(), std::move(out), {x}, [](const TensorNode& o) {
                if (auto* dx = grad_of(o, 0)) {
                    for (std::size_t i = 0; i < o.grad.size(); ++i) {
                        const double y = o.data[i];
                        (*dx)[i] += o.grad[i] * (1.0 - y * y);
                    }
                }
            });
        case Act::Relu:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
            return detail::make_op("relu", x.shape(), std::move(out), {x}, [](const TensorNode& o) {
                if (auto* dx = grad_of(o, 0)) {
                    const auto& xv = data_of(o, 0);
                    for (std::size_t i = 0; i < o.grad.size(); ++i) {
                        if (xv[i] > 0.0) (*dx)[i] += o.grad[i];
                    }
                }
            });
    }
    throw ContractError("activation: unknown kind");
}

Tensor sigmoid(const Tensor& x) { return activation(Act::Sigmoid, x); }
Tensor tanh(const Tensor& x) { return activation(Act::Tanh, x); }
Tensor relu(const Tensor& x) { return activation(Act::Relu, x); }

namespace {

// Softmax of src[0..k) into dst[0..k); returns nothing, max-subtracted.
void softmax_span(const double* src, double* dst, std::size_t k) {
    double mx = src[0];
    for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, src[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        dst[i] = std::exp(src[i] - mx);
        total += dst[i];
    }
    for (std::size_t i = 0; i < k; ++i) dst[i] /= total;
}

}  // namespace

Tensor softmax(const Tensor& x) {
    if (!x.defined() || x.numel() == 0) throw ShapeError("softmax: empty input");
    if (x.shape().size() > 2 || (x.shape().size() == 2 && x.shape()[0] != 1)) {
        throw ShapeError("softmax: expected a vector, got shape " + shape_to_string(x.shape()));
    }
    const auto xv = x.values();
    const std::size_t k = xv.size();
    std::vector<double> out(k);
    softmax_span(xv.data(), out.data(), k);
    return detail::make_op("softmax", x.shape(), std::move(out), {x}, [k](const TensorNode& o) {
        if (auto* dx = grad_of(o, 0)) {
            double dot = 0.0;
            for (std::size_t i = 0; i < k; ++i) dot += o.grad[i] * o.data[i];
            for (std::size_t i = 0; i < k; ++i) (*dx)[i] += o.data[i] * (o.grad[i] - dot);
        }
    });
}

Tensor causal_row_softmax(const Tensor& scores) {
    require_rank2(scores, "causal_row_softmax");
    const std::size_t t = scores.shape()[0];
    if (scores.shape()[1] != t) {
        throw ShapeError("causal_row_softmax: expected a square matrix, got " + shape_to_string(scores.shape()));
    }
    const auto sv = scores.values();
    std::vector<double> out(t * t, 0.0);
    for (std::size_t i = 0; i < t; ++i) {
        softmax_span(&sv[i * t], &out[i * t], i + 1);
    }
    return detail::make_op("causal_row_softmax", scores.shape(), std::move(out), {scores},
                           [t](const TensorNode& o) {
                               if (auto* dx = grad_of(o, 0)) {
                                   for (std::size_t i = 0; i < t; ++i) {
                                       const std::size_t k = i + 1;
                                       double dot = 0.0;
                                       for (std::size_t j = 0; j < k; ++j)
                                           dot += o.grad[i * t + j] * o.data[i * t + j];
                                       for (std::size_t j = 0; j < k; ++j)
                                           (*dx)[i * t + j] += o.data[i * t + j] * (o.grad[i * t + j] - dot);
                                   }
                               }
                           });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
    require_rank2(x, "layer_norm");
    const std::size_t m = x.shape()[0], n = x.shape()[1];
    if (gain.numel() != n || bias.numel() != n) {
        throw ShapeError("layer_norm: gain/bias length must match feature dimension " + std::to_string(n));
    }
    const auto xv = x.values();
    const auto gv = gain.values();
    const auto bv = bias.values();
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += xv[i * n + j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = xv[i * n + j] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double inv = 1.0 / std::sqrt(var + eps);
        for (std::size_t j = 0; j < n; ++j) {
            out[i * n + j] = (xv[i * n + j] - mean) * inv * gv[j] + bv[j];
        }
    }
    return detail::make_op(
        "layer_norm", x.shape(), std::move(out), {x, gain, bias}, [m, n, eps](const TensorNode& o) {
            const auto& xv = data_of(o, 0);
            const auto& gv = data_of(o, 1);
            auto* dx = grad_of(o, 0);
            auto* dg = grad_of(o, 1);
            auto* db = grad_of(o, 2);
            std::vector<double> xhat(n);
            for (std::size_t i = 0; i < m; ++i) {
                double mean = 0.0;
                for (std::size_t j = 0; j < n; ++j) mean += xv[i * n + j];
                mean /= static_cast<double>(n);
                double var = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = xv[i * n + j] - mean;
                    var += d * d;
                }
                var /= static_cast<double>(n);
                const double inv = 1.0 / std::sqrt(var + eps);
                for (std::size_t j = 0; j < n; ++j) xhat[j] = (xv[i * n + j] - mean) * inv;

                if (dg || db) {
                    for (std::size_t j = 0; j < n; ++j) {
                        if (dg) (*dg)[j] += o.grad[i * n + j] * xhat[j];
                        if (db) (*db)[j] += o.grad[i * n + j];
                    }
                }
                if (dx) {
                    double mean_dxh = 0.0, mean_dxh_xh = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double dxh = o.grad[i * n + j] * gv[j];
                        mean_dxh += dxh;
                        mean_dxh_xh += dxh * xhat[j];
                    }
                    mean_dxh /= static_cast<double>(n);
                    mean_dxh_xh /= static_cast<double>(n);
                    for (std::size_t j = 0; j < n; ++j) {
                        const double dxh = o.grad[i * n + j] * gv[j];
                        (*dx)[i * n + j] += inv * (dxh - mean_dxh - xhat[j] * mean_dxh_xh);
                    }
                }
            }
        });
}

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count) {
    require_rank2(a, "slice_rows");
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    if (count == 0 || start + count > m) throw ShapeError("slice_rows: range out of bounds");
    const auto av = a.values();
    std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(start * n),
                            av.begin() + static_cast<std::ptrdiff_t>((start + count) * n));
    return detail::make_op("slice_rows", {count, n}, std::move(out), {a}, [start, n](const TensorNode& o) {
        if (auto* da = grad_of(o, 0)) {
            for (std::size_t i = 0; i < o.grad.size(); ++i) (*da)[start * n + i] += o.grad[i];
        }
    });
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count) {
    require_rank2(a, "slice_cols");
    const std::size_t m = a.shape()[0], n = a.shape()[1];
    if (count == 0 || start + count > n) throw ShapeError("slice_cols: range out of bounds");
    const auto av = a.values();
    std::vector<double> out(m * count);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < count; ++j) out[i * count + j] = av[i * n + start + j];
    return detail::make_op("slice_cols", {m, count}, std::move(out), {a},
                           [m, n, start, count](const TensorNode& o) {
                               if (auto* da = grad_of(o, 0)) {
                                   for (std::size_t i = 0; i < m; ++i)
                                       for (std::size_t j = 0; j < count; ++j)
                                           (*da)[i * n + start + j] += o.grad[i * count + j];
                               }
                           });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    require_rank2(parts[0], "concat_cols");
    const std::size_t m = parts[0].shape()[0];
    std::size_t total = 0;
    std::vector<std::size_t> widths;
    widths.reserve(parts.size());
    for (const Tensor& p : parts) {
        require_rank2(p, "concat_cols");
        if (p.shape()[0] != m) throw ShapeError("concat_cols: row counts disagree");
        widths.push_back(p.shape()[1]);
        total += p.shape()[1];
    }
    std::vector<double> out(m * total);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        const auto pv = parts[p].values();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < widths[p]; ++j) out[i * total + offset + j] = pv[i * widths[p] + j];
        offset += widths[p];
    }
    return detail::make_op("concat_cols", {m, total}, std::move(out), parts,
                           [m, total, widths](const TensorNode& o) {
                               std::size_t offset = 0;
                               for (std::size_t p = 0; p < widths.size(); ++p) {
                                   if (auto* dp = grad_of(o, p)) {
                                       for (std::size_t i = 0; i < m; ++i)
                                           for (std::size_t j = 0; j < widths[p]; ++j)
                                               (*dp)[i * widths[p] + j] += o.grad[i * total + offset + j];
                                   }
                                   offset += widths[p];
                               }
                           });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no inputs");
    require_rank2(parts[0], "concat_rows");
    const std::size_t n = parts[0].shape()[1];
    std::size_t total = 0;
    std::vector<std::size_t> heights;
    heights.reserve(parts.size());
    for (const Tensor& p : parts) {
        require_rank2(p, "concat_rows");
        if (p.shape()[1] != n) throw ShapeError("concat_rows: column counts disagree");
        heights.push_back(p.shape()[0]);
        total += p.shape()[0];
    }
    std::vector<double> out;
    out.reserve(total * n);
    for (const Tensor& p : parts) {
        const auto pv = p.values();
        out.insert(out.end(), pv.begin(), pv.end());
    }
    return detail::make_op("concat_rows", {total, n}, std::move(out), parts,
                           [n, heights](const TensorNode& o) {
                               std::size_t row = 0;
                               for (std::size_t p = 0; p < heights.size(); ++p) {
                                   if (auto* dp = grad_of(o, p)) {
                                       for (std::size_t i = 0; i < heights[p] * n; ++i)
                                           (*dp)[i] += o.grad[row * n + i];
                                   }
                                   row += heights[p];
                               }
                           });
}

Tensor sum(const Tensor& a) {
    const auto av = a.values();
    double total = 0.0;
    for (double v : av) total += v;
    return detail::make_op("sum", {1}, {total}, {a}, [](const TensorNode& o) {
        if (auto* da = grad_of(o, 0)) {
            for (double& d : *da) d += o.grad[0];
        }
    });
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "mse_loss");
    const auto pv = pred.values();
    const auto tv = target.values();
    const std::size_t n = pv.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pv[i] - tv[i];
        total += d * d;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    return detail::make_op("mse_loss", {1}, {total * inv_n}, {pred, target}, [n, inv_n](const TensorNode& o) {
        const auto& pv = data_of(o, 0);
        const auto& tv = data_of(o, 1);
        const double g = o.grad[0] * 2.0 * inv_n;
        if (auto* dp = grad_of(o, 0)) {
            for (std::size_t i = 0; i < n; ++i) (*dp)[i] += g * (pv[i] - tv[i]);
        }
        if (auto* dt = grad_of(o, 1)) {
            for (std::size_t i = 0; i < n; ++i) (*dt)[i] -= g * (pv[i] - tv[i]);
        }
    });
}

Tensor cross_entropy_loss(const Tensor& logits, const std::vector<int>& targets) {
    require_rank2(logits, "cross_entropy_loss");
    const std::size_t n = logits.shape()[0], k = logits.shape()[1];
    if (targets.size() != n) {
        throw ContractError("cross_entropy_loss: expected " + std::to_string(n) + " target indices, got " +
                            std::to_string(targets.size()));
    }
    for (int t : targets) {
        if (t < 0 || static_cast<std::size_t>(t) >= k) {
            throw ContractError("cross_entropy_loss: target index " + std::to_string(t) + " outside [0, " +
                                std::to_string(k) + ")");
        }
    }
    const auto lv = logits.values();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &lv[i * k];
        double mx = row[0];
        for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, row[j]);
        double lse = 0.0;
        for (std::size_t j = 0; j < k; ++j) lse += std::exp(row[j] - mx);
        lse = mx + std::log(lse);
        total += lse - row[targets[i]];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    return detail::make_op("cross_entropy_loss", {1}, {total * inv_n}, {logits},
                           [n, k, inv_n, targets](const TensorNode& o) {
                               if (auto* dl = grad_of(o, 0)) {
                                   const auto& lv = data_of(o, 0);
                                   const double g = o.grad[0] * inv_n;
                                   std::vector<double> probs(k);
                                   for (std::size_t i = 0; i < n; ++i) {
                                       softmax_span(&lv[i * k], probs.data(), k);
                                       for (std::size_t j = 0; j < k; ++j) (*dl)[i * k + j] += g * probs[j];
                                       (*dl)[i * k + static_cast<std::size_t>(targets[i])] -= g;
                                   }
                               }
                           });
}

}  // namespace trajbench
