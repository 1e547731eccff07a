#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "finite_diff.hpp"
#include "test_rand.hpp"
#include "trajbench/lstm.hpp"
#include "trajbench/ops.hpp"
#include "trajbench/rng.hpp"

namespace trajbench::testing {

struct FamilyResult {
    std::string family;
    std::size_t instances = 0;
    double max_rel_err = 0.0;
    std::string worst;
};

// Fixed random cotangent: reducing through it makes every output entry
// influence the scalar loss, so no gradient path goes untested.
inline Tensor weighted_sum(const Tensor& t, Rng& rng) {
    std::vector<double> w(t.numel());
    for (double& x : w) x = rng.uniform(-1.0, 1.0);
    Shape shape = t.shape();
    return sum(mul(t, Tensor::from_values(std::move(shape), std::move(w))));
}

inline FamilyResult check_family(std::string name, std::size_t instances, std::uint64_t seed,
                                 const std::function<GradCheck(Rng&)>& run_one) {
    FamilyResult result;
    result.family = std::move(name);
    result.instances = instances;
    Rng rng(derive_seed(seed, result.family));
    for (std::size_t i = 0; i < instances; ++i) {
        GradCheck check = run_one(rng);
        if (check.max_rel_err > result.max_rel_err) {
            result.max_rel_err = check.max_rel_err;
            result.worst = check.worst;
        }
    }
    return result;
}

inline std::size_t dim(Rng& rng) { return static_cast<std::size_t>(rng.uniform_int(2, 4)); }

// One finite-difference pass over every differentiable operation, including
// the LSTM cell and a single-head causal attention block as composites.
inline std::vector<FamilyResult> run_gradient_suite(std::size_t instances = 50,
                                                    std::uint64_t seed = 20240901) {
    std::vector<FamilyResult> results;

    results.push_back(check_family("matmul", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
        Tensor a = random_tensor({m, k}, rng);
        Tensor b = random_tensor({k, n}, rng);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({a, b}, [&] { return sum(mul(matmul(a, b), cot)); });
    }));

    results.push_back(check_family("transpose", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor a = random_tensor({m, n}, rng);
        Tensor cot = random_tensor({n, m}, rng);
        return check_gradients({a}, [&] { return sum(mul(transpose(a), cot)); });
    }));

    results.push_back(check_family("add", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor a = random_tensor({m, n}, rng);
        Tensor b = random_tensor({m, n}, rng);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({a, b}, [&] { return sum(mul(add(a, b), cot)); });
    }));

    results.push_back(check_family("mul", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor a = random_tensor({m, n}, rng);
        Tensor b = random_tensor({m, n}, rng);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({a, b}, [&] { return sum(mul(mul(a, b), cot)); });
    }));

    results.push_back(check_family("scale", instances, seed, [](Rng& rng) {
        const std::size_t n = dim(rng);
        Tensor a = random_tensor({1, n}, rng);
        const double factor = rng.uniform(-2.0, 2.0);
        Tensor cot = random_tensor({1, n}, rng);
        return check_gradients({a}, [&] { return sum(mul(scale(a, factor), cot)); });
    }));

    results.push_back(check_family("add_rowvec", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor a = random_tensor({m, n}, rng);
        Tensor row = random_tensor({1, n}, rng);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({a, row}, [&] { return sum(mul(add_rowvec(a, row), cot)); });
    }));

    results.push_back(check_family("sigmoid", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor x = random_tensor({m, n}, rng, -2.0, 2.0);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({x}, [&] { return sum(mul(sigmoid(x), cot)); });
    }));

    results.push_back(check_family("tanh", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor x = random_tensor({m, n}, rng, -2.0, 2.0);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({x}, [&] { return sum(mul(tanh(x), cot)); });
    }));

    results.push_back(check_family("relu", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor x = random_tensor_away_from_zero({m, n}, rng);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({x}, [&] { return sum(mul(relu(x), cot)); });
    }));

    results.push_back(check_family("softmax", instances, seed, [](Rng& rng) {
        const std::size_t n = dim(rng);
        Tensor x = random_tensor({1, n}, rng, -2.0, 2.0);
        Tensor cot = random_tensor({1, n}, rng);
        return check_gradients({x}, [&] { return sum(mul(softmax(x), cot)); });
    }));

    results.push_back(check_family("causal_row_softmax", instances, seed, [](Rng& rng) {
        const std::size_t t = dim(rng);
        Tensor scores = random_tensor({t, t}, rng, -2.0, 2.0);
        Tensor cot = random_tensor({t, t}, rng);
        return check_gradients({scores}, [&] { return sum(mul(causal_row_softmax(scores), cot)); });
    }));

    results.push_back(check_family("layer_norm", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng) + 1;
        Tensor x = random_tensor({m, n}, rng);
        Tensor gain = random_tensor({1, n}, rng, 0.5, 1.5);
        Tensor bias = random_tensor({1, n}, rng);
        Tensor cot = random_tensor({m, n}, rng);
        return check_gradients({x, gain, bias},
                               [&] { return sum(mul(layer_norm(x, gain, bias), cot)); });
    }));

    results.push_back(check_family("slice", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng) + 1, n = dim(rng) + 1;
        Tensor x = random_tensor({m, n}, rng);
        const std::size_t r0 = static_cast<std::size_t>(rng.uniform_int(0, 1));
        const std::size_t c0 = static_cast<std::size_t>(rng.uniform_int(0, 1));
        Tensor rcot = random_tensor({m - 1, n}, rng);
        Tensor ccot = random_tensor({m, n - 1}, rng);
        return check_gradients({x}, [&] {
            Tensor rows = sum(mul(slice_rows(x, r0, m - 1), rcot));
            Tensor cols = sum(mul(slice_cols(x, c0, n - 1), ccot));
            return add(rows, cols);
        });
    }));

    results.push_back(check_family("concat", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n1 = dim(rng), n2 = dim(rng);
        Tensor a = random_tensor({m, n1}, rng);
        Tensor b = random_tensor({m, n2}, rng);
        Tensor c = random_tensor({1, n1 + n2}, rng);
        Tensor cot = random_tensor({m + 1, n1 + n2}, rng);
        return check_gradients({a, b, c}, [&] {
            return sum(mul(concat_rows({concat_cols({a, b}), c}), cot));
        });
    }));

    results.push_back(check_family("sum", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor x = random_tensor({m, n}, rng);
        return check_gradients({x}, [&] { return sum(x); });
    }));

    results.push_back(check_family("mse_loss", instances, seed, [](Rng& rng) {
        const std::size_t m = dim(rng), n = dim(rng);
        Tensor pred = random_tensor({m, n}, rng);
        Tensor target = random_tensor({m, n}, rng);
        return check_gradients({pred, target}, [&] { return mse_loss(pred, target); });
    }));

    results.push_back(check_family("cross_entropy_loss", instances, seed, [](Rng& rng) {
        const std::size_t rows = dim(rng), classes = dim(rng) + 1;
        Tensor logits = random_tensor({rows, classes}, rng, -2.0, 2.0);
        std::vector<int> targets(rows);
        for (int& t : targets) t = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(classes) - 1));
        return check_gradients({logits}, [&] { return cross_entropy_loss(logits, targets); });
    }));

    results.push_back(check_family("lstm_cell", instances, seed, [](Rng& rng) {
        const std::size_t d = dim(rng), h = dim(rng);
        Tensor x = random_tensor({1, d}, rng);
        Tensor h0 = random_tensor({1, h}, rng);
        Tensor c0 = random_tensor({1, h}, rng);
        Tensor wx = random_tensor({d, 4 * h}, rng, -0.5, 0.5);
        Tensor wh = random_tensor({h, 4 * h}, rng, -0.5, 0.5);
        Tensor b = random_tensor({1, 4 * h}, rng, -0.5, 0.5);
        Tensor hcot = random_tensor({1, h}, rng);
        Tensor ccot = random_tensor({1, h}, rng);
        return check_gradients({x, h0, c0, wx, wh, b}, [&] {
            auto [h1, c1] = lstm_cell(x, h0, c0, wx, wh, b);
            return add(sum(mul(h1, hcot)), sum(mul(c1, ccot)));
        });
    }));

    results.push_back(check_family("attention_block", instances, seed, [](Rng& rng) {
        const std::size_t t = dim(rng), h = dim(rng);
        Tensor x = random_tensor({t, h}, rng);
        Tensor wq = random_tensor({h, h}, rng, -0.5, 0.5);
        Tensor wk = random_tensor({h, h}, rng, -0.5, 0.5);
        Tensor wv = random_tensor({h, h}, rng, -0.5, 0.5);
        Tensor wo = random_tensor({h, h}, rng, -0.5, 0.5);
        Tensor bq = random_tensor({1, h}, rng, -0.2, 0.2);
        Tensor bk = random_tensor({1, h}, rng, -0.2, 0.2);
        Tensor bv = random_tensor({1, h}, rng, -0.2, 0.2);
        Tensor bo = random_tensor({1, h}, rng, -0.2, 0.2);
        Tensor cot = random_tensor({t, h}, rng);
        const double att_scale = 1.0 / std::sqrt(static_cast<double>(h));
        return check_gradients({x, wq, wk, wv, wo, bq, bk, bv, bo}, [&] {
            Tensor q = add_rowvec(matmul(x, wq), bq);
            Tensor k = add_rowvec(matmul(x, wk), bk);
            Tensor v = add_rowvec(matmul(x, wv), bv);
            Tensor weights = causal_row_softmax(scale(matmul(q, transpose(k)), att_scale));
            Tensor out = add_rowvec(matmul(matmul(weights, v), wo), bo);
            return sum(mul(out, cot));
        });
    }));

    return results;
}

}  // namespace trajbench::testing
