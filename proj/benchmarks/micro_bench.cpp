#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "trajbench/adam.hpp"
#include "trajbench/association.hpp"
#include "trajbench/encoding.hpp"
#include "trajbench/generator.hpp"
#include "trajbench/loss.hpp"
#include "trajbench/lstm.hpp"
#include "trajbench/model.hpp"
#include "trajbench/normalizer.hpp"
#include "trajbench/rng.hpp"
#include "trajbench/rollout.hpp"
#include "trajbench/stats.hpp"
#include "trajbench/tensor.hpp"
#include "trajbench/transformer.hpp"

using namespace trajbench;

namespace {

// Shared cohort-backed fixture so every workload sees realistic encodings.
struct Fixture {
    FeatureSchema schema;
    Cohort cohort;
    Normalizer normalizer;
};

const Fixture& art_fixture() {
    static const Fixture fixture = [] {
        Fixture f;
        f.schema = make_schema("art_hiv");
        f.cohort = generate_synthetic_cohort(default_generator_spec("art_hiv", 200), 21);
        std::vector<std::string> ids;
        for (const PatientTrajectory& p : f.cohort.patients) ids.push_back(p.patient_id);
        f.normalizer = fit_normalizer(f.cohort, ids, 0, 40);
        return f;
    }();
    return fixture;
}

Tensor encoded_rows(std::size_t patient, std::size_t rows) {
    const Fixture& f = art_fixture();
    IrregularitySpec unit;
    return encode_visits(f.cohort.patients[patient], complete_visits(rows), f.schema, f.normalizer, unit);
}

Model shipped_model(ModelKind kind) {
    const FeatureSchema& schema = art_fixture().schema;
    return make_model(default_model_config(kind, encoded_dim(schema), schema.sequence_length, 7), schema);
}

void bm_lstm_train_step(benchmark::State& state) {
    const FeatureSchema& schema = art_fixture().schema;
    Model model = shipped_model(ModelKind::LstmSeq2Seq);
    const Tensor encoder = encoded_rows(0, 20);
    const Tensor decoder = encoded_rows(1, 10);
    std::vector<Tensor> params = model.params.trainable_tensors();
    for (Tensor& p : params) p.set_requires_grad(true);

    for (auto _ : state) {
        for (Tensor& p : params) p.zero_grad();
        SequencePrediction pred = seq2seq_forward(encoder, decoder, model.params, model.config, schema);
        Tensor loss = reconstruction_loss(pred, decoder, schema, {});
        loss.backward();
        benchmark::DoNotOptimize(loss.value());
    }
}
BENCHMARK(bm_lstm_train_step);

void bm_transformer_train_step(benchmark::State& state) {
    const FeatureSchema& schema = art_fixture().schema;
    Model model = shipped_model(ModelKind::EthosLite);
    const Tensor steps = encoded_rows(0, 12);
    std::vector<Tensor> params = model.params.trainable_tensors();
    for (Tensor& p : params) p.set_requires_grad(true);

    for (auto _ : state) {
        for (Tensor& p : params) p.zero_grad();
        SequencePrediction pred = transformer_forward(steps, model.params, model.config, schema);
        Tensor loss = reconstruction_loss(pred, steps, schema, {});
        loss.backward();
        benchmark::DoNotOptimize(loss.value());
    }
}
BENCHMARK(bm_transformer_train_step);

void bm_transformer_full_context(benchmark::State& state) {
    // Rollout-granularity forward at the longest context the datasets use.
    const FeatureSchema& schema = art_fixture().schema;
    const Model model = shipped_model(ModelKind::EthosLite);
    const Tensor steps = encoded_rows(0, 60);
    for (auto _ : state) {
        SequencePrediction pred = transformer_forward(steps, model.params, model.config, schema);
        benchmark::DoNotOptimize(pred.numeric.values().data());
    }
}
BENCHMARK(bm_transformer_full_context);

void bm_adam_step(benchmark::State& state) {
    Model model = shipped_model(ModelKind::LstmSeq2Seq);
    std::vector<Tensor> params = model.params.trainable_tensors();
    Rng rng(14);
    for (Tensor& p : params) {
        p.set_requires_grad(true);
        p.zero_grad();
        auto g = p.grad_mut();
        for (double& x : g) x = rng.uniform(-1.0, 1.0);
    }
    AdamOptimizer opt(params);
    for (auto _ : state) {
        opt.step();
        benchmark::DoNotOptimize(params.front().values().data());
    }
}
BENCHMARK(bm_adam_step);

void bm_ks_statistic(benchmark::State& state) {
    Rng rng(15);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> a(n), b(n);
    for (double& x : a) x = rng.uniform(0.0, 1.0);
    for (double& x : b) x = rng.uniform(0.1, 1.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ks_statistic(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_ks_statistic)->Range(1 << 8, 1 << 14)->Complexity(benchmark::oNLogN);

void bm_association_matrix(benchmark::State& state) {
    const Fixture& f = art_fixture();
    const WindowColumns pooled = pool_window(f.cohort, 40, 60);
    for (auto _ : state) {
        AssociationMatrix m = association_matrix(pooled, f.schema);
        benchmark::DoNotOptimize(m.entries.data());
    }
}
BENCHMARK(bm_association_matrix);

void bm_generate_cohort(benchmark::State& state) {
    const GeneratorSpec spec = default_generator_spec("art_hiv", static_cast<std::size_t>(state.range(0)));
    std::uint64_t seed = 17;
    for (auto _ : state) {
        Cohort cohort = generate_synthetic_cohort(spec, seed++);
        benchmark::DoNotOptimize(cohort.patients.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_generate_cohort)->Range(16, 256)->Complexity(benchmark::oN);

void bm_rollout_patient(benchmark::State& state) {
    const Fixture& f = art_fixture();
    const Model model = shipped_model(ModelKind::LstmSeq2Seq);
    IrregularitySpec irregularity;
    irregularity.g_max = 10;
    // Deterministic decoding: stochastic decoding needs the trained
    // residual-spread buffer and costs the same per step.
    const RolloutOptions options;
    for (auto _ : state) {
        SynthesizedWindow window =
            rollout(model, f.normalizer, f.cohort.patients[0], 40, 20, irregularity, options);
        benchmark::DoNotOptimize(window.numeric.data());
    }
}
BENCHMARK(bm_rollout_patient);

}  // namespace

BENCHMARK_MAIN();
