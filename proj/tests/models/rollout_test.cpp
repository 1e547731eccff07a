#include <doctest.h>

#include <cmath>

#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/generator.hpp"
#include "trajbench/rollout.hpp"

using namespace trajbench;

namespace {

struct Fixture {
    GeneratorSpec spec;
    Cohort cohort;
    Normalizer norm;
    IrregularitySpec irregularity;

    Fixture() {
        FeatureSchema s;
        s.dataset_id = "tiny";
        s.numeric_features = {{"lin", "u", false}, {"pos", "u", true}};
        s.categorical_features = {{"c", {"x", "y", "z"}}};
        s.sequence_length = 12;

        spec.schema = s;
        spec.n_patients = 10;
        spec.rho = 0.7;
        spec.numeric_loadings = {0.5, 0.4};
        spec.numeric_params = {{1.0, 2.0}, {0.3, 0.5}};
        spec.categorical_loadings = {0.2};
        spec.categorical_cutpoints = {{0.4, 0.35, 0.25}};
        cohort = generate_synthetic_cohort(spec, 404);

        std::vector<std::string> ids;
        for (const auto& p : cohort.patients) ids.push_back(p.patient_id);
        norm = fit_normalizer(cohort, ids, 0, 8);
        irregularity.g_max = 5;
    }

    Model model(ModelKind kind, std::uint64_t seed = 2) const {
        ModelConfig cfg;
        cfg.kind = kind;
        cfg.input_dim = encoded_dim(cohort.schema);  // 2 + 3 + 1 = 6
        cfg.hidden_dim = 8;
        cfg.layers = kind == ModelKind::EthosLite ? 2 : 1;
        cfg.heads = 4;
        cfg.ffn_dim = 16;
        cfg.max_positions = 11;  // observation 8 + horizon 4 - 1
        cfg.seed = seed;
        Model m = make_model(cfg, cohort.schema);
        Tensor& buf = m.params.add_buffer("residual_std", {1, 2});
        buf.values_mut()[0] = 0.2;
        buf.values_mut()[1] = 0.1;
        return m;
    }
};

}  // namespace

TEST_CASE("synthesized windows are complete, valid and deterministic") {
    Fixture fx;
    for (ModelKind kind : {ModelKind::LstmSeq2Seq, ModelKind::EthosLite}) {
        CAPTURE(model_kind_name(kind));
        Model model = fx.model(kind);
        RolloutOptions options;
        SynthesizedWindow w = rollout(model, fx.norm, fx.cohort.patients[0], 8, 4, fx.irregularity, options);
        CHECK(w.horizon == 4);
        REQUIRE(w.numeric.size() == 4 * 2);
        REQUIRE(w.categorical.size() == 4 * 1);
        for (std::size_t t = 0; t < 4; ++t) {
            CHECK(std::isfinite(w.numeric[t * 2 + 0]));
            CHECK(w.numeric[t * 2 + 1] > 0.0);  // log-scale feature decodes positive
            CHECK(w.categorical[t] >= 0);
            CHECK(w.categorical[t] < 3);
        }

        SynthesizedWindow again = rollout(model, fx.norm, fx.cohort.patients[0], 8, 4, fx.irregularity, options);
        CHECK(w.numeric == again.numeric);
        CHECK(w.categorical == again.categorical);
    }
}

TEST_CASE("stochastic decoding is seeded and differs from the deterministic path") {
    Fixture fx;
    Model model = fx.model(ModelKind::LstmSeq2Seq);
    RolloutOptions det;
    RolloutOptions sto;
    sto.stochastic = true;
    sto.seed = 5;

    SynthesizedWindow a = rollout(model, fx.norm, fx.cohort.patients[1], 8, 4, fx.irregularity, sto);
    SynthesizedWindow b = rollout(model, fx.norm, fx.cohort.patients[1], 8, 4, fx.irregularity, sto);
    CHECK(a.numeric == b.numeric);
    CHECK(a.categorical == b.categorical);

    RolloutOptions other = sto;
    other.seed = 6;
    SynthesizedWindow c = rollout(model, fx.norm, fx.cohort.patients[1], 8, 4, fx.irregularity, other);
    CHECK(a.numeric != c.numeric);

    SynthesizedWindow d = rollout(model, fx.norm, fx.cohort.patients[1], 8, 4, fx.irregularity, det);
    CHECK(a.numeric != d.numeric);
}

TEST_CASE("stochastic decoding requires the residual spread buffer") {
    Fixture fx;
    ModelConfig cfg;
    cfg.kind = ModelKind::LstmSeq2Seq;
    cfg.input_dim = encoded_dim(fx.cohort.schema);
    cfg.hidden_dim = 8;
    cfg.max_positions = 11;
    cfg.seed = 2;
    Model bare = make_model(cfg, fx.cohort.schema);  // no residual_std
    RolloutOptions sto;
    sto.stochastic = true;
    CHECK_THROWS_WITH_AS(rollout(bare, fx.norm, fx.cohort.patients[0], 8, 4, fx.irregularity, sto),
                         doctest::Contains("residual_std"), ContractError);
}

TEST_CASE("rollout contract violations") {
    Fixture fx;
    Model model = fx.model(ModelKind::EthosLite);
    RolloutOptions options;
    CHECK_THROWS_AS(rollout(model, fx.norm, fx.cohort.patients[0], 8, 0, fx.irregularity, options),
                    ContractError);
    CHECK_THROWS_AS(rollout(model, fx.norm, fx.cohort.patients[0], 0, 4, fx.irregularity, options),
                    ContractError);
    CHECK_THROWS_AS(rollout(model, fx.norm, fx.cohort.patients[0], 13, 4, fx.irregularity, options),
                    ContractError);
    CHECK_THROWS_AS(rollout(model, Normalizer{}, fx.cohort.patients[0], 8, 4, fx.irregularity, options),
                    ContractError);
    // 8 + 5 - 1 = 12 > max_positions 11.
    CHECK_THROWS_AS(rollout(model, fx.norm, fx.cohort.patients[0], 8, 5, fx.irregularity, options),
                    ConfigError);
}

TEST_CASE("pooling synthesized windows stacks per-feature columns") {
    Fixture fx;
    Model model = fx.model(ModelKind::LstmSeq2Seq);
    RolloutOptions options;
    std::vector<SynthesizedWindow> windows;
    for (std::size_t p = 0; p < 3; ++p) {
        windows.push_back(rollout(model, fx.norm, fx.cohort.patients[p], 8, 4, fx.irregularity, options));
    }
    WindowColumns columns = pool_synthesized(windows, fx.cohort.schema);
    REQUIRE(columns.numeric.size() == 2);
    REQUIRE(columns.categorical.size() == 1);
    CHECK(columns.numeric[0].size() == 12);
    CHECK(columns.categorical[0].size() == 12);
    CHECK(columns.pooled_size() == 12);
    CHECK(columns.numeric[1][0] == windows[0].numeric[1]);
    CHECK(columns.categorical[0][4] == windows[1].categorical[0]);

    CHECK_THROWS_AS(pool_synthesized({}, fx.cohort.schema), ContractError);
}
