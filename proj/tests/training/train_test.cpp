#include <doctest.h>

#include <cmath>

#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/generator.hpp"
#include "trajbench/train.hpp"

using namespace trajbench;

namespace {

struct Fixture {
    Cohort cohort;
    SplitResult split;
    IrregularitySpec irregularity;

    explicit Fixture(std::size_t n_patients = 30, std::uint64_t seed = 11) {
        FeatureSchema s;
        s.dataset_id = "tiny";
        s.numeric_features = {{"a", "u", false}};
        s.categorical_features = {{"c", {"x", "y", "z"}}};
        s.sequence_length = 12;

        GeneratorSpec spec;
        spec.schema = s;
        spec.n_patients = n_patients;
        spec.rho = 0.9;
        spec.numeric_loadings = {0.9};
        spec.numeric_params = {{0.0, 1.0}};
        spec.categorical_loadings = {0.8};
        spec.categorical_cutpoints = {{0.4, 0.35, 0.25}};
        cohort = generate_synthetic_cohort(spec, seed);

        SplitSpec split_spec;
        split_spec.observation_length = 8;
        split_spec.prediction_length = 4;
        split_spec.seed = 21;
        split_spec.validate(s);
        split = dual_split(cohort, split_spec);

        irregularity.g_max = 3;  // from step 1, a successor always fits in 8
        irregularity.seed = 31;
    }

    ModelConfig config(ModelKind kind, std::uint64_t seed = 5) const {
        ModelConfig cfg;
        cfg.kind = kind;
        cfg.input_dim = encoded_dim(cohort.schema);  // 1 + 3 + 1 = 5
        cfg.hidden_dim = 8;
        cfg.layers = kind == ModelKind::EthosLite ? 2 : 1;
        cfg.heads = 4;
        cfg.ffn_dim = 16;
        cfg.max_positions = 12;
        cfg.seed = seed;
        return cfg;
    }
};

}  // namespace

TEST_CASE("training runs the configured schedule and audits cleanly") {
    Fixture fx;
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 8;
    cfg.seed = 1;

    TrainOutput out = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, cfg);
    const TrainReport& report = out.report;

    REQUIRE(report.epoch_loss.size() == 3);
    REQUIRE(report.epoch_seconds.size() == 3);
    for (double loss : report.epoch_loss) CHECK(std::isfinite(loss));

    // 24 train patients in batches of 8 -> 3 optimizer steps per epoch.
    CHECK(fx.split.train_patient_ids.size() == 24);
    CHECK(report.adam_steps == 3 * 3);
    CHECK(report.skipped_sequences == 0);
    CHECK(report.test_patient_reads == 0);
    CHECK(report.prediction_window_reads == 0);
    CHECK(report.final_checksum == out.model.params.checksum());

    REQUIRE(out.model.params.has("residual_std"));
    const Tensor& residual = out.model.params.get("residual_std");
    CHECK(residual.shape() == Shape{1, 1});
    CHECK(residual.at(0) >= 0.0);
    CHECK_FALSE(out.model.params.is_trainable("residual_std"));

    CHECK(out.normalizer.fitted());
}

TEST_CASE("training is deterministic and sensitive to the seed") {
    Fixture fx;
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    cfg.seed = 9;

    TrainOutput a = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, cfg);
    TrainOutput b = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, cfg);
    CHECK(a.report.final_checksum == b.report.final_checksum);
    CHECK(a.report.epoch_loss == b.report.epoch_loss);

    TrainOutput c = train(fx.config(ModelKind::LstmSeq2Seq, 6), fx.cohort, fx.split, fx.irregularity, cfg);
    CHECK(a.report.final_checksum != c.report.final_checksum);

    TrainConfig other = cfg;
    other.seed = 10;
    TrainOutput d = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, other);
    CHECK(a.report.final_checksum != d.report.final_checksum);
}

TEST_CASE("loss decreases on a strongly structured cohort") {
    Fixture fx(40, 13);
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.batch_size = 8;
    cfg.lr = 5e-3;
    cfg.seed = 2;

    TrainOutput out = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, cfg);
    CHECK(out.report.epoch_loss.back() < out.report.epoch_loss.front());
}

TEST_CASE("transformer path trains and keeps its own schedule") {
    Fixture fx;
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 12;
    cfg.seed = 3;

    TrainOutput out = train(fx.config(ModelKind::EthosLite), fx.cohort, fx.split, fx.irregularity, cfg);
    CHECK(out.report.adam_steps == 2 * 2);  // 24 patients / batch 12
    CHECK(out.report.epoch_loss.size() == 2);
    for (double loss : out.report.epoch_loss) CHECK(std::isfinite(loss));
    CHECK(out.report.test_patient_reads == 0);
    CHECK(out.report.prediction_window_reads == 0);
}

TEST_CASE("per-epoch mask resampling changes the data stream but stays deterministic") {
    Fixture fx;
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    cfg.seed = 4;

    IrregularitySpec resample = fx.irregularity;
    resample.resample_per_epoch = true;

    TrainOutput fixed = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, cfg);
    TrainOutput a = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, resample, cfg);
    TrainOutput b = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, resample, cfg);
    CHECK(a.report.final_checksum == b.report.final_checksum);
    CHECK(a.report.final_checksum != fixed.report.final_checksum);
}

TEST_CASE("configuration violations are rejected up front") {
    Fixture fx;
    TrainConfig cfg;

    TrainConfig bad = cfg;
    bad.epochs = 0;
    CHECK_THROWS_AS(train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, bad),
                    ConfigError);
    bad = cfg;
    bad.lr = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.batch_size = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.numeric_loss_weight = 0.0;
    bad.categorical_loss_weight = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.clip_gradients = true;
    bad.clip_norm = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    SplitResult wrong = fx.split;
    wrong.prediction_length = 3;  // 8 + 3 != 12
    CHECK_THROWS_AS(train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, wrong, fx.irregularity, cfg),
                    ConfigError);

    SplitResult empty = fx.split;
    empty.train_patient_ids.clear();
    CHECK_THROWS_AS(train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, empty, fx.irregularity, cfg),
                    ContractError);
}

TEST_CASE("gradient clipping keeps training stable and changes the trajectory") {
    Fixture fx;
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    cfg.seed = 7;
    cfg.lr = 0.05;

    TrainConfig clipped = cfg;
    clipped.clip_gradients = true;
    clipped.clip_norm = 0.25;

    TrainOutput plain = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, cfg);
    TrainOutput tight = train(fx.config(ModelKind::LstmSeq2Seq), fx.cohort, fx.split, fx.irregularity, clipped);
    CHECK(plain.report.final_checksum != tight.report.final_checksum);
    for (double loss : tight.report.epoch_loss) CHECK(std::isfinite(loss));
}
