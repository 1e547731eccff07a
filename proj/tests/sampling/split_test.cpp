#include <doctest.h>

#include <algorithm>
#include <set>

#include "trajbench/errors.hpp"
#include "trajbench/generator.hpp"
#include "trajbench/rng.hpp"
#include "trajbench/split.hpp"

using namespace trajbench;

namespace {

Cohort cohort_of(std::size_t n, std::size_t sequence_length = 6) {
    GeneratorSpec spec = default_generator_spec("art_hiv", n);
    spec.schema.sequence_length = sequence_length;
    return generate_synthetic_cohort(spec, 1);
}

}  // namespace

TEST_CASE("train size follows the floor rule at the published cohort size") {
    Cohort cohort = cohort_of(8916, 3);
    SplitSpec spec;
    spec.observation_length = 2;
    spec.prediction_length = 1;
    spec.seed = 7;
    SplitResult split = dual_split(cohort, spec);
    CHECK(split.train_patient_ids.size() == 7132);
    CHECK(split.test_patient_ids.size() == 1784);
}

TEST_CASE("split partitions every cohort exactly") {
    Rng sizes(31);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = static_cast<std::size_t>(sizes.uniform_int(5, 300));
        Cohort cohort = cohort_of(n, 3);
        SplitSpec spec;
        spec.observation_length = 2;
        spec.prediction_length = 1;
        spec.seed = static_cast<std::uint64_t>(rep);
        SplitResult split = dual_split(cohort, spec);

        const std::size_t expected_train =
            static_cast<std::size_t>(spec.train_fraction * static_cast<double>(n));
        CHECK(split.train_patient_ids.size() == expected_train);
        CHECK(split.train_patient_ids.size() + split.test_patient_ids.size() == n);

        std::set<std::string> seen(split.train_patient_ids.begin(), split.train_patient_ids.end());
        seen.insert(split.test_patient_ids.begin(), split.test_patient_ids.end());
        CHECK(seen.size() == n);  // disjoint and exhaustive
    }
}

TEST_CASE("split is deterministic in the seed and shuffles across seeds") {
    Cohort cohort = cohort_of(50);
    SplitSpec spec;
    spec.observation_length = 4;
    spec.prediction_length = 2;
    spec.seed = 5;
    SplitResult a = dual_split(cohort, spec);
    SplitResult b = dual_split(cohort, spec);
    CHECK(a.train_patient_ids == b.train_patient_ids);
    CHECK(a.test_patient_ids == b.test_patient_ids);

    spec.seed = 6;
    SplitResult c = dual_split(cohort, spec);
    CHECK(a.train_patient_ids != c.train_patient_ids);
}

TEST_CASE("temporal windows cover the trajectory in a 2:1 ratio by default") {
    FeatureSchema art = make_schema("art_hiv");
    SplitSpec art_spec = default_split_spec(art, 1);
    CHECK(art_spec.observation_length == 40);
    CHECK(art_spec.prediction_length == 20);
    art_spec.validate(art);

    FeatureSchema hypo = make_schema("hypotension");
    SplitSpec hypo_spec = default_split_spec(hypo, 1);
    CHECK(hypo_spec.observation_length == 32);
    CHECK(hypo_spec.prediction_length == 16);
    hypo_spec.validate(hypo);

    Cohort cohort = cohort_of(10, 60);
    SplitResult split = dual_split(cohort, art_spec);
    CHECK(split.observation_begin() == 0);
    CHECK(split.observation_end() == 40);
    CHECK(split.prediction_begin() == 40);
    CHECK(split.prediction_end() == 60);
}

TEST_CASE("spec validation rejects inconsistent windows and fractions") {
    FeatureSchema schema = make_schema("art_hiv");
    SplitSpec spec = default_split_spec(schema, 1);

    spec.train_fraction = 0.0;
    CHECK_THROWS_AS(spec.validate(schema), ConfigError);
    spec.train_fraction = 1.0;
    CHECK_THROWS_AS(spec.validate(schema), ConfigError);

    spec = default_split_spec(schema, 1);
    spec.observation_length = 30;  // 30 + 20 != 60
    CHECK_THROWS_WITH_AS(spec.validate(schema), doctest::Contains("sequence_length"), ConfigError);

    spec = default_split_spec(schema, 1);
    spec.prediction_length = 0;
    CHECK_THROWS_AS(spec.validate(schema), ConfigError);
}
