#include <doctest.h>

#include <cmath>

#include "trajbench/errors.hpp"
#include "trajbench/generator.hpp"
#include "trajbench/normalizer.hpp"

using namespace trajbench;

namespace {

// A cohort with hand-set values: one linear and one log-scale feature.
Cohort hand_cohort() {
    FeatureSchema s;
    s.dataset_id = "hand";
    s.numeric_features = {{"linear", "u", false}, {"logged", "u", true}};
    s.categorical_features = {{"c", {"x", "y"}}};
    s.sequence_length = 2;
    Cohort cohort;
    cohort.schema = s;
    PatientTrajectory a;
    a.patient_id = "A";
    a.numeric_values = {0.0, std::exp(1.0), 2.0, std::exp(3.0)};  // steps x features
    a.categorical_values = {0, 1};
    cohort.patients.push_back(a);
    return cohort;
}

}  // namespace

TEST_CASE("fit uses population statistics over the requested window") {
    Cohort cohort = hand_cohort();
    Normalizer norm = fit_normalizer(cohort, {"A"}, 0, 2);
    REQUIRE(norm.fitted());
    REQUIRE(norm.mean.size() == 2);

    // Linear feature: values {0, 2} -> mean 1, population stddev 1.
    CHECK(norm.mean[0] == doctest::Approx(1.0));
    CHECK(norm.stddev[0] == doctest::Approx(1.0));
    CHECK(apply_normalizer(norm, 0.0, 0) == doctest::Approx(-1.0));
    CHECK(apply_normalizer(norm, 2.0, 0) == doctest::Approx(1.0));

    // Log feature: log-values {1, 3} -> mean 2, stddev 1 on the log scale.
    CHECK(norm.mean[1] == doctest::Approx(2.0));
    CHECK(norm.stddev[1] == doctest::Approx(1.0));
    CHECK(norm.log_scale[1]);
    CHECK(apply_normalizer(norm, std::exp(1.0), 1) == doctest::Approx(-1.0));
    CHECK(apply_normalizer(norm, std::exp(3.0), 1) == doctest::Approx(1.0));
}

TEST_CASE("invert undoes apply on both scales") {
    GeneratorSpec spec = default_generator_spec("art_hiv", 8);
    spec.schema.sequence_length = 6;
    Cohort cohort = generate_synthetic_cohort(spec, 21);
    std::vector<std::string> ids;
    for (const auto& p : cohort.patients) ids.push_back(p.patient_id);

    Normalizer norm = fit_normalizer(cohort, ids, 0, 4);
    for (std::size_t f = 0; f < 2; ++f) {
        for (std::size_t p = 0; p < cohort.size(); ++p) {
            const double raw = cohort.numeric_at(p, 5, f);
            const double z = apply_normalizer(norm, raw, f);
            CHECK(invert_normalizer(norm, z, f) == doctest::Approx(raw).epsilon(1e-9));
        }
    }
}

TEST_CASE("fitting restricted to listed patients and window") {
    Cohort cohort = hand_cohort();
    PatientTrajectory b;
    b.patient_id = "B";
    b.numeric_values = {100.0, std::exp(9.0), 200.0, std::exp(9.0)};
    b.categorical_values = {0, 0};
    cohort.patients.push_back(b);

    // Only patient A, only step 0: the outlier patient B must not leak in.
    Normalizer norm = fit_normalizer(cohort, {"A"}, 0, 2);
    CHECK(norm.mean[0] == doctest::Approx(1.0));

    CHECK_THROWS_AS(fit_normalizer(cohort, {"C"}, 0, 2), ContractError);
}

TEST_CASE("degenerate and invalid inputs are rejected") {
    Cohort cohort = hand_cohort();

    // Single step -> zero variance on every feature.
    CHECK_THROWS_WITH_AS(fit_normalizer(cohort, {"A"}, 0, 1),
                         doctest::Contains("linear"), DegenerateFeatureError);

    // Non-positive value under a log-scale feature.
    Cohort bad = hand_cohort();
    bad.patients[0].numeric_values[1] = -2.0;
    CHECK_THROWS_AS(fit_normalizer(bad, {"A"}, 0, 2), NumericError);

    Normalizer fitted = fit_normalizer(cohort, {"A"}, 0, 2);
    CHECK_THROWS_AS(apply_normalizer(fitted, -1.0, 1), NumericError);
    CHECK_THROWS_AS(apply_normalizer(fitted, 1.0, 5), ContractError);

    Normalizer unfitted;
    CHECK_THROWS_AS(apply_normalizer(unfitted, 1.0, 0), ContractError);

    CHECK_THROWS_AS(fit_normalizer(cohort, {"A"}, 2, 2), ContractError);
    CHECK_THROWS_AS(fit_normalizer(cohort, {}, 0, 2), ContractError);
}
