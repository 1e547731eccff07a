#include "trajbench/split.hpp"

#include <cmath>
#include <numeric>

#include "trajbench/errors.hpp"
#include "trajbench/rng.hpp"

namespace trajbench {

void SplitSpec::validate(const FeatureSchema& schema) const {
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw ConfigError("split: train_fraction must lie in (0, 1)");
    }
    if (observation_length == 0 || prediction_length == 0) {
        throw ConfigError("split: observation and prediction lengths must be positive");
    }
    if (observation_length + prediction_length != schema.sequence_length) {
        throw ConfigError("split: observation_length + prediction_length must equal sequence_length (" +
                          std::to_string(observation_length) + " + " + std::to_string(prediction_length) +
                          " != " + std::to_string(schema.sequence_length) + ")");
    }
}

SplitResult dual_split(const Cohort& cohort, const SplitSpec& spec) {
    spec.validate(cohort.schema);
    if (cohort.patients.empty()) throw ContractError("dual_split: cohort is empty");

    std::vector<std::size_t> order(cohort.patients.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(spec.seed, "patient-split"));
    // Fisher-Yates with our own stream so the permutation is stable across
    // standard library implementations.
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }

    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(order.size())));
    SplitResult result;
    result.observation_length = spec.observation_length;
    result.prediction_length = spec.prediction_length;
    result.train_patient_ids.reserve(n_train);
    result.test_patient_ids.reserve(order.size() - n_train);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& id = cohort.patients[order[k]].patient_id;
        if (k < n_train) {
            result.train_patient_ids.push_back(id);
        } else {
            result.test_patient_ids.push_back(id);
        }
    }
    return result;
}

SplitSpec default_split_spec(const FeatureSchema& schema, std::uint64_t seed) {
    SplitSpec spec;
    spec.train_fraction = 0.8;
    spec.prediction_length = schema.sequence_length / 3;
    spec.observation_length = schema.sequence_length - spec.prediction_length;
    spec.seed = seed;
    return spec;
}

}  // namespace trajbench
