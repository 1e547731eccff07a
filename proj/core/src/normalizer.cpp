#include "trajbench/normalizer.hpp"

#include <cmath>
#include <unordered_map>

#include "trajbench/errors.hpp"

namespace trajbench {

namespace {

double to_model_scale(double value, bool log_scale, const std::string& feature_name) {
    if (!log_scale) return value;
    if (value <= 0.0) {
        throw NumericError("normalizer: log-scale feature \"" + feature_name +
                           "\" requires positive values, got " + std::to_string(value));
    }
    return std::log(value);
}

}  // namespace

Normalizer fit_normalizer(const Cohort& cohort, const std::vector<std::string>& patient_ids,
                          std::size_t window_begin, std::size_t window_end) {
    if (window_begin >= window_end || window_end > cohort.schema.sequence_length) {
        throw ContractError("fit_normalizer: window out of sequence bounds");
    }
    if (patient_ids.empty()) throw ContractError("fit_normalizer: no patients given");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t p = 0; p < cohort.patients.size(); ++p) index.emplace(cohort.patients[p].patient_id, p);

    const std::size_t nn = cohort.schema.numeric_count();
    Normalizer norm;
    norm.mean.assign(nn, 0.0);
    norm.stddev.assign(nn, 0.0);
    norm.log_scale.resize(nn);
    for (std::size_t f = 0; f < nn; ++f) norm.log_scale[f] = cohort.schema.numeric_features[f].log_scale;

    const std::size_t count = patient_ids.size() * (window_end - window_begin);
    for (std::size_t f = 0; f < nn; ++f) {
        const std::string& name = cohort.schema.numeric_features[f].name;
        double sum = 0.0;
        for (const auto& id : patient_ids) {
            auto it = index.find(id);
            if (it == index.end()) throw ContractError("fit_normalizer: unknown patient id \"" + id + "\"");
            for (std::size_t t = window_begin; t < window_end; ++t) {
                sum += to_model_scale(cohort.numeric_at(it->second, t, f), norm.log_scale[f], name);
            }
        }
        const double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (const auto& id : patient_ids) {
            const std::size_t p = index.at(id);
            for (std::size_t t = window_begin; t < window_end; ++t) {
                const double d = to_model_scale(cohort.numeric_at(p, t, f), norm.log_scale[f], name) - mean;
                ss += d * d;
            }
        }
        const double variance = ss / static_cast<double>(count);
        if (variance == 0.0) {
            throw DegenerateFeatureError("fit_normalizer: feature \"" + name + "\" has zero variance");
        }
        norm.mean[f] = mean;
        norm.stddev[f] = std::sqrt(variance);
    }
    return norm;
}

double apply_normalizer(const Normalizer& normalizer, double value, std::size_t feature) {
    if (!normalizer.fitted()) throw ContractError("apply_normalizer: normalizer is not fitted");
    if (feature >= normalizer.mean.size()) throw ContractError("apply_normalizer: feature index out of range");
    if (normalizer.log_scale[feature] && value <= 0.0) {
        throw NumericError("apply_normalizer: log-scale feature requires positive values");
    }
    const double x = normalizer.log_scale[feature] ? std::log(value) : value;
    return (x - normalizer.mean[feature]) / normalizer.stddev[feature];
}

double invert_normalizer(const Normalizer& normalizer, double z, std::size_t feature) {
    if (!normalizer.fitted()) throw ContractError("invert_normalizer: normalizer is not fitted");
    if (feature >= normalizer.mean.size()) throw ContractError("invert_normalizer: feature index out of range");
    const double x = z * normalizer.stddev[feature] + normalizer.mean[feature];
    return normalizer.log_scale[feature] ? std::exp(x) : x;
}

}  // namespace trajbench
