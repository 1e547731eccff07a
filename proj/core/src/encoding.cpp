#include "trajbench/encoding.hpp"

#include <algorithm>

#include "trajbench/errors.hpp"

namespace trajbench {

std::size_t encoded_dim(const FeatureSchema& schema) {
    return schema.numeric_count() + schema.total_levels() + 1;
}

std::vector<double> encode_step(const std::vector<double>& numeric_raw, const std::vector<int>& levels,
                                std::size_t delta_t, const FeatureSchema& schema,
                                const Normalizer& normalizer, std::size_t g_max) {
    if (!normalizer.fitted()) throw ContractError("encode_step: normalizer is not fitted");
    if (numeric_raw.size() != schema.numeric_count() || levels.size() != schema.categorical_count()) {
        throw ContractError("encode_step: feature values do not match the schema");
    }
    if (g_max < 1) throw ContractError("encode_step: g_max must be >= 1");
    if (delta_t > g_max) throw ContractError("encode_step: delta_t exceeds g_max");

    std::vector<double> row(encoded_dim(schema), 0.0);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < schema.numeric_count(); ++f) {
        row[pos++] = apply_normalizer(normalizer, numeric_raw[f], f);
    }
    for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
        const std::size_t n_levels = schema.categorical_features[f].levels.size();
        const int level = levels[f];
        if (level < 0 || static_cast<std::size_t>(level) >= n_levels) {
            throw ContractError("encode_step: level index out of range for \"" +
                                schema.categorical_features[f].name + "\"");
        }
        row[pos + static_cast<std::size_t>(level)] = 1.0;
        pos += n_levels;
    }
    row[pos] = static_cast<double>(delta_t) / static_cast<double>(g_max);
    return row;
}

Tensor encode_visits(const PatientTrajectory& trajectory, const VisitIndexSet& visits,
                     const FeatureSchema& schema, const Normalizer& normalizer,
                     const IrregularitySpec& irregularity) {
    irregularity.validate();
    if (visits.retained.empty()) throw ContractError("encode_visits: no retained visits");
    if (visits.delta_t.size() != visits.retained.size()) {
        throw ContractError("encode_visits: delta_t and retained lengths differ");
    }
    const std::size_t nn = schema.numeric_count();
    const std::size_t nc = schema.categorical_count();
    const std::size_t d = encoded_dim(schema);

    std::vector<double> data;
    data.reserve(visits.size() * d);
    std::vector<double> numeric(nn);
    std::vector<int> levels(nc);
    for (std::size_t k = 0; k < visits.size(); ++k) {
        const std::size_t step = visits.retained[k];
        if (step < 1 || step > schema.sequence_length) {
            throw ContractError("encode_visits: retained step " + std::to_string(step) +
                                " outside [1, " + std::to_string(schema.sequence_length) + "]");
        }
        const std::size_t t = step - 1;
        for (std::size_t f = 0; f < nn; ++f) numeric[f] = trajectory.numeric_at(t, f, nn);
        for (std::size_t f = 0; f < nc; ++f) levels[f] = trajectory.categorical_at(t, f, nc);
        const auto row = encode_step(numeric, levels, visits.delta_t[k], schema, normalizer,
                                     irregularity.g_max);
        data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor::from_values({visits.size(), d}, std::move(data));
}

DecodedStep decode_step(const std::vector<double>& row, const FeatureSchema& schema,
                        const Normalizer& normalizer) {
    if (row.size() != encoded_dim(schema)) throw ContractError("decode_step: row width does not match the schema");
    DecodedStep out;
    std::size_t pos = 0;
    out.numeric.resize(schema.numeric_count());
    for (std::size_t f = 0; f < schema.numeric_count(); ++f) {
        out.numeric[f] = invert_normalizer(normalizer, row[pos++], f);
    }
    out.levels.resize(schema.categorical_count());
    for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
        const std::size_t n_levels = schema.categorical_features[f].levels.size();
        const auto begin = row.begin() + static_cast<std::ptrdiff_t>(pos);
        const auto end = begin + static_cast<std::ptrdiff_t>(n_levels);
        out.levels[f] = static_cast<int>(std::max_element(begin, end) - begin);
        pos += n_levels;
    }
    out.delta_t_scaled = row[pos];
    return out;
}

}  // namespace trajbench
