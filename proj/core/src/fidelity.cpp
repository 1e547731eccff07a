#include "trajbench/fidelity.hpp"

#include <cmath>

#include "trajbench/errors.hpp"
#include "trajbench/stats.hpp"

namespace trajbench {

std::optional<double> correlation_gap(const AssociationMatrix& a, const AssociationMatrix& b,
                                      std::size_t* compared_tiles) {
    if (a.size() != b.size()) throw ContractError("correlation_gap: matrices differ in size");
    double total = 0.0;
    std::size_t tiles = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (i == j) continue;
            const auto& va = a.at(i, j);
            const auto& vb = b.at(i, j);
            if (!va.defined || !vb.defined) continue;
            total += std::abs(va.value - vb.value);
            ++tiles;
        }
    }
    if (compared_tiles) *compared_tiles = tiles;
    if (tiles == 0) return std::nullopt;
    return total / static_cast<double>(tiles);
}

FidelityReport fidelity_report(const WindowColumns& real, const WindowColumns& synthetic,
                               const FeatureSchema& schema, const FidelityMeta& meta) {
    if (real.pooled_size() == 0 || synthetic.pooled_size() == 0) {
        throw ContractError("fidelity_report: both sides must be nonempty");
    }
    if (real.numeric.size() != schema.numeric_count() ||
        real.categorical.size() != schema.categorical_count() ||
        synthetic.numeric.size() != schema.numeric_count() ||
        synthetic.categorical.size() != schema.categorical_count()) {
        throw ContractError("fidelity_report: columns do not match the schema");
    }

    FidelityReport report;
    report.meta = meta;
    for (std::size_t f = 0; f < schema.numeric_count(); ++f) {
        MarginalMetric metric;
        metric.feature = schema.numeric_features[f].name;
        metric.kind = "ks";
        metric.n_real = real.numeric[f].size();
        metric.n_synthetic = synthetic.numeric[f].size();
        metric.value = ks_statistic(real.numeric[f], synthetic.numeric[f]);
        report.marginals.push_back(std::move(metric));
    }
    for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
        const auto& levels = schema.categorical_features[f].levels;
        MarginalMetric metric;
        metric.feature = schema.categorical_features[f].name;
        metric.kind = "tv";
        metric.n_real = real.categorical[f].size();
        metric.n_synthetic = synthetic.categorical[f].size();
        metric.value = tv_distance(level_counts(real.categorical[f], levels.size()),
                                   level_counts(synthetic.categorical[f], levels.size()));
        report.marginals.push_back(std::move(metric));
    }
    report.real_associations = association_matrix(real, schema);
    report.synthetic_associations = association_matrix(synthetic, schema);
    report.correlation_gap =
        correlation_gap(report.real_associations, report.synthetic_associations, &report.compared_tiles);
    return report;
}

}  // namespace trajbench
