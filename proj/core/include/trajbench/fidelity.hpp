#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajbench/association.hpp"
#include "trajbench/schema.hpp"

namespace trajbench {

struct MarginalMetric {
    std::string feature;
    std::string kind;  // "ks" for numeric features, "tv" for categorical
    double value = 0.0;
    std::size_t n_real = 0;
    std::size_t n_synthetic = 0;
};

struct FidelityMeta {
    std::string dataset_id;
    std::string model_id;
    std::size_t g_max = 1;
    std::uint64_t master_seed = 0;
};

struct FidelityReport {
    FidelityMeta meta;
    std::vector<MarginalMetric> marginals;  // numerics first, then categoricals
    AssociationMatrix real_associations;
    AssociationMatrix synthetic_associations;
    // Mean absolute difference over off-diagonal tiles defined in both
    // matrices; absent when no such tile exists.
    std::optional<double> correlation_gap;
    std::size_t compared_tiles = 0;
};

std::optional<double> correlation_gap(const AssociationMatrix& a, const AssociationMatrix& b,
                                      std::size_t* compared_tiles = nullptr);

FidelityReport fidelity_report(const WindowColumns& real, const WindowColumns& synthetic,
                               const FeatureSchema& schema, const FidelityMeta& meta);

}  // namespace trajbench
