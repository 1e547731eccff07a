#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajbench/fidelity.hpp"

namespace trajbench::tools {

using OrderedJson = nlohmann::ordered_json;

// Training-run facts that belong in the deterministic report. Wall-clock
// timings are excluded on purpose; they go to the timing sidecar.
struct TrainingSummary {
    std::vector<double> epoch_loss;
    std::size_t adam_steps = 0;
    std::size_t skipped_sequences = 0;
    std::uint64_t params_checksum = 0;
    std::size_t test_patient_reads = 0;
    std::size_t prediction_window_reads = 0;
};

// Per-feature marginal shape, kept alongside the metric so plots can be
// re-emitted from the report alone. Numeric features carry shared-range bin
// counts; categorical features carry per-level counts.
struct MarginalDistribution {
    std::string feature;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::string> levels;  // empty for numeric features
    std::vector<double> real_counts;
    std::vector<double> synthetic_counts;
};

struct RunReport {
    FidelityReport fidelity;
    TrainingSummary training;
    std::vector<MarginalDistribution> distributions;  // parallel to fidelity.marginals
};

MarginalDistribution numeric_distribution(const std::string& feature, const std::vector<double>& real,
                                          const std::vector<double>& synthetic, std::size_t bins = 24);
MarginalDistribution categorical_distribution(const std::string& feature,
                                              const std::vector<std::string>& levels,
                                              const std::vector<int>& real,
                                              const std::vector<int>& synthetic);

// JSON layout is insertion-ordered and free of timestamps so that identical
// runs serialize to identical bytes. UNDEFINED association tiles are encoded
// as null values with a parallel reason grid.
OrderedJson association_matrix_to_json(const AssociationMatrix& matrix);
AssociationMatrix association_matrix_from_json(const OrderedJson& j);

OrderedJson run_report_to_json(const RunReport& report);
RunReport run_report_from_json(const OrderedJson& j);

// Matrix CSV: header row of feature names, one row per feature, empty cells
// for UNDEFINED tiles.
std::string association_matrix_to_csv(const AssociationMatrix& matrix);

std::string hex64(std::uint64_t value);

// Write-temp-then-rename so readers never observe a partial artifact.
void atomic_write_file(const std::filesystem::path& path, const std::string& bytes);
std::string read_file(const std::filesystem::path& path);
std::uint64_t file_fnv1a64(const std::filesystem::path& path);

}  // namespace trajbench::tools
