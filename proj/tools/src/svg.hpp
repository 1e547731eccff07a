#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "report_io.hpp"
#include "trajbench/association.hpp"

namespace trajbench::tools {

// Overlaid real-vs-synthetic marginal chart: a density histogram for numeric
// features, paired frequency bars for categorical ones. Self-contained SVG
// with no external assets; identical inputs produce identical bytes.
std::string marginal_svg(const MarginalMetric& metric, const MarginalDistribution& dist);

// Association heatmap. Defined tiles are colored on a blue-white-red scale
// with a two-decimal label; UNDEFINED tiles get a hatch pattern and no label.
std::string heatmap_svg(const std::string& title, const AssociationMatrix& matrix);

// File-system-safe stem derived from a feature name.
std::string sanitize_file_stem(const std::string& name);

// Writes one marginal chart per feature plus both heatmaps into `dir`;
// returns the file names in emission order.
std::vector<std::string> emit_plots(const RunReport& report, const std::filesystem::path& dir);

}  // namespace trajbench::tools
