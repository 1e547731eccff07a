#pragma once

#include <cstddef>
#include <vector>

namespace trajbench {

// Two-sample Kolmogorov-Smirnov statistic: the supremum over pooled distinct
// values of the absolute difference between the two empirical CDFs.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Total variation distance between two empirical level distributions given as
// per-level counts over the same level set: 0.5 * sum_k |p_k - q_k|.
double tv_distance(const std::vector<double>& p_counts, const std::vector<double>& q_counts);

// Tallies a column of level indices into counts over `level_count` levels.
std::vector<double> level_counts(const std::vector<int>& column, std::size_t level_count);

}  // namespace trajbench
