#include "trajbench/stats.hpp"

#include <algorithm>
#include <cmath>

#include "trajbench/errors.hpp"

namespace trajbench {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ContractError("ks_statistic: samples must be nonempty");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double v;
        if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
            v = a[i];
        } else {
            v = b[j];
        }
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double tv_distance(const std::vector<double>& p_counts, const std::vector<double>& q_counts) {
    if (p_counts.size() != q_counts.size()) {
        throw ContractError("tv_distance: count vectors must cover the same level set");
    }
    double p_total = 0.0, q_total = 0.0;
    for (double c : p_counts) {
        if (c < 0.0) throw ContractError("tv_distance: negative count");
        p_total += c;
    }
    for (double c : q_counts) {
        if (c < 0.0) throw ContractError("tv_distance: negative count");
        q_total += c;
    }
    if (p_total <= 0.0 || q_total <= 0.0) throw ContractError("tv_distance: total count must be positive");
    double tv = 0.0;
    for (std::size_t k = 0; k < p_counts.size(); ++k) {
        tv += std::abs(p_counts[k] / p_total - q_counts[k] / q_total);
    }
    return 0.5 * tv;
}

std::vector<double> level_counts(const std::vector<int>& column, std::size_t level_count) {
    std::vector<double> counts(level_count, 0.0);
    for (int level : column) {
        if (level < 0 || static_cast<std::size_t>(level) >= level_count) {
            throw ContractError("level_counts: level index out of range");
        }
        counts[static_cast<std::size_t>(level)] += 1.0;
    }
    return counts;
}

}  // namespace trajbench
