#include "trajbench/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "trajbench/errors.hpp"

namespace trajbench {

namespace {

void check_pair_length(std::size_t nx, std::size_t ny, const char* op) {
    if (nx != ny) throw ContractError(std::string(op) + ": columns must have the same length");
    if (nx < 2) throw ContractError(std::string(op) + ": columns must have at least two rows");
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double mean_of(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    return m / static_cast<double>(x.size());
}

template <typename Fn>
AssociationValue guarded(MeasureKind measure, Fn&& fn) {
    AssociationValue out;
    out.measure = measure;
    try {
        out.value = fn();
        out.defined = true;
    } catch (const DegenerateFeatureError& e) {
        out.value = std::numeric_limits<double>::quiet_NaN();
        out.defined = false;
        out.undefined_reason = e.what();
    }
    return out;
}

}  // namespace

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair_length(x.size(), y.size(), "pearson_r");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = x[k] - mx;
        const double dy = y[k] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateFeatureError("numeric column has zero variance");
    return clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double correlation_ratio_eta(const std::vector<double>& values, const std::vector<int>& groups) {
    check_pair_length(values.size(), groups.size(), "correlation_ratio_eta");
    std::map<int, std::pair<double, double>> acc;  // level -> (count, sum)
    for (std::size_t k = 0; k < values.size(); ++k) {
        auto& slot = acc[groups[k]];
        slot.first += 1.0;
        slot.second += values[k];
    }
    if (acc.size() < 2) throw DegenerateFeatureError("categorical column has a single observed level");
    const double m = mean_of(values);
    double ss_total = 0.0;
    for (double v : values) ss_total += (v - m) * (v - m);
    if (ss_total == 0.0) throw DegenerateFeatureError("numeric column has zero variance");
    double ss_between = 0.0;
    for (const auto& [level, slot] : acc) {
        const double group_mean = slot.second / slot.first;
        ss_between += slot.first * (group_mean - m) * (group_mean - m);
    }
    return std::sqrt(clamp(ss_between / ss_total, 0.0, 1.0));
}

double cramers_v(const std::vector<int>& a, const std::vector<int>& b) {
    check_pair_length(a.size(), b.size(), "cramers_v");
    // Contingency table over observed levels only.
    std::map<int, std::size_t> rows, cols;
    for (int v : a) rows.emplace(v, 0);
    for (int v : b) cols.emplace(v, 0);
    if (rows.size() < 2 || cols.size() < 2) {
        throw DegenerateFeatureError("categorical column has a single observed level");
    }
    std::size_t next = 0;
    for (auto& [level, idx] : rows) idx = next++;
    next = 0;
    for (auto& [level, idx] : cols) idx = next++;

    const std::size_t nr = rows.size(), nc = cols.size();
    std::vector<double> table(nr * nc, 0.0), row_tot(nr, 0.0), col_tot(nc, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        const std::size_t i = rows.at(a[k]);
        const std::size_t j = cols.at(b[k]);
        table[i * nc + j] += 1.0;
        row_tot[i] += 1.0;
        col_tot[j] += 1.0;
    }
    const double n = static_cast<double>(a.size());
    double chi2 = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            const double expected = row_tot[i] * col_tot[j] / n;
            const double diff = table[i * nc + j] - expected;
            chi2 += diff * diff / expected;
        }
    }
    const double denom = n * static_cast<double>(std::min(nr, nc) - 1);
    return clamp(std::sqrt(chi2 / denom), 0.0, 1.0);
}

const char* measure_name(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::Pearson: return "pearson";
        case MeasureKind::Eta: return "eta";
        case MeasureKind::CramersV: return "cramers_v";
    }
    throw ContractError("measure_name: unknown measure kind");
}

AssociationValue association(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair_length(x.size(), y.size(), "association");
    return guarded(MeasureKind::Pearson, [&] { return pearson_r(x, y); });
}

AssociationValue association(const std::vector<double>& x, const std::vector<int>& y) {
    check_pair_length(x.size(), y.size(), "association");
    return guarded(MeasureKind::Eta, [&] { return correlation_ratio_eta(x, y); });
}

AssociationValue association(const std::vector<int>& x, const std::vector<int>& y) {
    check_pair_length(x.size(), y.size(), "association");
    return guarded(MeasureKind::CramersV, [&] { return cramers_v(x, y); });
}

std::size_t WindowColumns::pooled_size() const {
    if (!numeric.empty()) return numeric.front().size();
    if (!categorical.empty()) return categorical.front().size();
    return 0;
}

WindowColumns pool_window(const Cohort& cohort, std::size_t window_begin, std::size_t window_end) {
    if (window_begin >= window_end || window_end > cohort.schema.sequence_length) {
        throw ContractError("pool_window: invalid step window");
    }
    if (cohort.patients.empty()) throw ContractError("pool_window: cohort is empty");
    const std::size_t nn = cohort.schema.numeric_count();
    const std::size_t nc = cohort.schema.categorical_count();
    WindowColumns out;
    out.numeric.resize(nn);
    out.categorical.resize(nc);
    const std::size_t pooled = cohort.patients.size() * (window_end - window_begin);
    for (auto& col : out.numeric) col.reserve(pooled);
    for (auto& col : out.categorical) col.reserve(pooled);
    for (const auto& patient : cohort.patients) {
        for (std::size_t t = window_begin; t < window_end; ++t) {
            for (std::size_t f = 0; f < nn; ++f) out.numeric[f].push_back(patient.numeric_at(t, f, nn));
            for (std::size_t f = 0; f < nc; ++f) out.categorical[f].push_back(patient.categorical_at(t, f, nc));
        }
    }
    return out;
}

const AssociationValue& AssociationMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) throw ContractError("association matrix index out of range");
    return entries[i * size() + j];
}

AssociationValue& AssociationMatrix::at(std::size_t i, std::size_t j) {
    if (i >= size() || j >= size()) throw ContractError("association matrix index out of range");
    return entries[i * size() + j];
}

AssociationMatrix association_matrix(const WindowColumns& columns, const FeatureSchema& schema) {
    const std::size_t nn = schema.numeric_count();
    const std::size_t nc = schema.categorical_count();
    if (columns.numeric.size() != nn || columns.categorical.size() != nc) {
        throw ContractError("association_matrix: columns do not match the schema");
    }
    if (columns.pooled_size() == 0) throw ContractError("association_matrix: empty window");

    AssociationMatrix matrix;
    for (const auto& f : schema.numeric_features) matrix.feature_names.push_back(f.name);
    for (const auto& f : schema.categorical_features) matrix.feature_names.push_back(f.name);
    const std::size_t total = matrix.feature_names.size();
    matrix.entries.resize(total * total);

    auto pair_value = [&](std::size_t i, std::size_t j) -> AssociationValue {
        const bool i_numeric = i < nn;
        const bool j_numeric = j < nn;
        if (i_numeric && j_numeric) return association(columns.numeric[i], columns.numeric[j]);
        if (i_numeric && !j_numeric) return association(columns.numeric[i], columns.categorical[j - nn]);
        if (!i_numeric && j_numeric) return association(columns.numeric[j], columns.categorical[i - nn]);
        return association(columns.categorical[i - nn], columns.categorical[j - nn]);
    };

    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = i; j < total; ++j) {
            AssociationValue v = pair_value(i, j);
            if (i == j && v.defined) v.value = 1.0;
            matrix.at(i, j) = v;
            matrix.at(j, i) = v;
        }
    }
    return matrix;
}

}  // namespace trajbench
