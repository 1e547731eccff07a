#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trajbench/cohort.hpp"
#include "trajbench/schema.hpp"

namespace trajbench {

// Raw mixed-type association measures. All throw ContractError on length
// mismatch or fewer than two rows, and DegenerateFeatureError when a numeric
// column has zero variance or a categorical column has a single observed
// level (the conditions the matrix layer maps to UNDEFINED tiles).
double pearson_r(const std::vector<double>& x, const std::vector<double>& y);
double correlation_ratio_eta(const std::vector<double>& values, const std::vector<int>& groups);
double cramers_v(const std::vector<int>& a, const std::vector<int>& b);

enum class MeasureKind { Pearson, Eta, CramersV };

const char* measure_name(MeasureKind kind);

struct AssociationValue {
    double value = 0.0;  // NaN when !defined, so accidental reads poison downstream sums
    MeasureKind measure = MeasureKind::Pearson;
    bool defined = false;
    std::string undefined_reason;  // empty when defined
};

AssociationValue association(const std::vector<double>& x, const std::vector<double>& y);
AssociationValue association(const std::vector<double>& x, const std::vector<int>& y);
AssociationValue association(const std::vector<int>& x, const std::vector<int>& y);

// Feature columns pooled over all patients and all steps of a step window,
// ordered as in the schema (numerics first, then categoricals).
struct WindowColumns {
    std::vector<std::vector<double>> numeric;
    std::vector<std::vector<int>> categorical;

    std::size_t pooled_size() const;
};

// Pools steps [window_begin, window_end) across every patient of the cohort.
WindowColumns pool_window(const Cohort& cohort, std::size_t window_begin, std::size_t window_end);

struct AssociationMatrix {
    std::vector<std::string> feature_names;  // numerics then categoricals
    std::vector<AssociationValue> entries;   // row-major size x size

    std::size_t size() const { return feature_names.size(); }
    const AssociationValue& at(std::size_t i, std::size_t j) const;
    AssociationValue& at(std::size_t i, std::size_t j);
};

AssociationMatrix association_matrix(const WindowColumns& columns, const FeatureSchema& schema);

}  // namespace trajbench
