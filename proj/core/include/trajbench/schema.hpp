#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace trajbench {

enum class TimeUnit { Month, Hour };

struct NumericFeature {
    std::string name;
    std::string unit;
    bool log_scale = false;
};

struct CategoricalFeature {
    std::string name;
    std::vector<std::string> levels;  // ordered, unique
};

// Ordered description of a dataset's features and trajectory geometry.
struct FeatureSchema {
    std::string dataset_id;
    std::vector<NumericFeature> numeric_features;
    std::vector<CategoricalFeature> categorical_features;
    std::size_t sequence_length = 0;
    TimeUnit time_unit = TimeUnit::Month;

    std::size_t numeric_count() const { return numeric_features.size(); }
    std::size_t categorical_count() const { return categorical_features.size(); }
    std::size_t feature_count() const { return numeric_count() + categorical_count(); }
    std::size_t total_levels() const;

    // Index of a categorical level by label; throws IngestError if unknown.
    int level_index(std::size_t cat_feature, const std::string& label) const;

    void validate() const;
};

// Built-in dataset schemas: "art_hiv" (60 monthly steps) and "hypotension"
// (48 hourly steps). Throws ConfigError for unknown ids.
FeatureSchema make_schema(const std::string& dataset_id);

const char* to_string(TimeUnit unit);

}  // namespace trajbench
