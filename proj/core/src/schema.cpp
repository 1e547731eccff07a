#include "trajbench/schema.hpp"

#include <unordered_set>

#include "trajbench/errors.hpp"

namespace trajbench {

std::size_t FeatureSchema::total_levels() const {
    std::size_t n = 0;
    for (const auto& f : categorical_features) n += f.levels.size();
    return n;
}

int FeatureSchema::level_index(std::size_t cat_feature, const std::string& label) const {
    const auto& levels = categorical_features.at(cat_feature).levels;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == label) return static_cast<int>(i);
    }
    throw IngestError("unknown level \"" + label + "\" for feature \"" +
                      categorical_features.at(cat_feature).name + "\"");
}

void FeatureSchema::validate() const {
    if (sequence_length == 0) throw ConfigError("schema: sequence_length must be positive");
    std::unordered_set<std::string> names;
    for (const auto& f : numeric_features) {
        if (!names.insert(f.name).second) throw ConfigError("schema: duplicate feature name \"" + f.name + "\"");
    }
    for (const auto& f : categorical_features) {
        if (!names.insert(f.name).second) throw ConfigError("schema: duplicate feature name \"" + f.name + "\"");
        if (f.levels.empty()) throw ConfigError("schema: feature \"" + f.name + "\" has no levels");
        std::unordered_set<std::string> labels;
        for (const auto& level : f.levels) {
            if (!labels.insert(level).second) {
                throw ConfigError("schema: duplicate level \"" + level + "\" in feature \"" + f.name + "\"");
            }
        }
    }
    if (feature_count() == 0) throw ConfigError("schema: no features");
}

FeatureSchema make_schema(const std::string& dataset_id) {
    FeatureSchema s;
    s.dataset_id = dataset_id;
    if (dataset_id == "art_hiv") {
        s.numeric_features = {
            {"Viral Load", "copies/mL", true},
            {"CD4 Count", "cells/uL", false},
        };
        s.categorical_features = {
            {"Base Combo",
             {"FTC + TDF", "3TC + ABC", "FTC + TAF", "DRV + FTC + TDF", "FTC + RTVB + TDF", "Other"}},
            {"Comp. INI", {"DTG", "RAL", "EVG", "Not applied"}},
            {"Extra PI", {"DRV", "RTVB", "LPV", "RTV", "ATV", "Not applied"}},
        };
        s.sequence_length = 60;
        s.time_unit = TimeUnit::Month;
    } else if (dataset_id == "hypotension") {
        s.numeric_features = {
            {"MAP", "mmHg", false},
            {"Urine", "mL", true},
            {"Lactate", "mmol/L", false},
        };
        s.categorical_features = {
            {"Vasopressors", {"0", "(0, 8.4)", "[8.4, 20.28)", ">=20.28"}},
            {"Fluid Boluses", {"[0, 250)", "[250, 500)", "[500, 1000)", ">=1000"}},
        };
        s.sequence_length = 48;
        s.time_unit = TimeUnit::Hour;
    } else {
        throw ConfigError("unknown dataset id \"" + dataset_id + "\" (expected art_hiv or hypotension)");
    }
    s.validate();
    return s;
}

const char* to_string(TimeUnit unit) { return unit == TimeUnit::Month ? "month" : "hour"; }

}  // namespace trajbench
