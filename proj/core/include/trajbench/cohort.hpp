#pragma once

#include <string>
#include <vector>

#include "trajbench/schema.hpp"

namespace trajbench {

// Fixed-length, complete per-patient feature matrix. Values are stored
// step-major: numeric_values[step * numeric_count + feature].
struct PatientTrajectory {
    std::string patient_id;
    std::vector<double> numeric_values;
    std::vector<int> categorical_values;  // level indices

    double numeric_at(std::size_t step, std::size_t feature, std::size_t numeric_count) const {
        return numeric_values[step * numeric_count + feature];
    }
    int categorical_at(std::size_t step, std::size_t feature, std::size_t categorical_count) const {
        return categorical_values[step * categorical_count + feature];
    }
};

struct Cohort {
    FeatureSchema schema;
    std::vector<PatientTrajectory> patients;

    std::size_t size() const { return patients.size(); }

    double numeric_at(std::size_t patient, std::size_t step, std::size_t feature) const {
        return patients[patient].numeric_at(step, feature, schema.numeric_count());
    }
    int categorical_at(std::size_t patient, std::size_t step, std::size_t feature) const {
        return patients[patient].categorical_at(step, feature, schema.categorical_count());
    }

    // Checks completeness, level-index validity and patient id uniqueness.
    void validate() const;
};

// The sub-cohort holding exactly the listed patients, in the listed order.
// Unknown ids are a contract error.
Cohort subset_cohort(const Cohort& cohort, const std::vector<std::string>& patient_ids);

}  // namespace trajbench
