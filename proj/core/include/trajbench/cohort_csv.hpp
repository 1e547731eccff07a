#pragma once

#include <string>

#include "trajbench/cohort.hpp"
#include "trajbench/schema.hpp"

namespace trajbench {

// Trajectory CSV: header `patient_id,step,<numeric names...>,<categorical
// names...>`, one row per patient-step, step 1-based, categorical cells carry
// level labels (RFC 4180-quoted when a label contains a comma), UTF-8, LF
// line endings. Every patient must cover steps 1..sequence_length exactly
// once; errors name the offending line and column.
Cohort load_cohort_csv(const std::string& path, const FeatureSchema& schema);

// Writes the canonical form: patients in cohort order, steps ascending,
// numerics in shortest round-trip decimal notation.
void write_cohort_csv(const Cohort& cohort, const std::string& path);

std::string cohort_csv_header(const FeatureSchema& schema);

}  // namespace trajbench
