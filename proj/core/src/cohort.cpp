#include "trajbench/cohort.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "trajbench/errors.hpp"

namespace trajbench {

void Cohort::validate() const {
    schema.validate();
    const std::size_t t = schema.sequence_length;
    const std::size_t nn = schema.numeric_count();
    const std::size_t nc = schema.categorical_count();
    std::unordered_set<std::string> ids;
    for (const auto& p : patients) {
        if (!ids.insert(p.patient_id).second) {
            throw ContractError("cohort: duplicate patient id \"" + p.patient_id + "\"");
        }
        if (p.numeric_values.size() != t * nn) {
            throw ContractError("cohort: patient \"" + p.patient_id + "\" has incomplete numeric values");
        }
        if (p.categorical_values.size() != t * nc) {
            throw ContractError("cohort: patient \"" + p.patient_id + "\" has incomplete categorical values");
        }
        for (double v : p.numeric_values) {
            if (!std::isfinite(v)) {
                throw ContractError("cohort: non-finite value for patient \"" + p.patient_id + "\"");
            }
        }
        for (std::size_t step = 0; step < t; ++step) {
            for (std::size_t f = 0; f < nc; ++f) {
                const int idx = p.categorical_at(step, f, nc);
                const int levels = static_cast<int>(schema.categorical_features[f].levels.size());
                if (idx < 0 || idx >= levels) {
                    throw ContractError("cohort: invalid level index for feature \"" +
                                        schema.categorical_features[f].name + "\" patient \"" + p.patient_id +
                                        "\"");
                }
            }
        }
    }
}

Cohort subset_cohort(const Cohort& cohort, const std::vector<std::string>& patient_ids) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t p = 0; p < cohort.patients.size(); ++p) index.emplace(cohort.patients[p].patient_id, p);
    Cohort out;
    out.schema = cohort.schema;
    out.patients.reserve(patient_ids.size());
    for (const auto& id : patient_ids) {
        auto it = index.find(id);
        if (it == index.end()) throw ContractError("subset_cohort: unknown patient id \"" + id + "\"");
        out.patients.push_back(cohort.patients[it->second]);
    }
    return out;
}

}  // namespace trajbench
