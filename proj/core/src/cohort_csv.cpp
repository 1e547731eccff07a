#include "trajbench/cohort_csv.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "trajbench/errors.hpp"
#include "trajbench/text.hpp"

namespace trajbench {

std::string cohort_csv_header(const FeatureSchema& schema) {
    std::string header = "patient_id,step";
    for (const auto& f : schema.numeric_features) header += "," + csv_escape(f.name);
    for (const auto& f : schema.categorical_features) header += "," + csv_escape(f.name);
    return header;
}

Cohort load_cohort_csv(const std::string& path, const FeatureSchema& schema) {
    schema.validate();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open \"" + path + "\"");

    const std::size_t nn = schema.numeric_count();
    const std::size_t nc = schema.categorical_count();
    const std::size_t t_len = schema.sequence_length;
    const std::size_t expected_columns = 2 + nn + nc;

    std::string line;
    if (!std::getline(in, line)) throw IngestError("\"" + path + "\": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != cohort_csv_header(schema)) {
        throw IngestError("\"" + path + "\" line 1: header does not match the schema (expected \"" +
                          cohort_csv_header(schema) + "\")");
    }

    Cohort cohort;
    cohort.schema = schema;
    std::unordered_map<std::string, std::size_t> patient_index;
    std::vector<std::vector<bool>> seen_steps;  // per patient

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto at = [&](const std::string& column) {
            return "\"" + path + "\" line " + std::to_string(line_no) + ", column \"" + column + "\"";
        };
        auto fields = csv_split(line);
        if (fields.size() != expected_columns) {
            throw IngestError("\"" + path + "\" line " + std::to_string(line_no) + ": expected " +
                              std::to_string(expected_columns) + " columns, got " +
                              std::to_string(fields.size()));
        }

        const std::string& patient_id = fields[0];
        if (patient_id.empty()) throw IngestError(at("patient_id") + ": empty patient id");
        auto [it, inserted] = patient_index.emplace(patient_id, cohort.patients.size());
        if (inserted) {
            PatientTrajectory traj;
            traj.patient_id = patient_id;
            traj.numeric_values.assign(t_len * nn, 0.0);
            traj.categorical_values.assign(t_len * nc, 0);
            cohort.patients.push_back(std::move(traj));
            seen_steps.emplace_back(t_len, false);
        }
        const std::size_t p = it->second;

        const auto step_value = parse_integer(fields[1]);
        if (!step_value || *step_value < 1 || static_cast<std::size_t>(*step_value) > t_len) {
            throw IngestError(at("step") + ": step must be an integer in [1, " + std::to_string(t_len) +
                              "], got \"" + fields[1] + "\"");
        }
        const std::size_t t = static_cast<std::size_t>(*step_value) - 1;
        if (seen_steps[p][t]) {
            throw IngestError(at("step") + ": duplicate step " + fields[1] + " for patient \"" +
                              patient_id + "\"");
        }
        seen_steps[p][t] = true;

        for (std::size_t f = 0; f < nn; ++f) {
            const auto& name = schema.numeric_features[f].name;
            const auto value = parse_double(fields[2 + f]);
            if (!value) throw IngestError(at(name) + ": non-numeric value \"" + fields[2 + f] + "\"");
            cohort.patients[p].numeric_values[t * nn + f] = *value;
        }
        for (std::size_t f = 0; f < nc; ++f) {
            const auto& feature = schema.categorical_features[f];
            const std::string& label = fields[2 + nn + f];
            try {
                cohort.patients[p].categorical_values[t * nc + f] =
                    static_cast<int>(schema.level_index(f, label));
            } catch (const IngestError&) {
                throw IngestError(at(feature.name) + ": unknown level \"" + label + "\"");
            }
        }
    }

    for (std::size_t p = 0; p < cohort.patients.size(); ++p) {
        for (std::size_t t = 0; t < t_len; ++t) {
            if (!seen_steps[p][t]) {
                throw IngestError("\"" + path + "\": patient \"" + cohort.patients[p].patient_id +
                                  "\" missing step " + std::to_string(t + 1));
            }
        }
    }
    if (cohort.patients.empty()) throw IngestError("\"" + path + "\": no patient rows");
    cohort.validate();
    return cohort;
}

void write_cohort_csv(const Cohort& cohort, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write \"" + path + "\"");
    const auto& schema = cohort.schema;
    const std::size_t nn = schema.numeric_count();
    const std::size_t nc = schema.categorical_count();
    out << cohort_csv_header(schema) << '\n';
    for (const auto& patient : cohort.patients) {
        for (std::size_t t = 0; t < schema.sequence_length; ++t) {
            out << csv_escape(patient.patient_id) << ',' << (t + 1);
            for (std::size_t f = 0; f < nn; ++f) {
                out << ',' << format_double(patient.numeric_at(t, f, nn));
            }
            for (std::size_t f = 0; f < nc; ++f) {
                const int level = patient.categorical_at(t, f, nc);
                out << ',' << csv_escape(schema.categorical_features[f].levels[static_cast<std::size_t>(level)]);
            }
            out << '\n';
        }
    }
    if (!out) throw IngestError("failed while writing \"" + path + "\"");
}

}  // namespace trajbench
