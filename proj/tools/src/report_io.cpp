#include "report_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "trajbench/errors.hpp"
#include "trajbench/hash.hpp"
#include "trajbench/stats.hpp"
#include "trajbench/text.hpp"

namespace trajbench::tools {

namespace {

MeasureKind parse_measure(const std::string& name) {
    if (name == "pearson") return MeasureKind::Pearson;
    if (name == "eta") return MeasureKind::Eta;
    if (name == "cramers_v") return MeasureKind::CramersV;
    throw IngestError("report: unknown association measure \"" + name + "\"");
}

}  // namespace

MarginalDistribution numeric_distribution(const std::string& feature, const std::vector<double>& real,
                                          const std::vector<double>& synthetic, std::size_t bins) {
    if (real.empty() || synthetic.empty()) {
        throw ContractError("numeric_distribution: both samples must be nonempty");
    }
    if (bins == 0) throw ContractError("numeric_distribution: bins must be positive");
    MarginalDistribution out;
    out.feature = feature;
    out.lo = std::min(*std::min_element(real.begin(), real.end()),
                      *std::min_element(synthetic.begin(), synthetic.end()));
    out.hi = std::max(*std::max_element(real.begin(), real.end()),
                      *std::max_element(synthetic.begin(), synthetic.end()));
    if (out.hi == out.lo) out.hi = out.lo + 1.0;  // degenerate range: one occupied bin
    out.real_counts.assign(bins, 0.0);
    out.synthetic_counts.assign(bins, 0.0);
    const double width = (out.hi - out.lo) / static_cast<double>(bins);
    auto tally = [&](const std::vector<double>& sample, std::vector<double>& counts) {
        for (double v : sample) {
            auto bin = static_cast<std::size_t>((v - out.lo) / width);
            if (bin >= bins) bin = bins - 1;  // the maximum lands in the last bin
            counts[bin] += 1.0;
        }
    };
    tally(real, out.real_counts);
    tally(synthetic, out.synthetic_counts);
    return out;
}

MarginalDistribution categorical_distribution(const std::string& feature,
                                              const std::vector<std::string>& levels,
                                              const std::vector<int>& real,
                                              const std::vector<int>& synthetic) {
    MarginalDistribution out;
    out.feature = feature;
    out.levels = levels;
    out.real_counts = level_counts(real, levels.size());
    out.synthetic_counts = level_counts(synthetic, levels.size());
    return out;
}

OrderedJson association_matrix_to_json(const AssociationMatrix& matrix) {
    OrderedJson j;
    j["features"] = matrix.feature_names;
    OrderedJson values = OrderedJson::array();
    OrderedJson measures = OrderedJson::array();
    OrderedJson reasons = OrderedJson::array();
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        OrderedJson vrow = OrderedJson::array();
        OrderedJson mrow = OrderedJson::array();
        OrderedJson rrow = OrderedJson::array();
        for (std::size_t k = 0; k < matrix.size(); ++k) {
            const AssociationValue& v = matrix.at(i, k);
            if (v.defined) {
                vrow.push_back(v.value);
                rrow.push_back(nullptr);
            } else {
                vrow.push_back(nullptr);
                rrow.push_back(v.undefined_reason);
            }
            mrow.push_back(measure_name(v.measure));
        }
        values.push_back(std::move(vrow));
        measures.push_back(std::move(mrow));
        reasons.push_back(std::move(rrow));
    }
    j["values"] = std::move(values);
    j["measures"] = std::move(measures);
    j["undefined_reasons"] = std::move(reasons);
    return j;
}

AssociationMatrix association_matrix_from_json(const OrderedJson& j) {
    AssociationMatrix matrix;
    matrix.feature_names = j.at("features").get<std::vector<std::string>>();
    const std::size_t n = matrix.feature_names.size();
    const auto& values = j.at("values");
    const auto& measures = j.at("measures");
    const auto& reasons = j.at("undefined_reasons");
    if (values.size() != n || measures.size() != n || reasons.size() != n) {
        throw IngestError("report: association grids do not match the feature list");
    }
    matrix.entries.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (values[i].size() != n || measures[i].size() != n || reasons[i].size() != n) {
            throw IngestError("report: association grid row has the wrong width");
        }
        for (std::size_t k = 0; k < n; ++k) {
            AssociationValue v;
            v.measure = parse_measure(measures[i][k].get<std::string>());
            if (values[i][k].is_null()) {
                v.defined = false;
                v.value = std::nan("");
                v.undefined_reason = reasons[i][k].is_null() ? "" : reasons[i][k].get<std::string>();
            } else {
                v.defined = true;
                v.value = values[i][k].get<double>();
            }
            matrix.at(i, k) = std::move(v);
        }
    }
    return matrix;
}

OrderedJson run_report_to_json(const RunReport& report) {
    OrderedJson j;
    j["meta"] = {{"dataset", report.fidelity.meta.dataset_id},
                 {"model", report.fidelity.meta.model_id},
                 {"g_max", report.fidelity.meta.g_max},
                 {"master_seed", hex64(report.fidelity.meta.master_seed)}};

    OrderedJson training;
    training["epoch_loss"] = report.training.epoch_loss;
    training["adam_steps"] = report.training.adam_steps;
    training["skipped_sequences"] = report.training.skipped_sequences;
    training["params_checksum"] = hex64(report.training.params_checksum);
    training["test_patient_reads"] = report.training.test_patient_reads;
    training["prediction_window_reads"] = report.training.prediction_window_reads;
    j["training"] = std::move(training);

    OrderedJson marginals = OrderedJson::array();
    for (std::size_t m = 0; m < report.fidelity.marginals.size(); ++m) {
        const MarginalMetric& metric = report.fidelity.marginals[m];
        OrderedJson entry;
        entry["feature"] = metric.feature;
        entry["kind"] = metric.kind;
        entry["value"] = metric.value;
        entry["n_real"] = metric.n_real;
        entry["n_synthetic"] = metric.n_synthetic;
        if (m < report.distributions.size()) {
            const MarginalDistribution& dist = report.distributions[m];
            OrderedJson shape;
            if (dist.levels.empty()) {
                shape["lo"] = dist.lo;
                shape["hi"] = dist.hi;
            } else {
                shape["levels"] = dist.levels;
            }
            shape["real_counts"] = dist.real_counts;
            shape["synthetic_counts"] = dist.synthetic_counts;
            entry["distribution"] = std::move(shape);
        }
        marginals.push_back(std::move(entry));
    }
    j["marginals"] = std::move(marginals);

    j["associations"] = {{"real", association_matrix_to_json(report.fidelity.real_associations)},
                         {"synthetic", association_matrix_to_json(report.fidelity.synthetic_associations)}};
    if (report.fidelity.correlation_gap) {
        j["correlation_gap"] = *report.fidelity.correlation_gap;
    } else {
        j["correlation_gap"] = nullptr;
    }
    j["compared_tiles"] = report.fidelity.compared_tiles;
    return j;
}

RunReport run_report_from_json(const OrderedJson& j) {
    RunReport report;
    const auto& meta = j.at("meta");
    report.fidelity.meta.dataset_id = meta.at("dataset").get<std::string>();
    report.fidelity.meta.model_id = meta.at("model").get<std::string>();
    report.fidelity.meta.g_max = meta.at("g_max").get<std::size_t>();
    report.fidelity.meta.master_seed = std::stoull(meta.at("master_seed").get<std::string>(), nullptr, 16);

    const auto& training = j.at("training");
    report.training.epoch_loss = training.at("epoch_loss").get<std::vector<double>>();
    report.training.adam_steps = training.at("adam_steps").get<std::size_t>();
    report.training.skipped_sequences = training.at("skipped_sequences").get<std::size_t>();
    report.training.params_checksum =
        std::stoull(training.at("params_checksum").get<std::string>(), nullptr, 16);
    report.training.test_patient_reads = training.at("test_patient_reads").get<std::size_t>();
    report.training.prediction_window_reads = training.at("prediction_window_reads").get<std::size_t>();

    for (const auto& entry : j.at("marginals")) {
        MarginalMetric metric;
        metric.feature = entry.at("feature").get<std::string>();
        metric.kind = entry.at("kind").get<std::string>();
        metric.value = entry.at("value").get<double>();
        metric.n_real = entry.at("n_real").get<std::size_t>();
        metric.n_synthetic = entry.at("n_synthetic").get<std::size_t>();
        report.fidelity.marginals.push_back(metric);

        MarginalDistribution dist;
        dist.feature = metric.feature;
        const auto& shape = entry.at("distribution");
        if (shape.contains("levels")) {
            dist.levels = shape.at("levels").get<std::vector<std::string>>();
        } else {
            dist.lo = shape.at("lo").get<double>();
            dist.hi = shape.at("hi").get<double>();
        }
        dist.real_counts = shape.at("real_counts").get<std::vector<double>>();
        dist.synthetic_counts = shape.at("synthetic_counts").get<std::vector<double>>();
        report.distributions.push_back(std::move(dist));
    }

    report.fidelity.real_associations = association_matrix_from_json(j.at("associations").at("real"));
    report.fidelity.synthetic_associations =
        association_matrix_from_json(j.at("associations").at("synthetic"));
    if (!j.at("correlation_gap").is_null()) {
        report.fidelity.correlation_gap = j.at("correlation_gap").get<double>();
    }
    report.fidelity.compared_tiles = j.at("compared_tiles").get<std::size_t>();
    return report;
}

std::string association_matrix_to_csv(const AssociationMatrix& matrix) {
    std::string out = "feature";
    for (const auto& name : matrix.feature_names) out += "," + csv_escape(name);
    out += "\n";
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out += csv_escape(matrix.feature_names[i]);
        for (std::size_t k = 0; k < matrix.size(); ++k) {
            const AssociationValue& v = matrix.at(i, k);
            out += ",";
            if (v.defined) out += format_double(v.value);
        }
        out += "\n";
    }
    return out;
}

std::string hex64(std::uint64_t value) {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

void atomic_write_file(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IngestError("cannot open \"" + tmp.string() + "\" for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IngestError("short write to \"" + tmp.string() + "\"");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open \"" + path.string() + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::uint64_t file_fnv1a64(const std::filesystem::path& path) { return fnv1a64(read_file(path)); }

}  // namespace trajbench::tools
