#include "experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "svg.hpp"
#include "trajbench/cohort_csv.hpp"
#include "trajbench/encoding.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/generator.hpp"
#include "trajbench/model.hpp"
#include "trajbench/rng.hpp"
#include "trajbench/rollout.hpp"
#include "trajbench/schema.hpp"

namespace trajbench::tools {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

// --- field-path JSON access -------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError(path + ": " + why);
}

void require_object(const OrderedJson& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown_keys(const OrderedJson& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* name : allowed) known = known || key == name;
        if (!known) fail(path + "." + key, "unknown field");
    }
}

std::string as_string(const OrderedJson& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

bool as_bool(const OrderedJson& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
    return v.get<bool>();
}

double as_number(const OrderedJson& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

bool non_negative_integer(const OrderedJson& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::size_t as_count(const OrderedJson& v, const std::string& path) {
    if (!non_negative_integer(v)) fail(path, "expected an unsigned integer");
    return v.get<std::size_t>();
}

std::uint64_t as_seed(const OrderedJson& v, const std::string& path) {
    if (non_negative_integer(v)) return v.get<std::uint64_t>();
    if (v.is_string()) {
        const std::string text = v.get<std::string>();
        std::size_t used = 0;
        try {
            const std::uint64_t seed = std::stoull(text, &used, 16);
            if (used == text.size() && !text.empty()) return seed;
        } catch (const std::exception&) {
        }
    }
    fail(path, "expected an unsigned integer or hex string");
}

// --- resolved settings -------------------------------------------------------

GeneratorSpec resolved_generator_spec(const ExperimentConfig& config) {
    GeneratorSpec spec = default_generator_spec(config.dataset, config.n_patients);
    if (config.rho) spec.rho = *config.rho;
    if (config.uniform_loading) {
        for (double& lambda : spec.numeric_loadings) lambda = *config.uniform_loading;
        for (double& lambda : spec.categorical_loadings) lambda = *config.uniform_loading;
    }
    return spec;
}

SplitSpec resolved_split_spec(const ExperimentConfig& config, const FeatureSchema& schema) {
    SplitSpec spec = default_split_spec(schema, derive_seed(config.master_seed, "stage-split"));
    spec.train_fraction = config.train_fraction;
    if (config.observation_length > 0) spec.observation_length = config.observation_length;
    if (config.prediction_length > 0) spec.prediction_length = config.prediction_length;
    return spec;
}

ModelConfig resolved_model_config(const ExperimentConfig& config, const FeatureSchema& schema,
                                  const SplitSpec& split) {
    const ModelKind kind = parse_model_kind(config.model);
    ModelConfig mc = default_model_config(kind, encoded_dim(schema),
                                          split.observation_length + split.prediction_length,
                                          derive_seed(config.master_seed, "stage-model-init"));
    if (config.hidden_dim) mc.hidden_dim = *config.hidden_dim;
    if (config.layers) mc.layers = *config.layers;
    if (config.heads) mc.heads = *config.heads;
    if (config.ffn_dim) mc.ffn_dim = *config.ffn_dim;
    return mc;
}

IrregularitySpec resolved_irregularity(const ExperimentConfig& config) {
    IrregularitySpec spec;
    spec.g_max = config.g_max;
    spec.resample_per_epoch = config.resample_per_epoch;
    spec.seed = derive_seed(config.master_seed, "stage-gaps");
    return spec;
}

void rename_over(const std::filesystem::path& from, const std::filesystem::path& to) {
    std::filesystem::rename(from, to);
}

}  // namespace

ExperimentConfig experiment_config_from_json(const OrderedJson& j) {
    require_object(j, "config");
    reject_unknown_keys(j, "config",
                        {"dataset", "source", "model", "split", "irregularity", "training", "rollout",
                         "output_dir", "master_seed"});
    ExperimentConfig config;
    if (!j.contains("dataset")) fail("config.dataset", "required field is missing");
    config.dataset = as_string(j.at("dataset"), "config.dataset");
    if (!j.contains("output_dir")) fail("config.output_dir", "required field is missing");
    config.output_dir = as_string(j.at("output_dir"), "config.output_dir");
    if (j.contains("master_seed")) config.master_seed = as_seed(j.at("master_seed"), "config.master_seed");

    if (j.contains("source")) {
        const OrderedJson& source = j.at("source");
        require_object(source, "config.source");
        reject_unknown_keys(source, "config.source",
                            {"kind", "path", "n_patients", "rho", "uniform_loading"});
        if (source.contains("kind")) config.source_kind = as_string(source.at("kind"), "config.source.kind");
        if (source.contains("path")) config.csv_path = as_string(source.at("path"), "config.source.path");
        if (source.contains("n_patients")) {
            config.n_patients = as_count(source.at("n_patients"), "config.source.n_patients");
        }
        if (source.contains("rho")) config.rho = as_number(source.at("rho"), "config.source.rho");
        if (source.contains("uniform_loading")) {
            config.uniform_loading = as_number(source.at("uniform_loading"), "config.source.uniform_loading");
        }
    }

    if (j.contains("model")) {
        const OrderedJson& model = j.at("model");
        require_object(model, "config.model");
        reject_unknown_keys(model, "config.model", {"kind", "hidden_dim", "layers", "heads", "ffn_dim"});
        if (model.contains("kind")) config.model = as_string(model.at("kind"), "config.model.kind");
        if (model.contains("hidden_dim")) {
            config.hidden_dim = as_count(model.at("hidden_dim"), "config.model.hidden_dim");
        }
        if (model.contains("layers")) config.layers = as_count(model.at("layers"), "config.model.layers");
        if (model.contains("heads")) config.heads = as_count(model.at("heads"), "config.model.heads");
        if (model.contains("ffn_dim")) config.ffn_dim = as_count(model.at("ffn_dim"), "config.model.ffn_dim");
    }

    if (j.contains("split")) {
        const OrderedJson& split = j.at("split");
        require_object(split, "config.split");
        reject_unknown_keys(split, "config.split",
                            {"train_fraction", "observation_length", "prediction_length"});
        if (split.contains("train_fraction")) {
            config.train_fraction = as_number(split.at("train_fraction"), "config.split.train_fraction");
        }
        if (split.contains("observation_length")) {
            config.observation_length = as_count(split.at("observation_length"), "config.split.observation_length");
        }
        if (split.contains("prediction_length")) {
            config.prediction_length = as_count(split.at("prediction_length"), "config.split.prediction_length");
        }
    }

    if (j.contains("irregularity")) {
        const OrderedJson& irregularity = j.at("irregularity");
        require_object(irregularity, "config.irregularity");
        reject_unknown_keys(irregularity, "config.irregularity", {"g_max", "resample_per_epoch"});
        if (irregularity.contains("g_max")) {
            config.g_max = as_count(irregularity.at("g_max"), "config.irregularity.g_max");
        }
        if (irregularity.contains("resample_per_epoch")) {
            config.resample_per_epoch =
                as_bool(irregularity.at("resample_per_epoch"), "config.irregularity.resample_per_epoch");
        }
    }

    if (j.contains("training")) {
        const OrderedJson& training = j.at("training");
        require_object(training, "config.training");
        reject_unknown_keys(training, "config.training",
                            {"epochs", "lr", "batch_size", "numeric_loss_weight",
                             "categorical_loss_weight", "clip_gradients", "clip_norm"});
        if (training.contains("epochs")) {
            config.training.epochs = as_count(training.at("epochs"), "config.training.epochs");
        }
        if (training.contains("lr")) config.training.lr = as_number(training.at("lr"), "config.training.lr");
        if (training.contains("batch_size")) {
            config.training.batch_size = as_count(training.at("batch_size"), "config.training.batch_size");
        }
        if (training.contains("numeric_loss_weight")) {
            config.training.numeric_loss_weight =
                as_number(training.at("numeric_loss_weight"), "config.training.numeric_loss_weight");
        }
        if (training.contains("categorical_loss_weight")) {
            config.training.categorical_loss_weight =
                as_number(training.at("categorical_loss_weight"), "config.training.categorical_loss_weight");
        }
        if (training.contains("clip_gradients")) {
            config.training.clip_gradients =
                as_bool(training.at("clip_gradients"), "config.training.clip_gradients");
        }
        if (training.contains("clip_norm")) {
            config.training.clip_norm = as_number(training.at("clip_norm"), "config.training.clip_norm");
        }
    }

    if (j.contains("rollout")) {
        const OrderedJson& rollout = j.at("rollout");
        require_object(rollout, "config.rollout");
        reject_unknown_keys(rollout, "config.rollout", {"stochastic"});
        if (rollout.contains("stochastic")) {
            config.stochastic_rollout = as_bool(rollout.at("stochastic"), "config.rollout.stochastic");
        }
    }

    validate_experiment_config(config);
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    OrderedJson j;
    try {
        j = OrderedJson::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: \"" + path + "\" is not valid JSON (" + e.what() + ")");
    }
    return experiment_config_from_json(j);
}

void validate_experiment_config(const ExperimentConfig& config) {
    FeatureSchema schema;
    try {
        schema = make_schema(config.dataset);
    } catch (const std::exception& e) {
        fail("config.dataset", e.what());
    }

    if (config.source_kind == "csv") {
        if (config.csv_path.empty()) fail("config.source.path", "required for a csv source");
        if (!std::filesystem::exists(config.csv_path)) {
            fail("config.source.path", "file does not exist: \"" + config.csv_path + "\"");
        }
    } else if (config.source_kind == "synthetic") {
        try {
            resolved_generator_spec(config).validate();
        } catch (const std::exception& e) {
            fail("config.source", e.what());
        }
    } else {
        fail("config.source.kind", "expected \"synthetic\" or \"csv\"");
    }

    SplitSpec split = resolved_split_spec(config, schema);
    try {
        split.validate(schema);
    } catch (const std::exception& e) {
        fail("config.split", e.what());
    }

    try {
        resolved_model_config(config, schema, split).validate();
    } catch (const std::exception& e) {
        fail("config.model", e.what());
    }

    try {
        resolved_irregularity(config).validate();
    } catch (const std::exception& e) {
        fail("config.irregularity", e.what());
    }

    try {
        config.training.validate();
    } catch (const std::exception& e) {
        fail("config.training", e.what());
    }

    if (config.output_dir.empty()) fail("config.output_dir", "must not be empty");
}

OrderedJson experiment_config_echo(const ExperimentConfig& config) {
    OrderedJson j;
    j["dataset"] = config.dataset;
    OrderedJson source;
    source["kind"] = config.source_kind;
    if (config.source_kind == "csv") {
        source["path"] = config.csv_path;
    } else {
        source["n_patients"] = config.n_patients;
        if (config.rho) source["rho"] = *config.rho;
        if (config.uniform_loading) source["uniform_loading"] = *config.uniform_loading;
    }
    j["source"] = std::move(source);

    OrderedJson model;
    model["kind"] = config.model;
    if (config.hidden_dim) model["hidden_dim"] = *config.hidden_dim;
    if (config.layers) model["layers"] = *config.layers;
    if (config.heads) model["heads"] = *config.heads;
    if (config.ffn_dim) model["ffn_dim"] = *config.ffn_dim;
    j["model"] = std::move(model);

    OrderedJson split;
    split["train_fraction"] = config.train_fraction;
    if (config.observation_length > 0) split["observation_length"] = config.observation_length;
    if (config.prediction_length > 0) split["prediction_length"] = config.prediction_length;
    j["split"] = std::move(split);

    j["irregularity"] = {{"g_max", config.g_max}, {"resample_per_epoch", config.resample_per_epoch}};
    j["training"] = {{"epochs", config.training.epochs},
                     {"lr", config.training.lr},
                     {"batch_size", config.training.batch_size},
                     {"numeric_loss_weight", config.training.numeric_loss_weight},
                     {"categorical_loss_weight", config.training.categorical_loss_weight},
                     {"clip_gradients", config.training.clip_gradients},
                     {"clip_norm", config.training.clip_norm}};
    j["rollout"] = {{"stochastic", config.stochastic_rollout}};
    j["output_dir"] = config.output_dir;
    j["master_seed"] = hex64(config.master_seed);
    return j;
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
    validate_experiment_config(config);
    const auto run_start = Clock::now();

    const FeatureSchema schema = make_schema(config.dataset);
    const SplitSpec split_spec = resolved_split_spec(config, schema);
    const ModelConfig model_cfg = resolved_model_config(config, schema, split_spec);
    const IrregularitySpec irregularity = resolved_irregularity(config);

    const Cohort cohort = stage("cohort", [&] {
        if (config.source_kind == "csv") return load_cohort_csv(config.csv_path, schema);
        return generate_synthetic_cohort(resolved_generator_spec(config),
                                         derive_seed(config.master_seed, "stage-generator"));
    });

    const SplitResult split = stage("split", [&] { return dual_split(cohort, split_spec); });

    TrainConfig train_cfg = config.training;
    train_cfg.seed = derive_seed(config.master_seed, "stage-train");
    TrainOutput trained =
        stage("train", [&] { return train(model_cfg, cohort, split, irregularity, train_cfg); });

    const auto rollout_start = Clock::now();
    const Cohort test_cohort =
        stage("rollout", [&] { return subset_cohort(cohort, split.test_patient_ids); });
    const std::vector<SynthesizedWindow> windows = stage("rollout", [&] {
        const std::uint64_t base = derive_seed(config.master_seed, "stage-rollout");
        std::vector<SynthesizedWindow> out;
        out.reserve(test_cohort.patients.size());
        RolloutOptions options;
        options.stochastic = config.stochastic_rollout;
        for (std::size_t p = 0; p < test_cohort.patients.size(); ++p) {
            options.seed = derive_seed(base, "rollout-patient", p);
            out.push_back(rollout(trained.model, trained.normalizer, test_cohort.patients[p],
                                  split.observation_length, split.prediction_length, irregularity,
                                  options));
        }
        return out;
    });
    const double rollout_seconds = seconds_since(rollout_start);

    WindowColumns real, synthetic;
    FidelityMeta meta;
    meta.dataset_id = config.dataset;
    meta.model_id = config.model;
    meta.g_max = config.g_max;
    meta.master_seed = config.master_seed;
    const FidelityReport fidelity = stage("fidelity", [&] {
        real = pool_window(test_cohort, split.prediction_begin(), split.prediction_end());
        synthetic = pool_synthesized(windows, schema);
        return fidelity_report(real, synthetic, schema, meta);
    });

    RunReport report;
    report.fidelity = fidelity;
    report.training.epoch_loss = trained.report.epoch_loss;
    report.training.adam_steps = trained.report.adam_steps;
    report.training.skipped_sequences = trained.report.skipped_sequences;
    report.training.params_checksum = trained.report.final_checksum;
    report.training.test_patient_reads = trained.report.test_patient_reads;
    report.training.prediction_window_reads = trained.report.prediction_window_reads;
    for (std::size_t f = 0; f < schema.numeric_count(); ++f) {
        report.distributions.push_back(numeric_distribution(schema.numeric_features[f].name,
                                                            real.numeric[f], synthetic.numeric[f]));
    }
    for (std::size_t f = 0; f < schema.categorical_count(); ++f) {
        report.distributions.push_back(
            categorical_distribution(schema.categorical_features[f].name,
                                     schema.categorical_features[f].levels, real.categorical[f],
                                     synthetic.categorical[f]));
    }

    RunArtifacts artifacts;
    artifacts.output_dir = config.output_dir;
    artifacts.report = std::move(report);
    stage("write-artifacts", [&] {
        const std::filesystem::path dir = artifacts.output_dir;
        std::filesystem::create_directories(dir / "plots");

        atomic_write_file(dir / "report.json", run_report_to_json(artifacts.report).dump(2) + "\n");
        artifacts.files.push_back("report.json");
        atomic_write_file(dir / "assoc_real.csv",
                          association_matrix_to_csv(artifacts.report.fidelity.real_associations));
        artifacts.files.push_back("assoc_real.csv");
        atomic_write_file(dir / "assoc_synth.csv",
                          association_matrix_to_csv(artifacts.report.fidelity.synthetic_associations));
        artifacts.files.push_back("assoc_synth.csv");

        save_model(trained.model, (dir / "model.bin.tmp").string());
        rename_over(dir / "model.bin.tmp", dir / "model.bin");
        artifacts.files.push_back("model.bin");

        for (const std::string& name : emit_plots(artifacts.report, dir / "plots")) {
            artifacts.files.push_back("plots/" + name);
        }

        OrderedJson manifest;
        manifest["config"] = experiment_config_echo(config);
        manifest["seeds"] = {{"generator", hex64(derive_seed(config.master_seed, "stage-generator"))},
                             {"split", hex64(derive_seed(config.master_seed, "stage-split"))},
                             {"model_init", hex64(derive_seed(config.master_seed, "stage-model-init"))},
                             {"gaps", hex64(derive_seed(config.master_seed, "stage-gaps"))},
                             {"train", hex64(derive_seed(config.master_seed, "stage-train"))},
                             {"rollout", hex64(derive_seed(config.master_seed, "stage-rollout"))}};
        OrderedJson hashes;
        for (const std::string& name : artifacts.files) hashes[name] = hex64(file_fnv1a64(dir / name));
        manifest["artifacts"] = std::move(hashes);
        atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
        artifacts.files.push_back("manifest.json");

        // Wall-clock sidecar, deliberately outside the manifest so repeated
        // runs stay byte-identical everywhere else.
        OrderedJson timing;
        timing["epoch_seconds"] = trained.report.epoch_seconds;
        timing["rollout_seconds"] = rollout_seconds;
        timing["total_seconds"] = seconds_since(run_start);
        atomic_write_file(dir / "timing.json", timing.dump(2) + "\n");
        artifacts.files.push_back("timing.json");
        return 0;
    });
    return artifacts;
}

void GridOptions::validate() const {
    if (preset != "paper") {
        throw ConfigError("grid.preset: unknown preset \"" + preset + "\" (expected \"paper\")");
    }
    if (out_dir.empty()) throw ConfigError("grid.out_dir: must not be empty");
    if (master_seed == 0) throw ConfigError("grid.master_seed: must be nonzero");
    if (n_patients < 5) throw ConfigError("grid.n_patients: need at least 5 patients");
    if (epochs < 1) throw ConfigError("grid.epochs: must be >= 1");
    if (jobs < 1) throw ConfigError("grid.jobs: must be >= 1");
}

std::vector<ExperimentConfig> grid_configs(const GridOptions& options) {
    options.validate();
    struct DatasetRow {
        const char* dataset;
        std::size_t moderate;
        std::size_t severe;
    };
    const DatasetRow rows[] = {{"art_hiv", 10, 35}, {"hypotension", 8, 28}};
    const char* models[] = {"lstm_seq2seq", "ethos_lite"};

    std::vector<ExperimentConfig> configs;
    std::uint64_t index = 0;
    for (const DatasetRow& row : rows) {
        for (const char* model : models) {
            for (const std::size_t g_max : {row.moderate, row.severe}) {
                ExperimentConfig config;
                config.dataset = row.dataset;
                config.n_patients = options.n_patients;
                config.model = model;
                config.g_max = g_max;
                config.training.epochs = options.epochs;
                config.master_seed = derive_seed(options.master_seed, "grid-run", index++);
                config.output_dir =
                    (std::filesystem::path(options.out_dir) / grid_run_name(config)).string();
                configs.push_back(std::move(config));
            }
        }
    }
    return configs;
}

std::string grid_run_name(const ExperimentConfig& config) {
    return config.dataset + "_" + config.model + "_g" + std::to_string(config.g_max);
}

OrderedJson run_grid(const GridOptions& options) {
    const std::vector<ExperimentConfig> configs = grid_configs(options);
    for (const ExperimentConfig& config : configs) validate_experiment_config(config);
    std::filesystem::create_directories(options.out_dir);

    std::vector<RunArtifacts> results(configs.size());
    std::vector<std::exception_ptr> failures(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) break;
            try {
                results[i] = run_experiment(configs[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t width = std::min<std::size_t>(options.jobs, configs.size());
    if (width <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    OrderedJson summary;
    summary["preset"] = options.preset;
    summary["master_seed"] = hex64(options.master_seed);
    summary["n_patients"] = options.n_patients;
    summary["epochs"] = options.epochs;
    OrderedJson runs = OrderedJson::array();
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const RunReport& report = results[i].report;
        double ks_sum = 0.0, ks_max = 0.0, tv_sum = 0.0, tv_max = 0.0;
        std::size_t ks_n = 0, tv_n = 0;
        for (const MarginalMetric& m : report.fidelity.marginals) {
            if (m.kind == "ks") {
                ks_sum += m.value;
                ks_max = std::max(ks_max, m.value);
                ++ks_n;
            } else {
                tv_sum += m.value;
                tv_max = std::max(tv_max, m.value);
                ++tv_n;
            }
        }
        OrderedJson entry;
        entry["name"] = grid_run_name(configs[i]);
        entry["dataset"] = configs[i].dataset;
        entry["model"] = configs[i].model;
        entry["g_max"] = configs[i].g_max;
        entry["master_seed"] = hex64(configs[i].master_seed);
        entry["mean_ks"] = ks_n ? ks_sum / static_cast<double>(ks_n) : 0.0;
        entry["max_ks"] = ks_max;
        entry["mean_tv"] = tv_n ? tv_sum / static_cast<double>(tv_n) : 0.0;
        entry["max_tv"] = tv_max;
        if (report.fidelity.correlation_gap) {
            entry["correlation_gap"] = *report.fidelity.correlation_gap;
        } else {
            entry["correlation_gap"] = nullptr;
        }
        entry["compared_tiles"] = report.fidelity.compared_tiles;
        entry["final_epoch_loss"] =
            report.training.epoch_loss.empty() ? 0.0 : report.training.epoch_loss.back();
        runs.push_back(std::move(entry));
    }
    summary["runs"] = std::move(runs);
    atomic_write_file(std::filesystem::path(options.out_dir) / "grid_summary.json",
                      summary.dump(2) + "\n");
    return summary;
}

}  // namespace trajbench::tools
