#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "report_io.hpp"
#include "trajbench/train.hpp"

namespace trajbench::tools {

// A pipeline failure annotated with the stage it happened in; the CLI maps
// these to exit code 1 and prints the stage name.
class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& message)
        : std::runtime_error("stage " + stage + ": " + message), stage_(stage) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// One experiment: cohort source, model choice, split/irregularity/training
// settings, and the output directory. The master seed is the only entropy
// input; every stage derives its own stream from it by label.
struct ExperimentConfig {
    std::string dataset;                    // art_hiv | hypotension
    std::string source_kind = "synthetic";  // synthetic | csv
    std::string csv_path;                   // csv source only
    std::size_t n_patients = 500;           // synthetic source only
    std::optional<double> rho;              // generator overrides (synthetic source)
    std::optional<double> uniform_loading;

    std::string model = "lstm_seq2seq";
    std::optional<std::size_t> hidden_dim;  // defaults from the architecture when unset
    std::optional<std::size_t> layers;
    std::optional<std::size_t> heads;
    std::optional<std::size_t> ffn_dim;

    double train_fraction = 0.8;
    std::size_t observation_length = 0;  // 0 = dataset preset
    std::size_t prediction_length = 0;

    std::size_t g_max = 1;
    bool resample_per_epoch = false;

    TrainConfig training;  // seed is overwritten from master_seed

    bool stochastic_rollout = true;

    std::string output_dir;
    std::uint64_t master_seed = 0;
};

// Parses and fully validates; every complaint is a ConfigError naming the
// offending field path (e.g. "config.training.epochs").
ExperimentConfig experiment_config_from_json(const OrderedJson& j);
ExperimentConfig load_experiment_config(const std::string& path);
void validate_experiment_config(const ExperimentConfig& config);

// Canonical config echo, embedded in the run manifest.
OrderedJson experiment_config_echo(const ExperimentConfig& config);

struct RunArtifacts {
    std::filesystem::path output_dir;
    RunReport report;
    std::vector<std::string> files;  // relative paths in manifest order
};

// Executes load/generate -> split -> train -> rollout -> fidelity and writes
// report.json, assoc_real.csv, assoc_synth.csv, model.bin, plots/*.svg, the
// timing sidecar and manifest.json (all file writes are atomic).
RunArtifacts run_experiment(const ExperimentConfig& config);

struct GridOptions {
    std::string preset = "paper";
    std::string out_dir;
    std::uint64_t master_seed = 1;
    std::size_t n_patients = 100;
    std::size_t epochs = 3;
    std::size_t jobs = 1;

    void validate() const;
};

// The "paper" preset: {art_hiv, hypotension} x {lstm_seq2seq, ethos_lite} x
// {moderate, severe} gap caps (10/35 monthly, 8/28 hourly) = 8 runs.
std::vector<ExperimentConfig> grid_configs(const GridOptions& options);

std::string grid_run_name(const ExperimentConfig& config);

// Runs the grid on a worker pool of `jobs` threads (runs are isolated) and
// writes <out_dir>/grid_summary.json; returns the summary.
OrderedJson run_grid(const GridOptions& options);

}  // namespace trajbench::tools
