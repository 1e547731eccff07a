#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "report_io.hpp"
#include "svg.hpp"
#include "trajbench/cohort_csv.hpp"
#include "trajbench/errors.hpp"
#include "trajbench/generator.hpp"

namespace trajbench::tools {

namespace {

template <typename Fn>
int guarded_verb(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

struct GenSpec {
    GeneratorSpec generator;
    std::uint64_t seed = 0;
};

GenSpec load_gen_spec(const std::string& path) {
    std::string bytes;
    try {
        bytes = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }
    OrderedJson j;
    try {
        j = OrderedJson::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("spec: \"" + path + "\" is not valid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw ConfigError("spec: expected an object");
    for (const auto& [key, value] : j.items()) {
        if (key != "dataset" && key != "n_patients" && key != "seed" && key != "rho" &&
            key != "uniform_loading" && key != "sequence_length") {
            throw ConfigError("spec." + key + ": unknown field");
        }
    }
    if (!j.contains("dataset") || !j.at("dataset").is_string()) {
        throw ConfigError("spec.dataset: required string field");
    }
    if (!j.contains("n_patients") || !j.at("n_patients").is_number_unsigned()) {
        throw ConfigError("spec.n_patients: required unsigned integer field");
    }

    GenSpec out;
    try {
        out.generator = default_generator_spec(j.at("dataset").get<std::string>(),
                                               j.at("n_patients").get<std::size_t>());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("spec.dataset: ") + e.what());
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("spec.seed: expected an unsigned integer");
        out.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("rho")) {
        if (!j.at("rho").is_number()) throw ConfigError("spec.rho: expected a number");
        out.generator.rho = j.at("rho").get<double>();
    }
    if (j.contains("uniform_loading")) {
        if (!j.at("uniform_loading").is_number()) {
            throw ConfigError("spec.uniform_loading: expected a number");
        }
        const double lambda = j.at("uniform_loading").get<double>();
        for (double& l : out.generator.numeric_loadings) l = lambda;
        for (double& l : out.generator.categorical_loadings) l = lambda;
    }
    if (j.contains("sequence_length")) {
        if (!j.at("sequence_length").is_number_unsigned()) {
            throw ConfigError("spec.sequence_length: expected an unsigned integer");
        }
        out.generator.schema.sequence_length = j.at("sequence_length").get<std::size_t>();
    }
    try {
        out.generator.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("spec: ") + e.what());
    }
    return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"irregular-sampling trajectory synthesis benchmark"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "execute one experiment from a JSON config");
    run->add_option("config", config_path, "experiment config JSON")->required();

    GridOptions grid_options;
    CLI::App* grid = app.add_subcommand("grid", "run a preset experiment grid");
    grid->add_option("--preset", grid_options.preset, "grid preset name")->capture_default_str();
    grid->add_option("--out", grid_options.out_dir, "output directory")->required();
    grid->add_option("--seed", grid_options.master_seed, "master seed")->capture_default_str();
    grid->add_option("--patients", grid_options.n_patients, "patients per run")->capture_default_str();
    grid->add_option("--epochs", grid_options.epochs, "training epochs per run")->capture_default_str();
    grid->add_option("--jobs", grid_options.jobs, "parallel runs")->capture_default_str();

    std::string report_dir;
    CLI::App* report = app.add_subcommand("report", "re-emit plots from an existing report");
    report->add_option("--in", report_dir, "run output directory holding report.json")->required();

    std::string gen_spec_path, gen_out_path;
    CLI::App* gen = app.add_subcommand("gen", "write a synthetic cohort to CSV");
    gen->add_option("--spec", gen_spec_path, "generator spec JSON")->required();
    gen->add_option("--out", gen_out_path, "destination CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // bad usage is a validation failure
    }

    if (run->parsed()) {
        return guarded_verb([&] {
            const ExperimentConfig config = load_experiment_config(config_path);
            const RunArtifacts artifacts = run_experiment(config);
            std::cout << "wrote " << artifacts.files.size() << " artifacts to "
                      << artifacts.output_dir.string() << "\n";
            if (artifacts.report.fidelity.correlation_gap) {
                std::cout << "correlation gap " << *artifacts.report.fidelity.correlation_gap << " over "
                          << artifacts.report.fidelity.compared_tiles << " tiles\n";
            } else {
                std::cout << "correlation gap undefined (no mutually defined tiles)\n";
            }
        });
    }
    if (grid->parsed()) {
        return guarded_verb([&] {
            const OrderedJson summary = run_grid(grid_options);
            for (const auto& entry : summary.at("runs")) {
                std::cout << entry.at("name").get<std::string>() << ": mean ks "
                          << entry.at("mean_ks").get<double>() << ", mean tv "
                          << entry.at("mean_tv").get<double>() << "\n";
            }
            std::cout << "grid summary written to "
                      << (std::filesystem::path(grid_options.out_dir) / "grid_summary.json").string()
                      << "\n";
        });
    }
    if (report->parsed()) {
        return guarded_verb([&] {
            const std::filesystem::path dir = report_dir;
            const RunReport loaded = run_report_from_json(OrderedJson::parse(read_file(dir / "report.json")));
            const std::vector<std::string> files = emit_plots(loaded, dir / "plots");
            std::cout << "re-emitted " << files.size() << " plots to " << (dir / "plots").string()
                      << "\n";
        });
    }
    return guarded_verb([&] {
        const GenSpec spec = load_gen_spec(gen_spec_path);
        const Cohort cohort = generate_synthetic_cohort(spec.generator, spec.seed);
        const std::string tmp = gen_out_path + ".tmp";
        write_cohort_csv(cohort, tmp);
        std::filesystem::rename(tmp, gen_out_path);
        std::cout << "wrote " << cohort.size() << " patients to " << gen_out_path << "\n";
    });
}

}  // namespace trajbench::tools
