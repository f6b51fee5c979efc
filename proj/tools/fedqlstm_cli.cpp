// Command-line front end: run one experiment, sweep a grid, or summarize a
// results directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedqlstm/fedqlstm.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fedqlstm::ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw fedqlstm::ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

int run_command(const std::string& config_path, std::uint64_t seed, bool seed_set,
                const std::string& out_dir, bool emit_plot) {
    fedqlstm::ExperimentConfig config =
        fedqlstm::experiment_config_from_json(load_json(config_path));
    if (seed_set) config.master_seed = seed;
    if (!out_dir.empty()) config.output_dir = out_dir;

    const fedqlstm::ExperimentReport report = fedqlstm::run_experiment(config);

    if (report.rounds_to_convergence)
        std::cout << "converged at round " << *report.rounds_to_convergence;
    else
        std::cout << "not converged within " << config.max_rounds << " rounds";
    std::cout << "; overall local computations " << report.overall_local_computations
              << "; final test loss " << report.final_test_loss << "; wall clock "
              << report.wall_clock_seconds << " s\n";

    if (!config.output_dir.empty()) {
        const auto path = fedqlstm::write_report_files(report, config.output_dir, emit_plot);
        std::cout << "wrote " << path.string() << "\n";
    }
    return 0;
}

int sweep_command(const std::string& config_path, const std::string& out_dir) {
    fedqlstm::SweepSpec spec = fedqlstm::sweep_spec_from_json(load_json(config_path));
    const auto rows = fedqlstm::run_sweep(spec, &std::cerr);

    const std::string dir = out_dir.empty() ? spec.base.output_dir : out_dir;
    if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        std::ofstream out(std::filesystem::path(dir) / "sweep.csv");
        fedqlstm::write_sweep_csv(rows, out);
        std::cout << "wrote " << (std::filesystem::path(dir) / "sweep.csv").string() << "\n";
    } else {
        fedqlstm::write_sweep_csv(rows, std::cout);
    }

    for (const auto& row : rows)
        if (!row.error.empty())
            std::cerr << "failed: " << row.label << " seed " << row.seed << ": " << row.error
                      << "\n";
    return 0;
}

int report_command(const std::string& in_dir) {
    const auto digests = fedqlstm::load_reports(in_dir);
    if (digests.empty()) {
        std::cout << "no .report.json files in " << in_dir << "\n";
        return 0;
    }
    fedqlstm::print_comparison(digests, std::cout);
    return 0;
}

int dataset_command(const std::string& config_path, const std::string& out_path) {
    const fedqlstm::ExperimentConfig config =
        fedqlstm::experiment_config_from_json(load_json(config_path));
    const fedqlstm::SequenceDataset dataset =
        fedqlstm::build_dataset(config.target, config.seq_len);
    if (out_path.empty() || out_path == "-") {
        fedqlstm::export_csv(dataset, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw fedqlstm::ConfigError("cannot open '" + out_path + "' for writing");
        fedqlstm::export_csv(dataset, out);
        std::cout << "wrote " << out_path << " (" << dataset.pairs.size() << " pairs)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated QLSTM / LSTM function-approximation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_dir;
    std::uint64_t seed = 0;
    bool emit_plot = false;

    CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    CLI::Option* seed_opt = run->add_option("--seed", seed, "override master_seed");
    run->add_option("--out", out_dir, "override output directory");
    run->add_flag("--emit-plot", emit_plot, "also write a long-format loss-curve CSV");

    CLI::App* sweep = app.add_subcommand("sweep", "run a config grid and tabulate results");
    sweep->add_option("--config", config_path, "sweep spec (JSON)")->required();
    sweep->add_option("--out", out_dir, "output directory for sweep.csv");

    CLI::App* report = app.add_subcommand("report", "summarize a directory of run reports");
    report->add_option("--in", in_dir, "directory containing .report.json files")->required();

    std::string dataset_out;
    CLI::App* dataset = app.add_subcommand("dataset", "export a config's windowed dataset as CSV");
    dataset->add_option("--config", config_path, "experiment config (JSON)")->required();
    dataset->add_option("--out", dataset_out, "output file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(config_path, seed, seed_opt->count() > 0, out_dir, emit_plot);
        if (sweep->parsed()) return sweep_command(config_path, out_dir);
        if (dataset->parsed()) return dataset_command(config_path, dataset_out);
        return report_command(in_dir);
    } catch (const fedqlstm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fedqlstm::ShapeError& e) {
        std::cerr << "structural error: " << e.what() << "\n";
        return 3;
    } catch (const fedqlstm::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
