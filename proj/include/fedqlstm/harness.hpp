#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fedqlstm/federated.hpp"
#include "fedqlstm/lstm.hpp"
#include "fedqlstm/optim.hpp"
#include "fedqlstm/qlstm.hpp"
#include "fedqlstm/serialize.hpp"
#include "fedqlstm/targets.hpp"

namespace fedqlstm {

// Experiment orchestration: configuration, the sliding-window convergence
// detector, the cost metric, end-to-end runs, sweeps and persistence.

inline constexpr std::uint64_t kStreamData = 0xDA7A5E7u;
inline constexpr std::uint64_t kStreamInit = 0x1A171u;

enum class ModelKind { Qlstm, ClassicalLstm };

inline std::string to_string(ModelKind kind) {
    return kind == ModelKind::Qlstm ? "qlstm" : "classical_lstm";
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "qlstm") return ModelKind::Qlstm;
    if (s == "classical_lstm") return ModelKind::ClassicalLstm;
    throw ConfigError("unknown model kind '" + s + "' (expected qlstm or classical_lstm)");
}

// ---------------------------------------------------------------------------
// Convergence detection

struct ConvergenceCriterion {
    int window_width = 5;
    double margin = 0.01;         // mean threshold factor
    double std_threshold = 0.01;  // standard-deviation threshold factor
    // When relative, thresholds are margin * L_ref and std_threshold * L_ref
    // with L_ref the first round's loss; otherwise they are absolute.
    bool relative = true;
};

// First 1-based round index whose trailing window satisfies both thresholds,
// or nullopt if the sequence never settles.
inline std::optional<int> detect_convergence(std::span<const double> losses,
                                             const ConvergenceCriterion& criterion) {
    if (criterion.window_width < 2)
        throw ConfigError("detect_convergence: window_width must be >= 2");
    const std::size_t w = static_cast<std::size_t>(criterion.window_width);
    if (losses.size() < w) return std::nullopt;

    const double ref = criterion.relative ? losses[0] : 1.0;
    const double mean_limit = criterion.margin * ref;
    const double std_limit = criterion.std_threshold * ref;

    for (std::size_t end = w; end <= losses.size(); ++end) {
        double mean = 0.0;
        for (std::size_t i = end - w; i < end; ++i) mean += losses[i];
        mean /= static_cast<double>(w);
        double var = 0.0;
        for (std::size_t i = end - w; i < end; ++i)
            var += (losses[i] - mean) * (losses[i] - mean);
        var /= static_cast<double>(w);
        if (mean <= mean_limit && std::sqrt(var) <= std_limit)
            return static_cast<int>(end);
    }
    return std::nullopt;
}

// Rounds until convergence times local epochs per round: the client-side cost
// of a federated run.
inline long overall_computations(int rounds, int epochs) {
    return static_cast<long>(rounds) * static_cast<long>(epochs);
}

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
    TargetSpec target;
    ModelKind model_kind = ModelKind::Qlstm;
    int num_clients = 5;
    int participation = 5;
    int num_qubits = 4;
    int num_layers = 2;
    int input_dim = 1;
    int hidden_dim = 3;
    int classical_hidden_dim = 4;
    int per_client_samples = 3000;
    double train_split = 0.67;
    int seq_len = 4;
    int local_epochs = 1;
    int batch_size = 4;
    OptimizerKind optimizer = OptimizerKind::RMSprop;
    double learning_rate = 0.01;
    OptimizerHyper hyper;
    int max_rounds = 100;
    int window_width = 5;
    double margin = 0.01;
    double std_threshold = 0.01;
    bool relative_thresholds = true;
    bool one_batch_per_epoch = false;
    bool sample_with_replacement = true;
    bool disjoint_ranges = false;
    bool parallel_clients = true;
    std::uint64_t master_seed = 42;
    std::string output_dir = "results";
    std::string label = "";

    void validate() const {
        target.validate(seq_len);
        if (num_clients < 1) throw ConfigError("config: num_clients must be >= 1");
        if (participation < 1 || participation > num_clients)
            throw ConfigError("config: participation must be in [1, num_clients]");
        if (model_kind == ModelKind::Qlstm)
            QlstmDims{input_dim, hidden_dim, num_qubits, num_layers}.validate();
        else
            LstmDims{input_dim, classical_hidden_dim}.validate();
        if (seq_len < 1) throw ConfigError("config: seq_len must be >= 1");
        if (local_epochs < 1) throw ConfigError("config: local_epochs must be >= 1");
        if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
        if (max_rounds < 0) throw ConfigError("config: max_rounds must be >= 0");
        if (window_width < 2) throw ConfigError("config: window_width must be >= 2");
        if (learning_rate < 0.0) throw ConfigError("config: learning_rate must be >= 0");
        if (margin <= 0.0 || std_threshold <= 0.0)
            throw ConfigError("config: thresholds must be positive");
    }

    ConvergenceCriterion criterion() const {
        return {window_width, margin, std_threshold, relative_thresholds};
    }

    std::string effective_label() const {
        if (!label.empty()) return label;
        return to_string(target.kind) + "-" + to_string(model_kind);
    }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
    return {{"target",
             {{"kind", to_string(c.target.kind)},
              {"order", c.target.order},
              {"x_min", c.target.x_min},
              {"x_max", c.target.x_max},
              {"num_points", c.target.num_points},
              {"amplitude", c.target.amplitude},
              {"frequency", c.target.frequency},
              {"phase", c.target.phase}}},
            {"model", to_string(c.model_kind)},
            {"num_clients", c.num_clients},
            {"participation", c.participation},
            {"num_qubits", c.num_qubits},
            {"num_layers", c.num_layers},
            {"input_dim", c.input_dim},
            {"hidden_dim", c.hidden_dim},
            {"classical_hidden_dim", c.classical_hidden_dim},
            {"per_client_samples", c.per_client_samples},
            {"train_split", c.train_split},
            {"seq_len", c.seq_len},
            {"local_epochs", c.local_epochs},
            {"batch_size", c.batch_size},
            {"optimizer", to_string(c.optimizer)},
            {"learning_rate", c.learning_rate},
            {"rmsprop_alpha", c.hyper.rmsprop_alpha},
            {"eps", c.hyper.eps},
            {"adam_beta1", c.hyper.adam_beta1},
            {"adam_beta2", c.hyper.adam_beta2},
            {"max_rounds", c.max_rounds},
            {"window_width", c.window_width},
            {"margin", c.margin},
            {"std_threshold", c.std_threshold},
            {"relative_thresholds", c.relative_thresholds},
            {"one_batch_per_epoch", c.one_batch_per_epoch},
            {"sample_with_replacement", c.sample_with_replacement},
            {"disjoint_ranges", c.disjoint_ranges},
            {"parallel_clients", c.parallel_clients},
            {"master_seed", c.master_seed},
            {"output_dir", c.output_dir},
            {"label", c.label}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("target")) {
        const auto& t = j.at("target");
        c.target.kind = target_kind_from_string(t.value("kind", to_string(c.target.kind)));
        c.target.order = t.value("order", c.target.order);
        c.target.x_min = t.value("x_min", c.target.x_min);
        c.target.x_max = t.value("x_max", c.target.x_max);
        c.target.num_points = t.value("num_points", c.target.num_points);
        c.target.amplitude = t.value("amplitude", c.target.amplitude);
        c.target.frequency = t.value("frequency", c.target.frequency);
        c.target.phase = t.value("phase", c.target.phase);
    }
    c.model_kind = model_kind_from_string(j.value("model", to_string(c.model_kind)));
    c.num_clients = j.value("num_clients", c.num_clients);
    c.participation = j.value("participation", std::min(c.participation, c.num_clients));
    c.num_qubits = j.value("num_qubits", c.num_qubits);
    c.num_layers = j.value("num_layers", c.num_layers);
    c.input_dim = j.value("input_dim", c.input_dim);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.classical_hidden_dim = j.value("classical_hidden_dim", c.classical_hidden_dim);
    c.per_client_samples = j.value("per_client_samples", c.per_client_samples);
    c.train_split = j.value("train_split", c.train_split);
    c.seq_len = j.value("seq_len", c.seq_len);
    c.local_epochs = j.value("local_epochs", c.local_epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.optimizer = optimizer_kind_from_string(j.value("optimizer", to_string(c.optimizer)));
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.hyper.rmsprop_alpha = j.value("rmsprop_alpha", c.hyper.rmsprop_alpha);
    c.hyper.eps = j.value("eps", c.hyper.eps);
    c.hyper.adam_beta1 = j.value("adam_beta1", c.hyper.adam_beta1);
    c.hyper.adam_beta2 = j.value("adam_beta2", c.hyper.adam_beta2);
    c.max_rounds = j.value("max_rounds", c.max_rounds);
    c.window_width = j.value("window_width", c.window_width);
    c.margin = j.value("margin", c.margin);
    c.std_threshold = j.value("std_threshold", c.std_threshold);
    c.relative_thresholds = j.value("relative_thresholds", c.relative_thresholds);
    c.one_batch_per_epoch = j.value("one_batch_per_epoch", c.one_batch_per_epoch);
    c.sample_with_replacement = j.value("sample_with_replacement", c.sample_with_replacement);
    c.disjoint_ranges = j.value("disjoint_ranges", c.disjoint_ranges);
    c.parallel_clients = j.value("parallel_clients", c.parallel_clients);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.label = j.value("label", c.label);
    return c;
}

// ---------------------------------------------------------------------------
// Experiment runner

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RoundRecord> rounds;
    std::optional<int> rounds_to_convergence;
    long overall_local_computations = 0;
    double final_test_loss = 0.0;
    double wall_clock_seconds = 0.0;
    nlohmann::json final_model;
};

namespace detail {

template <class Model>
ExperimentReport run_experiment_with(const ExperimentConfig& config, Model initial) {
    const auto t0 = std::chrono::steady_clock::now();

    const SequenceDataset dataset = build_dataset(config.target, config.seq_len);
    const PartitionOptions popts{config.train_split, config.sample_with_replacement,
                                 config.disjoint_ranges};
    const std::vector<Shard> shards =
        partition(dataset, config.num_clients, config.per_client_samples, popts,
                  derive_seed(config.master_seed, kStreamData));

    std::vector<Client<Model>> clients;
    clients.reserve(static_cast<std::size_t>(config.num_clients));
    for (int k = 0; k < config.num_clients; ++k)
        clients.push_back(Client<Model>{k, shards[static_cast<std::size_t>(k)].train,
                                        shards[static_cast<std::size_t>(k)].test, initial,
                                        Optimizer(config.optimizer, config.learning_rate,
                                                  config.hyper)});

    const ConvergenceCriterion criterion = config.criterion();
    TrainLoopOptions options;
    options.max_rounds = config.max_rounds;
    options.m_count = config.participation;
    options.local = {config.local_epochs, config.batch_size, config.one_batch_per_epoch};
    options.master_seed = config.master_seed;
    options.parallel_clients = config.parallel_clients;
    options.stop_after_round = [criterion](const std::vector<RoundRecord>& records) {
        std::vector<double> losses;
        losses.reserve(records.size());
        for (const RoundRecord& r : records) losses.push_back(r.global_test_loss);
        return detect_convergence(losses, criterion).has_value();
    };

    TrainResult result = run_training(clients, initial.flat_params(), options);

    ExperimentReport report;
    report.config = config;
    report.rounds = std::move(result.rounds);

    std::vector<double> losses;
    losses.reserve(report.rounds.size());
    for (const RoundRecord& r : report.rounds) losses.push_back(r.global_test_loss);
    report.rounds_to_convergence = detect_convergence(losses, criterion);
    const int rounds_used =
        report.rounds_to_convergence ? *report.rounds_to_convergence : config.max_rounds;
    report.overall_local_computations = overall_computations(rounds_used, config.local_epochs);
    report.final_test_loss = losses.empty() ? 0.0 : losses.back();

    initial.set_flat_params(result.global_params);
    report.final_model = to_json(initial);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    Rng init_rng(derive_seed(config.master_seed, kStreamInit));
    if (config.model_kind == ModelKind::Qlstm) {
        const QlstmDims dims{config.input_dim, config.hidden_dim, config.num_qubits,
                             config.num_layers};
        return detail::run_experiment_with(config, QlstmModel::init(dims, init_rng));
    }
    const LstmDims dims{config.input_dim, config.classical_hidden_dim};
    return detail::run_experiment_with(config, ClassicalLstmModel::init(dims, init_rng));
}

// ---------------------------------------------------------------------------
// Persistence. The per-round CSV carries a config echo header and no clock, so
// identical (config, seed) runs produce identical bytes.

inline void write_round_csv(const ExperimentReport& report, std::ostream& out) {
    out << "# fedqlstm.run.v1\n";
    out << "# config = " << to_json(report.config).dump() << "\n";
    out << "round,selected,per_client_train_loss,global_train_loss,global_test_loss\n";
    for (const RoundRecord& r : report.rounds) {
        out << r.round << ",";
        for (std::size_t i = 0; i < r.selected.size(); ++i)
            out << (i ? ";" : "") << r.selected[i];
        out << ",";
        for (std::size_t i = 0; i < r.per_client_train_loss.size(); ++i)
            out << (i ? ";" : "") << detail::format_double(r.per_client_train_loss[i]);
        out << "," << detail::format_double(r.global_train_loss) << ","
            << detail::format_double(r.global_test_loss) << "\n";
    }
}

// Long-format loss curves for plotting: one (round, series, value) row each.
inline void write_plot_csv(const ExperimentReport& report, std::ostream& out) {
    out << "round,series,value\n";
    for (const RoundRecord& r : report.rounds) {
        out << r.round << ",train," << detail::format_double(r.global_train_loss) << "\n";
        out << r.round << ",test," << detail::format_double(r.global_test_loss) << "\n";
        for (std::size_t i = 0; i < r.selected.size(); ++i)
            out << r.round << ",client_" << r.selected[i] << ","
                << detail::format_double(r.per_client_train_loss[i]) << "\n";
    }
}

inline nlohmann::json to_json(const ExperimentReport& report) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const RoundRecord& r : report.rounds)
        rounds.push_back({{"round", r.round},
                          {"selected", r.selected},
                          {"per_client_train_loss", r.per_client_train_loss},
                          {"global_train_loss", r.global_train_loss},
                          {"global_test_loss", r.global_test_loss}});
    nlohmann::json j{{"format", "fedqlstm.report.v1"},
                     {"config", to_json(report.config)},
                     {"rounds_to_convergence", nullptr},
                     {"overall_local_computations", report.overall_local_computations},
                     {"final_test_loss", report.final_test_loss},
                     {"wall_clock_seconds", report.wall_clock_seconds},
                     {"rounds", rounds},
                     {"final_model", report.final_model}};
    if (report.rounds_to_convergence) j["rounds_to_convergence"] = *report.rounds_to_convergence;
    return j;
}

// Files written per run: <stem>.csv, <stem>.report.json, <stem>.model.json and
// optionally <stem>.plot.csv.
inline std::filesystem::path write_report_files(const ExperimentReport& report,
                                                const std::filesystem::path& dir,
                                                bool emit_plot = false) {
    std::filesystem::create_directories(dir);
    const std::string stem =
        report.config.effective_label() + "-seed" + std::to_string(report.config.master_seed);

    std::ofstream csv(dir / (stem + ".csv"));
    write_round_csv(report, csv);

    std::ofstream json_out(dir / (stem + ".report.json"));
    json_out << to_json(report).dump(2) << "\n";

    std::ofstream model_out(dir / (stem + ".model.json"));
    model_out << report.final_model.dump(2) << "\n";

    if (emit_plot) {
        std::ofstream plot(dir / (stem + ".plot.csv"));
        write_plot_csv(report, plot);
    }
    return dir / (stem + ".report.json");
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
    ExperimentConfig base;
    std::vector<ModelKind> models;
    std::vector<int> epochs;
    std::vector<int> clients;
    std::vector<int> per_client_samples;
    std::vector<OptimizerKind> optimizers;
    std::vector<double> learning_rates;
    std::vector<std::uint64_t> seeds;
};

inline SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    SweepSpec spec;
    spec.base = experiment_config_from_json(j.value("base", nlohmann::json::object()));
    for (const auto& m : j.value("models", std::vector<std::string>{}))
        spec.models.push_back(model_kind_from_string(m));
    spec.epochs = j.value("epochs", std::vector<int>{});
    spec.clients = j.value("clients", std::vector<int>{});
    spec.per_client_samples = j.value("per_client_samples", std::vector<int>{});
    for (const auto& o : j.value("optimizers", std::vector<std::string>{}))
        spec.optimizers.push_back(optimizer_kind_from_string(o));
    spec.learning_rates = j.value("learning_rates", std::vector<double>{});
    spec.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    return spec;
}

struct SweepRow {
    std::string label;
    ModelKind model = ModelKind::Qlstm;
    int epochs = 1;
    int clients = 1;
    int per_client = 0;
    OptimizerKind optimizer = OptimizerKind::RMSprop;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
    bool converged = false;
    int rounds = 0;  // convergence round, or max_rounds when unconverged
    long computations = 0;
    double final_test_loss = 0.0;
    std::string error;
};

// Cartesian product over the supplied axes; axes left empty inherit the base
// config's single value. Failures are recorded per row and do not stop the
// sweep.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream* progress = nullptr) {
    auto models = spec.models.empty() ? std::vector<ModelKind>{spec.base.model_kind} : spec.models;
    auto epochs = spec.epochs.empty() ? std::vector<int>{spec.base.local_epochs} : spec.epochs;
    auto clients = spec.clients.empty() ? std::vector<int>{spec.base.num_clients} : spec.clients;
    auto per_client = spec.per_client_samples.empty()
                          ? std::vector<int>{spec.base.per_client_samples}
                          : spec.per_client_samples;
    auto optimizers = spec.optimizers.empty() ? std::vector<OptimizerKind>{spec.base.optimizer}
                                              : spec.optimizers;
    auto rates = spec.learning_rates.empty() ? std::vector<double>{spec.base.learning_rate}
                                             : spec.learning_rates;
    auto seeds =
        spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.master_seed} : spec.seeds;

    std::vector<SweepRow> rows;
    for (ModelKind model : models)
        for (int e : epochs)
            for (int k : clients)
                for (int n : per_client)
                    for (OptimizerKind opt : optimizers)
                        for (double lr : rates)
                            for (std::uint64_t seed : seeds) {
                                ExperimentConfig config = spec.base;
                                config.model_kind = model;
                                config.local_epochs = e;
                                config.num_clients = k;
                                // Full participation in the base config scales
                                // with the swept client count.
                                config.participation =
                                    spec.base.participation == spec.base.num_clients
                                        ? k
                                        : std::min(spec.base.participation, k);
                                config.per_client_samples = n;
                                config.optimizer = opt;
                                config.learning_rate = lr;
                                config.master_seed = seed;
                                config.label = to_string(config.target.kind) + "-" +
                                               to_string(model) + "-E" + std::to_string(e) +
                                               "-K" + std::to_string(k) + "-n" +
                                               std::to_string(n) + "-" + to_string(opt) + "-lr" +
                                               detail::format_double(lr);

                                SweepRow row;
                                row.label = config.label;
                                row.model = model;
                                row.epochs = e;
                                row.clients = k;
                                row.per_client = n;
                                row.optimizer = opt;
                                row.learning_rate = lr;
                                row.seed = seed;
                                if (progress)
                                    *progress << "sweep: " << row.label << " seed " << seed
                                              << "\n" << std::flush;
                                try {
                                    const ExperimentReport report = run_experiment(config);
                                    row.converged = report.rounds_to_convergence.has_value();
                                    row.rounds = report.rounds_to_convergence
                                                     ? *report.rounds_to_convergence
                                                     : config.max_rounds;
                                    row.computations = report.overall_local_computations;
                                    row.final_test_loss = report.final_test_loss;
                                } catch (const std::exception& err) {
                                    row.error = err.what();
                                }
                                rows.push_back(std::move(row));
                            }
    return rows;
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "label,model,epochs,clients,per_client,optimizer,learning_rate,seed,converged,"
           "rounds,overall_computations,final_test_loss,error\n";
    for (const SweepRow& r : rows) {
        out << r.label << "," << to_string(r.model) << "," << r.epochs << "," << r.clients << ","
            << r.per_client << "," << to_string(r.optimizer) << ","
            << detail::format_double(r.learning_rate) << "," << r.seed << ","
            << (r.converged ? 1 : 0) << "," << r.rounds << "," << r.computations << ","
            << detail::format_double(r.final_test_loss) << "," << r.error << "\n";
    }
}

// ---------------------------------------------------------------------------
// Report aggregation (the `report` CLI subcommand)

struct ReportDigest {
    std::string file;
    std::string label;
    ModelKind model = ModelKind::Qlstm;
    TargetKind target = TargetKind::BesselJ;
    int epochs = 1;
    int clients = 1;
    OptimizerKind optimizer = OptimizerKind::RMSprop;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
    bool converged = false;
    int rounds = 0;
    long computations = 0;
    double final_test_loss = 0.0;

    // Everything except the seed; the grouping key for medians.
    std::string group_key() const {
        return to_string(target) + "/" + to_string(model) + "/E" + std::to_string(epochs) + "/K" +
               std::to_string(clients) + "/" + to_string(optimizer) + "/lr" +
               detail::format_double(learning_rate);
    }
};

inline ReportDigest digest_report(const nlohmann::json& j, const std::string& file) {
    const ExperimentConfig config = experiment_config_from_json(j.at("config"));
    ReportDigest d;
    d.file = file;
    d.label = config.effective_label();
    d.model = config.model_kind;
    d.target = config.target.kind;
    d.epochs = config.local_epochs;
    d.clients = config.num_clients;
    d.optimizer = config.optimizer;
    d.learning_rate = config.learning_rate;
    d.seed = config.master_seed;
    d.converged = !j.at("rounds_to_convergence").is_null();
    d.rounds = d.converged ? j.at("rounds_to_convergence").get<int>() : config.max_rounds;
    d.computations = j.at("overall_local_computations").get<long>();
    d.final_test_loss = j.at("final_test_loss").get<double>();
    return d;
}

inline std::vector<ReportDigest> load_reports(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("report: '" + dir.string() + "' is not a directory");
    std::vector<ReportDigest> digests;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().string().ends_with(".report.json")) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path);
        nlohmann::json j;
        in >> j;
        digests.push_back(digest_report(j, path.filename().string()));
    }
    return digests;
}

inline double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline void print_comparison(const std::vector<ReportDigest>& digests, std::ostream& out) {
    out << "runs:\n";
    for (const ReportDigest& d : digests) {
        out << "  " << d.file << ": " << d.group_key() << " seed=" << d.seed
            << (d.converged ? " converged at " : " not converged, capped at ") << d.rounds
            << " rounds, " << d.computations << " computations, final test loss "
            << d.final_test_loss << "\n";
    }

    std::vector<std::string> keys;
    for (const ReportDigest& d : digests)
        if (std::find(keys.begin(), keys.end(), d.group_key()) == keys.end())
            keys.push_back(d.group_key());

    out << "medians by setting:\n";
    for (const std::string& key : keys) {
        std::vector<double> rounds, computations;
        int count = 0;
        for (const ReportDigest& d : digests)
            if (d.group_key() == key) {
                rounds.push_back(static_cast<double>(d.rounds));
                computations.push_back(static_cast<double>(d.computations));
                ++count;
            }
        out << "  " << key << ": seeds=" << count << " median_rounds=" << median(rounds)
            << " median_computations=" << median(computations) << "\n";
    }
}

}  // namespace fedqlstm
