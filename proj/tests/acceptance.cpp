// Acceptance suite. Runs each criterion group at its stated tolerance and
// prints one PASS/FAIL line per criterion; exits nonzero if any line failed.
//
// Usage: acceptance [criterion...]   e.g. `acceptance 1 2 3 5` runs only the
// fast groups. With no arguments every criterion runs, including the
// directional experiment battery (group 4), which trains real models and
// takes the better part of an hour on one core.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fedqlstm/fedqlstm.hpp"
#include "oracles.hpp"

using namespace fedqlstm;

namespace {

int g_failures = 0;

void line(const std::string& tag, bool ok, const std::string& detail) {
    std::printf("[%s] %s %s\n", tag.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

GateOp random_gate(Rng& rng, int num_qubits) {
    const auto pick = rng.below(num_qubits >= 2 ? 4 : 3);
    const int target = static_cast<int>(rng.below(num_qubits));
    switch (pick) {
        case 0: return GateOp::ry(target, rng.uniform(-3.0, 3.0));
        case 1: return GateOp::rz(target, rng.uniform(-3.0, 3.0));
        case 2:
            return GateOp::rot(target, rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0),
                               rng.uniform(-3.0, 3.0));
        default: {
            int control = static_cast<int>(rng.below(num_qubits));
            while (control == target) control = static_cast<int>(rng.below(num_qubits));
            return GateOp::cnot(control, target);
        }
    }
}

// --------------------------------------------------------------------------
// 1. Numerical core

void criterion1() {
    {  // 1a: statevector vs dense Kronecker oracle
        Rng rng(0xACC1Au);
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const int num_qubits = 1 + static_cast<int>(rng.below(4));
            const int num_gates = 1 + static_cast<int>(rng.below(30));
            std::vector<GateOp> gates;
            for (int g = 0; g < num_gates; ++g) gates.push_back(random_gate(rng, num_qubits));
            StateVector s = zero_state(num_qubits);
            for (const GateOp& g : gates) apply_gate_inplace(s, g);
            const auto psi = oracle::run_circuit_dense(gates, num_qubits);
            for (std::size_t i = 0; i < psi.size(); ++i)
                worst = std::max(worst, std::abs(s.amplitudes[i] - psi[i]));
        }
        line("1a", worst < 1e-12,
             "statevector vs dense oracle, 200 circuits: max deviation " + fmt(worst) +
                 " (< 1e-12)");
    }
    {  // 1b: parameter-shift vs finite differences, per Jacobian entry
        Rng rng(0xACC1Bu);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const VqcConfig config{4, 2, 4, 4};
            VqcParams params = VqcParams::zeros(config);
            for (double& a : params.angles) a = rng.uniform(-1.5, 1.5);
            std::vector<double> x(4);
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
            for (int k = 0; k < 4; ++k) {
                std::vector<double> upstream(4, 0.0);
                upstream[static_cast<std::size_t>(k)] = 1.0;
                const auto grad = vqc_param_grad(x, params, config, upstream);
                VqcParams shifted = params;
                for (std::size_t j = 0; j < params.angles.size(); ++j) {
                    const auto fd = oracle::central_diff(
                        [&](double v) {
                            shifted.angles[j] = v;
                            return vqc_forward(x, shifted, config)[static_cast<std::size_t>(k)];
                        },
                        params.angles[j]);
                    shifted.angles[j] = params.angles[j];
                    worst = std::max(worst, oracle::rel_err(grad.angles[j], fd));
                }
            }
        }
        line("1b", worst < 1e-4,
             "parameter-shift vs finite differences, 20 instances: max rel err " + fmt(worst) +
                 " (< 1e-4)");
    }
    {  // 1c: end-to-end QLSTM loss gradient vs finite differences
        Rng rng(0xACC1Cu);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            QlstmModel model = QlstmModel::init({}, rng);
            std::vector<double> seq(3);
            for (double& v : seq) v = rng.uniform(-1.0, 1.0);
            const double target = rng.uniform(-1.0, 1.0);
            const auto grad = backward_sequence(model, seq, target).flatten();
            auto flat = model.flat_params();
            for (std::size_t j = 0; j < flat.size(); ++j) {
                const double orig = flat[j];
                const auto fd = oracle::central_diff(
                    [&](double v) {
                        flat[j] = v;
                        model.set_flat_params(flat);
                        const double y = forward_sequence(model, seq);
                        return (y - target) * (y - target);
                    },
                    orig);
                flat[j] = orig;
                model.set_flat_params(flat);
                worst = std::max(worst, oracle::rel_err(grad[j], fd));
            }
        }
        line("1c", worst < 1e-3,
             "QLSTM loss gradient vs finite differences, 10 instances: max rel err " +
                 fmt(worst) + " (< 1e-3)");
    }
    {  // 1d: series vs extended-precision oracle
        Rng rng(0xACC1Du);
        double worst_b = 0.0, worst_s = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double order = static_cast<double>(rng.below(4));
            const double x = rng.uniform(0.0, 20.0);
            worst_b = std::max(worst_b, std::fabs(bessel_j(order, x) -
                                                  static_cast<double>(
                                                      oracle::bessel_j_series(order, x))));
            worst_s = std::max(worst_s, std::fabs(struve_h(order, x) -
                                                  static_cast<double>(
                                                      oracle::struve_h_series(order, x))));
        }
        line("1d", worst_b < 1e-9 && worst_s < 1e-9,
             "bessel_j/struve_h vs extended-precision oracle, 100 points: max abs err " +
                 fmt(worst_b) + " / " + fmt(worst_s) + " (< 1e-9)");
    }
    {  // 1e: Bessel three-term recurrence
        double worst = 0.0;
        for (const double alpha : {1.0, 2.0, 3.0})
            for (double x = 0.25; x <= 20.0; x += 0.25)
                worst = std::max(worst, std::fabs(bessel_j(alpha - 1.0, x) +
                                                  bessel_j(alpha + 1.0, x) -
                                                  (2.0 * alpha / x) * bessel_j(alpha, x)));
        line("1e", worst < 1e-8,
             "Bessel three-term recurrence: max residual " + fmt(worst) + " (< 1e-8)");
    }
}

// --------------------------------------------------------------------------
// 2. Protocol algebra

ExperimentConfig small_default(std::uint64_t seed) {
    // Default setup shape (5 clients, 4 qubits, RMSprop lr 0.01, B = 4) at a
    // reduced sample count so the whole group stays inside its runtime budget.
    ExperimentConfig config;
    config.per_client_samples = 120;
    config.max_rounds = 3;
    config.master_seed = seed;
    config.output_dir = "";
    return config;
}

void criterion2() {
    {  // 2a: aggregation algebra
        bool ok = aggregate({{1.0, 3.0}, {3.0, 5.0}}) == std::vector<double>{2.0, 4.0};

        Rng rng(0xACC2Au);
        std::vector<std::vector<double>> list(5, std::vector<double>(149));
        for (auto& p : list)
            for (double& v : p) v = rng.uniform(-3.0, 3.0);
        auto permuted = list;
        std::rotate(permuted.begin(), permuted.begin() + 2, permuted.end());
        std::swap(permuted[0], permuted[1]);
        ok = ok && aggregate(list) == aggregate(permuted);

        for (const int k : {2, 3, 5, 7}) {
            std::vector<std::vector<double>> copies(static_cast<std::size_t>(k), list[0]);
            ok = ok && aggregate(copies) == list[0];
        }
        line("2a", ok, "aggregate: mean example, permutation invariance, k-copies identity (exact)");
    }
    {  // 2b: lr = 0 fixed point
        ExperimentConfig config = small_default(11);
        config.learning_rate = 0.0;
        config.max_rounds = 5;
        const ExperimentReport report = run_experiment(config);
        double worst = 0.0;
        for (const RoundRecord& r : report.rounds)
            worst = std::max(worst,
                             std::fabs(r.global_test_loss - report.rounds[0].global_test_loss));
        line("2b", report.rounds.size() == 5 && worst <= 1e-12,
             "lr = 0 fixed point over 5 rounds: max test-loss drift " + fmt(worst) +
                 " (<= 1e-12)");
    }
    {  // 2c: full-run determinism
        const ExperimentConfig config = small_default(12);
        std::ostringstream a, b;
        write_round_csv(run_experiment(config), a);
        write_round_csv(run_experiment(config), b);
        line("2c", !a.str().empty() && a.str() == b.str(),
             "identical config and seed give byte-identical round CSVs");
    }
}

// --------------------------------------------------------------------------
// 3. Convergence detector

std::optional<int> detect_oracle(const std::vector<double>& losses,
                                 const ConvergenceCriterion& crit) {
    if (losses.size() < static_cast<std::size_t>(crit.window_width)) return std::nullopt;
    const double ref = crit.relative ? losses[0] : 1.0;
    const std::size_t w = static_cast<std::size_t>(crit.window_width);
    for (std::size_t end = w; end <= losses.size(); ++end) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = end - w; i < end; ++i) mean += losses[i];
        mean /= static_cast<double>(w);
        for (std::size_t i = end - w; i < end; ++i)
            var += (losses[i] - mean) * (losses[i] - mean);
        if (mean <= crit.margin * ref &&
            std::sqrt(var / static_cast<double>(w)) <= crit.std_threshold * ref)
            return static_cast<int>(end);
    }
    return std::nullopt;
}

void criterion3() {
    Rng rng(0xACC3u);
    int mismatches = 0;
    int monotonicity_breaks = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(50));
        std::vector<double> losses(static_cast<std::size_t>(n));
        for (double& v : losses) v = rng.uniform(0.0, 1.0) * std::pow(0.5, rng.below(14));
        const ConvergenceCriterion crit{2 + static_cast<int>(rng.below(7)),
                                        rng.uniform(0.001, 1.5), rng.uniform(0.001, 1.5),
                                        rng.below(2) == 0};
        const auto got = detect_convergence(losses, crit);
        if (got != detect_oracle(losses, crit)) ++mismatches;

        ConvergenceCriterion wider = crit;
        wider.margin *= 1.0 + rng.uniform(0.0, 3.0);
        wider.std_threshold *= 1.0 + rng.uniform(0.0, 3.0);
        const auto relaxed = detect_convergence(losses, wider);
        if (got.has_value() && (!relaxed.has_value() || *relaxed > *got)) ++monotonicity_breaks;
    }
    line("3", mismatches == 0 && monotonicity_breaks == 0,
         "detector vs brute-force scan on 1000 random sequences: " + std::to_string(mismatches) +
             " mismatches, " + std::to_string(monotonicity_breaks) + " monotonicity breaks");
}

// --------------------------------------------------------------------------
// 4. Directional claims at desk scale

struct GroupKey {
    TargetKind target;
    ModelKind model;
    int epochs;
    int clients;
    bool operator<(const GroupKey& o) const {
        return std::tie(target, model, epochs, clients) <
               std::tie(o.target, o.model, o.epochs, o.clients);
    }
};

struct GroupResult {
    std::vector<std::uint64_t> seeds;
    std::vector<int> rounds;       // convergence round, or max_rounds when unconverged
    std::vector<long> computations;
    std::vector<double> final_losses;
};

constexpr int kDeskMaxRounds = 60;

ExperimentConfig desk_config(const GroupKey& key, std::uint64_t seed) {
    ExperimentConfig config;
    switch (key.target) {
        case TargetKind::BesselJ:
            config.target = {TargetKind::BesselJ, 2.0, 0.0, 20.0, 1000, 1.0, 1.0, 0.0};
            break;
        case TargetKind::Sinusoid:
            config.target = {TargetKind::Sinusoid, 0.0, 0.0, 4.0 * std::numbers::pi, 1000,
                             1.0, 1.0, 0.0};
            break;
        case TargetKind::StruveH:
            config.target = {TargetKind::StruveH, 0.0, 0.0, 20.0, 1000, 1.0, 1.0, 0.0};
            break;
    }
    config.model_kind = key.model;
    config.local_epochs = key.epochs;
    config.num_clients = key.clients;
    config.participation = key.clients;
    config.per_client_samples = 300;
    config.seq_len = 4;
    config.max_rounds = kDeskMaxRounds;
    config.relative_thresholds = true;
    config.margin = 0.01;
    config.std_threshold = 0.01;
    config.master_seed = seed;
    config.output_dir = "";
    return config;
}

std::string group_name(const GroupKey& key) {
    return to_string(key.target) + " " + to_string(key.model) + " E" +
           std::to_string(key.epochs) + " K" + std::to_string(key.clients);
}

std::map<GroupKey, GroupResult> g_groups;

// Runs any seeds the group does not have yet, up to seed count n.
const GroupResult& group_runs(const GroupKey& key, int n) {
    GroupResult& result = g_groups[key];
    while (static_cast<int>(result.seeds.size()) < n) {
        const std::uint64_t seed = result.seeds.size() + 1;
        const ExperimentConfig config = desk_config(key, seed);
        std::fprintf(stderr, "  running %s seed %llu ...\n", group_name(key).c_str(),
                     static_cast<unsigned long long>(seed));
        const ExperimentReport report = run_experiment(config);
        result.seeds.push_back(seed);
        result.rounds.push_back(report.rounds_to_convergence ? *report.rounds_to_convergence
                                                             : config.max_rounds);
        result.computations.push_back(report.overall_local_computations);
        result.final_losses.push_back(report.final_test_loss);
    }
    return result;
}

std::string table(const GroupResult& result, int n) {
    std::ostringstream out;
    out << "rounds=[";
    for (int i = 0; i < n; ++i) out << (i ? " " : "") << result.rounds[static_cast<std::size_t>(i)];
    out << "] computations=[";
    for (int i = 0; i < n; ++i)
        out << (i ? " " : "") << result.computations[static_cast<std::size_t>(i)];
    out << "]";
    return out.str();
}

double median_of(const std::vector<int>& values, int n) {
    std::vector<double> v(values.begin(), values.begin() + n);
    return median(std::move(v));
}

double median_of(const std::vector<long>& values, int n) {
    std::vector<double> v(values.begin(), values.begin() + n);
    return median(std::move(v));
}

// Evaluates `check` on medians over 3 seeds, escalating to 7 on failure.
void directional(const std::string& tag, const std::string& title, const GroupKey& a,
                 const GroupKey& b,
                 const std::function<bool(const GroupResult&, const GroupResult&, int)>& check,
                 const std::function<std::string(const GroupResult&, const GroupResult&, int)>&
                     describe) {
    int n = 3;
    group_runs(a, n);
    group_runs(b, n);
    bool ok = check(g_groups[a], g_groups[b], n);
    if (!ok) {
        std::fprintf(stderr, "  %s failed at 3 seeds, escalating to 7\n", tag.c_str());
        n = 7;
        group_runs(a, n);
        group_runs(b, n);
        ok = check(g_groups[a], g_groups[b], n);
    }
    line(tag, ok, title + ": " + describe(g_groups[a], g_groups[b], n) + " [seeds=" +
                      std::to_string(n) + "]");
    std::printf("      %s: %s\n", group_name(a).c_str(), table(g_groups[a], n).c_str());
    std::printf("      %s: %s\n", group_name(b).c_str(), table(g_groups[b], n).c_str());
    std::fflush(stdout);
}

void criterion4() {
    std::printf("    (desk scale: per_client=300, seq_len=4, 4 qubits, relative thresholds,\n"
                "     margin=std=0.01, cap %d rounds; unconverged runs count as the cap)\n",
                kDeskMaxRounds);

    const auto fewer_rounds = [](const GroupResult& a, const GroupResult& b, int n) {
        return median_of(a.rounds, n) < median_of(b.rounds, n);
    };
    const auto rounds_text = [](const GroupResult& a, const GroupResult& b, int n) {
        return "median rounds " + fmt(median_of(a.rounds, n)) + " vs " +
               fmt(median_of(b.rounds, n));
    };

    directional("4a", "Bessel: FedQLSTM rounds-to-convergence < classical at E=1",
                {TargetKind::BesselJ, ModelKind::Qlstm, 1, 5},
                {TargetKind::BesselJ, ModelKind::ClassicalLstm, 1, 5}, fewer_rounds, rounds_text);

    directional(
        "4b", "Bessel: FedQLSTM overall computations at E=1 <= at E=2",
        {TargetKind::BesselJ, ModelKind::Qlstm, 1, 5},
        {TargetKind::BesselJ, ModelKind::Qlstm, 2, 5},
        [](const GroupResult& a, const GroupResult& b, int n) {
            return median_of(a.computations, n) <= median_of(b.computations, n);
        },
        [](const GroupResult& a, const GroupResult& b, int n) {
            return "median computations " + fmt(median_of(a.computations, n)) + " vs " +
                   fmt(median_of(b.computations, n));
        });

    directional("4c-sinusoid", "sinusoid: FedQLSTM rounds-to-convergence < classical at E=1",
                {TargetKind::Sinusoid, ModelKind::Qlstm, 1, 5},
                {TargetKind::Sinusoid, ModelKind::ClassicalLstm, 1, 5}, fewer_rounds,
                rounds_text);

    directional("4c-struve", "Struve: FedQLSTM rounds-to-convergence < classical at E=1",
                {TargetKind::StruveH, ModelKind::Qlstm, 1, 5},
                {TargetKind::StruveH, ModelKind::ClassicalLstm, 1, 5}, fewer_rounds, rounds_text);

    directional("4d", "Bessel: FedQLSTM rounds-to-convergence with K=10 < with K=5 at E=1",
                {TargetKind::BesselJ, ModelKind::Qlstm, 1, 10},
                {TargetKind::BesselJ, ModelKind::Qlstm, 1, 5}, fewer_rounds, rounds_text);
}

// --------------------------------------------------------------------------
// 5. Parameter-count claim

void criterion5() {
    const QlstmModel qlstm = QlstmModel::zeros({});
    const ClassicalLstmModel classical = ClassicalLstmModel::zeros({1, 4});
    const std::size_t q = qlstm.param_count();
    const std::size_t c = classical.param_count();
    line("5", q < c,
         "QLSTM parameter count " + std::to_string(q) +
             " < classical LSTM count at hidden=4 which is " + std::to_string(c));
    // Context: where the textbook LSTM actually crosses the QLSTM count.
    for (int h = 4; h <= 8; ++h) {
        const ClassicalLstmModel m = ClassicalLstmModel::zeros({1, h});
        std::printf("      classical hidden=%d -> %zu parameters%s\n", h, m.param_count(),
                    m.param_count() > q ? " (exceeds QLSTM)" : "");
    }
    std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
    std::set<std::string> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(argv[i]);
    const auto run = [&](const std::string& name) {
        return wanted.empty() || wanted.count(name) > 0;
    };

    if (run("1")) criterion1();
    if (run("2")) criterion2();
    if (run("3")) criterion3();
    if (run("4")) criterion4();
    if (run("5")) criterion5();

    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion line(s) failed\n", g_failures);
    return 1;
}
