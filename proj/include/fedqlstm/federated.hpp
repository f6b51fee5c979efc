#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "fedqlstm/errors.hpp"
#include "fedqlstm/optim.hpp"
#include "fedqlstm/rng.hpp"
#include "fedqlstm/targets.hpp"

namespace fedqlstm {

// Federated averaging loop: select clients, broadcast the global parameters,
// train locally for E epochs in mini-batches of B, replace the global model
// with the unweighted mean of the returned parameters. Clients within a round
// are independent and run on their own derived RNG streams, so the result is
// identical whether they execute serially or in parallel.

// Stream labels for derive_seed.
inline constexpr std::uint64_t kStreamSelect = 0x5E1Eu;
inline constexpr std::uint64_t kStreamLocal = 0x10CA1u;

struct RoundRecord {
    int round = 0;  // 1-based
    std::vector<int> selected;
    std::vector<double> per_client_train_loss;  // aligned with selected
    double global_train_loss = 0.0;             // mean over selected
    double global_test_loss = 0.0;              // mean over all clients, new global model
};

template <class Model>
struct Client {
    int id = 0;
    std::vector<Sample> train_set;
    std::vector<Sample> test_set;
    Model model;
    Optimizer optimizer;
};

inline std::vector<int> select_clients(int num_clients, int m_count, Rng& rng) {
    if (m_count < 1 || m_count > num_clients)
        throw ConfigError("select_clients: m_count must be in [1, num_clients]");
    std::vector<int> picked = rng.sample_without_replacement(num_clients, m_count);
    std::sort(picked.begin(), picked.end());
    return picked;
}

// Unweighted element-wise mean. Accumulation runs in extended precision and
// divides by the count, so averaging k identical replicas returns the replica
// bit-exactly (the exact sum k*theta fits the wider mantissa for k <= 2^11).
inline std::vector<double> aggregate(const std::vector<std::vector<double>>& params_list) {
    if (params_list.empty()) throw ShapeError("aggregate: empty parameter list");
    const std::size_t n = params_list.front().size();
    for (const auto& p : params_list)
        if (p.size() != n) throw ShapeError("aggregate: mismatched parameter shapes");
    std::vector<double> mean(n, 0.0);
    const long double count = static_cast<long double>(params_list.size());
    for (std::size_t i = 0; i < n; ++i) {
        long double acc = 0.0L;
        for (const auto& p : params_list) acc += static_cast<long double>(p[i]);
        mean[i] = static_cast<double>(acc / count);
    }
    return mean;
}

struct LocalTrainOptions {
    int epochs = 1;
    int batch_size = 4;
    bool one_batch_per_epoch = false;  // literal one-batch-per-epoch reading
};

// Resets the client model to the global parameters, trains in place, and
// returns the last epoch's mean training loss. Gradient summation order within
// a batch is fixed (dataset order), so results do not depend on scheduling.
template <class Model>
double local_train(Client<Model>& client, const std::vector<double>& global_params,
                   const LocalTrainOptions& options, Rng& rng) {
    if (client.train_set.empty())
        throw ConfigError("local_train: client " + std::to_string(client.id) +
                          " has no training data");
    if (options.epochs < 1) throw ConfigError("local_train: epochs must be >= 1");
    if (options.batch_size < 1) throw ConfigError("local_train: batch_size must be >= 1");

    client.model.set_flat_params(global_params);
    std::vector<double> params = global_params;
    const ParamLayout layout = client.model.param_layout();
    const std::size_t n = client.train_set.size();
    const std::size_t batch = static_cast<std::size_t>(options.batch_size);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> grad_acc(params.size());
    double last_epoch_loss = 0.0;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        const std::size_t epoch_samples = options.one_batch_per_epoch ? std::min(batch, n) : n;

        double loss_sum = 0.0;
        std::size_t at = 0;
        while (at < epoch_samples) {
            const std::size_t take = std::min(batch, epoch_samples - at);
            std::fill(grad_acc.begin(), grad_acc.end(), 0.0);
            for (std::size_t b = 0; b < take; ++b) {
                const Sample& s = client.train_set[order[at + b]];
                const auto result = client.model.loss_and_grad(s.window, s.target);
                loss_sum += result.loss;
                for (std::size_t j = 0; j < grad_acc.size(); ++j) grad_acc[j] += result.grad[j];
            }
            const double inv = 1.0 / static_cast<double>(take);
            for (double& g : grad_acc) g *= inv;
            client.optimizer.step(params, grad_acc, &layout);
            client.model.set_flat_params(params);
            at += take;
        }
        last_epoch_loss = loss_sum / static_cast<double>(epoch_samples);
    }
    return last_epoch_loss;
}

template <class Model>
double mean_loss(const Model& model, const std::vector<Sample>& samples) {
    if (samples.empty()) throw ConfigError("mean_loss: empty sample set");
    double acc = 0.0;
    for (const Sample& s : samples) {
        const double r = model.predict(s.window) - s.target;
        acc += r * r;
    }
    return acc / static_cast<double>(samples.size());
}

struct TrainLoopOptions {
    int max_rounds = 1;
    int m_count = 0;  // 0 means all clients every round
    LocalTrainOptions local;
    std::uint64_t master_seed = 0;
    bool parallel_clients = true;
    // Called after each round with the records so far; return true to stop.
    std::function<bool(const std::vector<RoundRecord>&)> stop_after_round;
};

struct TrainResult {
    std::vector<RoundRecord> rounds;
    std::vector<double> global_params;
};

template <class Model>
TrainResult run_training(std::vector<Client<Model>>& clients,
                         const std::vector<double>& initial_global,
                         const TrainLoopOptions& options) {
    if (clients.empty()) throw ConfigError("run_training: no clients");
    const int num_clients = static_cast<int>(clients.size());
    const int m_count = options.m_count == 0 ? num_clients : options.m_count;
    if (options.max_rounds < 0) throw ConfigError("run_training: max_rounds must be >= 0");

    TrainResult result;
    result.global_params = initial_global;

    for (int round = 1; round <= options.max_rounds; ++round) {
        Rng select_rng(derive_seed(options.master_seed, kStreamSelect,
                                   static_cast<std::uint64_t>(round)));
        RoundRecord record;
        record.round = round;
        record.selected = select_clients(num_clients, m_count, select_rng);

        const std::size_t m = record.selected.size();
        std::vector<std::vector<double>> returned(m);
        record.per_client_train_loss.assign(m, 0.0);
        std::vector<std::exception_ptr> errors(m);

        auto train_one = [&](std::size_t slot) {
            Client<Model>& client = clients[static_cast<std::size_t>(record.selected[slot])];
            try {
                Rng rng(derive_seed(options.master_seed, kStreamLocal,
                                    static_cast<std::uint64_t>(round),
                                    static_cast<std::uint64_t>(client.id)));
                record.per_client_train_loss[slot] =
                    local_train(client, result.global_params, options.local, rng);
                returned[slot] = client.model.flat_params();
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        };

        if (options.parallel_clients && m > 1) {
            std::vector<std::thread> workers;
            workers.reserve(m);
            for (std::size_t slot = 0; slot < m; ++slot) workers.emplace_back(train_one, slot);
            for (auto& w : workers) w.join();
        } else {
            for (std::size_t slot = 0; slot < m; ++slot) train_one(slot);
        }
        for (std::size_t slot = 0; slot < m; ++slot) {
            if (!errors[slot]) continue;
            try {
                std::rethrow_exception(errors[slot]);
            } catch (const std::exception& e) {
                throw std::runtime_error("round " + std::to_string(round) + ", client " +
                                         std::to_string(record.selected[slot]) + ": " + e.what());
            }
        }

        result.global_params = aggregate(returned);

        double train_acc = 0.0;
        for (double loss : record.per_client_train_loss) train_acc += loss;
        record.global_train_loss = train_acc / static_cast<double>(m);
        if (!std::isfinite(record.global_train_loss))
            throw NumericError("round " + std::to_string(round) + ": non-finite training loss");

        // Test loss of the new global model, averaged over every client's
        // test set (participants and non-participants alike).
        double test_acc = 0.0;
        for (Client<Model>& client : clients) {
            client.model.set_flat_params(result.global_params);
            test_acc += mean_loss(client.model, client.test_set);
        }
        record.global_test_loss = test_acc / static_cast<double>(num_clients);
        if (!std::isfinite(record.global_test_loss))
            throw NumericError("round " + std::to_string(round) + ": non-finite test loss");

        result.rounds.push_back(std::move(record));
        if (options.stop_after_round && options.stop_after_round(result.rounds)) break;
    }
    return result;
}

}  // namespace fedqlstm
