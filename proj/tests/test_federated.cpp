#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "fedqlstm/federated.hpp"
#include "fedqlstm/qlstm.hpp"
#include "fedqlstm/rng.hpp"

using namespace fedqlstm;

namespace {

// Tiny dataset and model so the protocol tests stay fast.
std::vector<Sample> tiny_samples(Rng& rng, int n) {
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        Sample s;
        s.window = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        s.target = rng.uniform(-1.0, 1.0);
        s.grid_index = i;
        out.push_back(std::move(s));
    }
    return out;
}

Client<QlstmModel> make_client(int id, Rng& rng, OptimizerKind kind, double lr, int n_train = 6,
                               int n_test = 3) {
    const QlstmDims dims{1, 1, 2, 1};
    return Client<QlstmModel>{id, tiny_samples(rng, n_train), tiny_samples(rng, n_test),
                              QlstmModel::init(dims, rng), Optimizer(kind, lr)};
}

}  // namespace

TEST_CASE("select_clients") {
    Rng rng(0xA1u);

    SECTION("full participation selects everyone") {
        const auto picked = select_clients(5, 5, rng);
        CHECK(picked == std::vector<int>{0, 1, 2, 3, 4});
    }

    SECTION("single selection is in range") {
        for (int i = 0; i < 20; ++i) {
            const auto picked = select_clients(5, 1, rng);
            REQUIRE(picked.size() == 1);
            CHECK(picked[0] >= 0);
            CHECK(picked[0] < 5);
        }
    }

    SECTION("same seed, same subsets") {
        Rng a(42), b(42);
        for (int i = 0; i < 10; ++i) CHECK(select_clients(7, 3, a) == select_clients(7, 3, b));
    }

    SECTION("m_count out of range") {
        CHECK_THROWS_AS(select_clients(5, 0, rng), ConfigError);
        CHECK_THROWS_AS(select_clients(5, 6, rng), ConfigError);
    }
}

TEST_CASE("aggregate is the element-wise mean") {
    CHECK(aggregate({{1.0, 3.0}, {3.0, 5.0}}) == std::vector<double>{2.0, 4.0});
    CHECK(aggregate({{0.5, -1.5}}) == std::vector<double>{0.5, -1.5});

    SECTION("permutation invariance") {
        const std::vector<std::vector<double>> list{{1.0, 2.0}, {5.0, -4.0}, {0.25, 0.75}};
        auto permuted = list;
        std::swap(permuted[0], permuted[2]);
        CHECK(aggregate(list) == aggregate(permuted));
    }

    SECTION("k copies collapse to the copy exactly") {
        const std::vector<double> theta{0.1, -0.7, 3.14159, 1e-9};
        CHECK(aggregate({theta, theta, theta}) == theta);
        CHECK(aggregate({theta, theta, theta, theta, theta}) == theta);
    }

    SECTION("shape mismatch") {
        CHECK_THROWS_AS(aggregate({{1.0}, {1.0, 2.0}}), ShapeError);
        CHECK_THROWS_AS(aggregate({}), ShapeError);
    }
}

TEST_CASE("local_train with zero learning rate is a no-op on parameters") {
    Rng rng(0xB2u);
    auto client = make_client(0, rng, OptimizerKind::SGD, 0.0);
    const auto global = QlstmModel::init(client.model.dims, rng).flat_params();

    Rng train_rng(7);
    const LocalTrainOptions options{1, static_cast<int>(client.train_set.size()), false};
    const double loss = local_train(client, global, options, train_rng);

    CHECK(client.model.flat_params() == global);

    // Loss equals the dataset mean squared error under the global parameters.
    QlstmModel probe = client.model;
    probe.set_flat_params(global);
    CHECK(loss == Catch::Approx(mean_loss(probe, client.train_set)).margin(1e-12));
}

TEST_CASE("epoch loop performs exactly E * ceil(n/B) optimizer steps") {
    Rng rng(0xC3u);
    auto client = make_client(0, rng, OptimizerKind::SGD, 0.01, 7);
    const auto global = client.model.flat_params();
    Rng train_rng(9);
    local_train(client, global, {2, 3, false}, train_rng);
    CHECK(client.optimizer.step_count() == 2 * 3);  // ceil(7/3) = 3 per epoch

    auto client2 = make_client(1, rng, OptimizerKind::SGD, 0.01, 7);
    Rng train_rng2(9);
    local_train(client2, client2.model.flat_params(), {2, 3, true}, train_rng2);
    CHECK(client2.optimizer.step_count() == 2);  // one batch per epoch
}

TEST_CASE("single-sample SGD step equals the hand-applied update") {
    Rng rng(0xD4u);
    auto client = make_client(0, rng, OptimizerKind::SGD, 0.05, 1);
    const auto global = client.model.flat_params();

    QlstmModel probe = client.model;
    probe.set_flat_params(global);
    const Sample& s = client.train_set[0];
    const auto lg = probe.loss_and_grad(s.window, s.target);
    std::vector<double> expected = global;
    for (std::size_t j = 0; j < expected.size(); ++j) expected[j] -= 0.05 * lg.grad[j];

    Rng train_rng(11);
    local_train(client, global, {1, 1, false}, train_rng);
    const auto got = client.model.flat_params();
    for (std::size_t j = 0; j < expected.size(); ++j)
        CHECK(got[j] == Catch::Approx(expected[j]).margin(1e-15));
}

TEST_CASE("empty training set is rejected") {
    Rng rng(0xE5u);
    auto client = make_client(0, rng, OptimizerKind::SGD, 0.01);
    client.train_set.clear();
    Rng train_rng(1);
    CHECK_THROWS_AS(local_train(client, client.model.flat_params(), {1, 4, false}, train_rng),
                    ConfigError);
}

TEST_CASE("run_training with lr = 0 is a fixed point") {
    Rng rng(0xF6u);
    std::vector<Client<QlstmModel>> clients;
    for (int k = 0; k < 2; ++k) clients.push_back(make_client(k, rng, OptimizerKind::SGD, 0.0));
    const auto initial = clients[0].model.flat_params();

    TrainLoopOptions options;
    options.max_rounds = 5;
    options.master_seed = 3;
    options.local = {1, 4, false};
    const auto result = run_training(clients, initial, options);

    REQUIRE(result.rounds.size() == 5);
    CHECK(result.global_params == initial);
    for (const auto& record : result.rounds)
        CHECK(record.global_test_loss == result.rounds[0].global_test_loss);
}

TEST_CASE("round count and determinism") {
    auto build_clients = [](std::uint64_t seed) {
        Rng rng(seed);
        std::vector<Client<QlstmModel>> clients;
        for (int k = 0; k < 3; ++k)
            clients.push_back(make_client(k, rng, OptimizerKind::RMSprop, 0.01));
        return clients;
    };

    auto run_once = [&](bool parallel) {
        auto clients = build_clients(0x1234u);
        const auto initial = clients[0].model.flat_params();
        TrainLoopOptions options;
        options.max_rounds = 3;
        options.master_seed = 99;
        options.local = {1, 2, false};
        options.parallel_clients = parallel;
        return run_training(clients, initial, options);
    };

    const auto a = run_once(true);
    const auto b = run_once(true);
    const auto c = run_once(false);

    REQUIRE(a.rounds.size() == 3);
    CHECK(a.global_params == b.global_params);
    CHECK(a.global_params == c.global_params);  // schedule-independent
    for (std::size_t r = 0; r < 3; ++r) {
        CHECK(a.rounds[r].selected == b.rounds[r].selected);
        CHECK(a.rounds[r].per_client_train_loss == b.rounds[r].per_client_train_loss);
        CHECK(a.rounds[r].global_test_loss == b.rounds[r].global_test_loss);
        CHECK(a.rounds[r].global_test_loss == c.rounds[r].global_test_loss);
    }
}

TEST_CASE("early stop callback halts the loop") {
    Rng rng(0xABu);
    std::vector<Client<QlstmModel>> clients;
    for (int k = 0; k < 2; ++k) clients.push_back(make_client(k, rng, OptimizerKind::SGD, 0.01));

    TrainLoopOptions options;
    options.max_rounds = 10;
    options.master_seed = 5;
    options.local = {1, 4, false};
    options.stop_after_round = [](const std::vector<RoundRecord>& records) {
        return records.size() >= 2;
    };
    const auto result = run_training(clients, clients[0].model.flat_params(), options);
    CHECK(result.rounds.size() == 2);
}

TEST_CASE("partial participation trains only the selected clients") {
    Rng rng(0xCDu);
    std::vector<Client<QlstmModel>> clients;
    for (int k = 0; k < 4; ++k) clients.push_back(make_client(k, rng, OptimizerKind::SGD, 0.01));

    TrainLoopOptions options;
    options.max_rounds = 4;
    options.m_count = 2;
    options.master_seed = 17;
    options.local = {1, 4, false};
    const auto result = run_training(clients, clients[0].model.flat_params(), options);
    for (const auto& record : result.rounds) {
        CHECK(record.selected.size() == 2);
        CHECK(record.per_client_train_loss.size() == 2);
        CHECK(std::is_sorted(record.selected.begin(), record.selected.end()));
    }
}
