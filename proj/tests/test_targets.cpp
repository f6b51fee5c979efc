#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fedqlstm/rng.hpp"
#include "fedqlstm/targets.hpp"
#include "oracles.hpp"

using namespace fedqlstm;

TEST_CASE("bessel_j known values") {
    CHECK(bessel_j(0.0, 0.0) == 1.0);
    CHECK(bessel_j(2.0, 0.0) == 0.0);
    // Frozen from the extended-precision series oracle.
    CHECK(bessel_j(2.0, 1.0) == Catch::Approx(0.1149034849319005).margin(1e-12));
    CHECK_THROWS_AS(bessel_j(-1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(bessel_j(2.0, -1.0), ConfigError);
}

TEST_CASE("struve_h known values") {
    CHECK(struve_h(0.0, 0.0) == 0.0);
    // Leading term of the series is positive for small positive z.
    for (const double z : {1e-3, 1e-2, 0.1})
        CHECK(struve_h(0.0, z) > 0.0);
    // Frozen from the extended-precision series oracle.
    CHECK(struve_h(0.0, 1.0) == Catch::Approx(0.5686566270482879).margin(1e-12));
    CHECK_THROWS_AS(struve_h(-0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(struve_h(0.0, -0.1), ConfigError);
}

TEST_CASE("series implementations match the extended-precision oracle") {
    Rng rng(0x609u);
    for (int i = 0; i < 100; ++i) {
        const double order = static_cast<double>(rng.below(4));
        const double x = rng.uniform(0.0, 20.0);
        CHECK(std::fabs(bessel_j(order, x) -
                        static_cast<double>(oracle::bessel_j_series(order, x))) < 1e-9);
        CHECK(std::fabs(struve_h(order, x) -
                        static_cast<double>(oracle::struve_h_series(order, x))) < 1e-9);
    }
}

TEST_CASE("bessel three-term recurrence") {
    for (const double alpha : {1.0, 2.0, 3.0}) {
        for (double x = 0.5; x <= 20.0; x += 0.5) {
            const double lhs = bessel_j(alpha - 1.0, x) + bessel_j(alpha + 1.0, x);
            const double rhs = (2.0 * alpha / x) * bessel_j(alpha, x);
            CHECK(std::fabs(lhs - rhs) < 1e-8);
        }
    }
}

TEST_CASE("sinusoid evaluation") {
    TargetSpec spec;
    spec.kind = TargetKind::Sinusoid;
    CHECK(sinusoid(spec, 0.0) == 0.0);
    CHECK(sinusoid(spec, std::numbers::pi / 2) == Catch::Approx(1.0).margin(1e-15));
    spec.amplitude = 2.0;
    spec.frequency = 3.0;
    spec.phase = std::numbers::pi;
    CHECK(sinusoid(spec, std::numbers::pi / 6) == Catch::Approx(-2.0).margin(1e-14));
}

TEST_CASE("build_dataset windowing") {
    TargetSpec ramp;
    ramp.kind = TargetKind::Sinusoid;  // sin is monotone on [0, 1.2]
    ramp.x_min = 0.0;
    ramp.x_max = 1.2;

    SECTION("minimum size gives exactly one pair") {
        ramp.num_points = 5;
        const auto ds = build_dataset(ramp, 4);
        CHECK(ds.pairs.size() == 1);
    }

    SECTION("pairs walk the grid in order") {
        ramp.num_points = 10;
        const auto ds = build_dataset(ramp, 2);
        REQUIRE(ds.pairs.size() == 8);
        // First pair covers the two smallest grid values, target the third.
        CHECK(ds.pairs[0].window[0] == ds.grid_values[0]);
        CHECK(ds.pairs[0].window[1] == ds.grid_values[1]);
        CHECK(ds.pairs[0].target == ds.grid_values[2]);
        CHECK(ds.pairs[0].grid_index == 2);
    }
}

TEST_CASE("bessel dataset is normalized and complete") {
    TargetSpec spec;  // defaults: J_2 on [0, 20], 1000 points
    const auto ds = build_dataset(spec, 4);
    CHECK(ds.pairs.size() == 996);
    for (const Sample& s : ds.pairs) {
        CHECK(s.target >= -1.0);
        CHECK(s.target <= 1.0);
        for (double v : s.window) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
        // Window consistency: the recorded grid index reproduces the target.
        CHECK(s.target == ds.grid_values[static_cast<std::size_t>(s.grid_index)]);
    }
}

TEST_CASE("normalization round-trips") {
    TargetSpec spec;
    const auto ds = build_dataset(spec, 4);
    Rng rng(0x1111u);
    for (int i = 0; i < 100; ++i) {
        const double v = rng.uniform(-0.5, 0.5);
        CHECK(ds.normalization.normalize(ds.normalization.denormalize(v)) ==
              Catch::Approx(v).margin(1e-12));
    }
}

TEST_CASE("constant target is rejected") {
    TargetSpec flat;
    flat.kind = TargetKind::Sinusoid;
    flat.amplitude = 0.0;
    CHECK_THROWS_AS(build_dataset(flat, 4), ConfigError);
}

TEST_CASE("partition splits and draws per client") {
    TargetSpec spec;
    const auto ds = build_dataset(spec, 4);  // 996-window pool

    SECTION("67/33 split arithmetic") {
        const auto shards = partition(ds, 2, 3000, {}, 7);
        for (const auto& shard : shards) {
            CHECK(shard.train.size() == 2010);
            CHECK(shard.test.size() == 990);
        }
    }

    SECTION("single client without replacement covers the pool") {
        PartitionOptions opts;
        opts.with_replacement = false;
        const auto shards = partition(ds, 1, 996, opts, 7);
        std::vector<int> seen;
        for (const auto& s : shards[0].train) seen.push_back(s.grid_index);
        for (const auto& s : shards[0].test) seen.push_back(s.grid_index);
        std::sort(seen.begin(), seen.end());
        REQUIRE(seen.size() == 996);
        for (std::size_t i = 0; i < seen.size(); ++i)
            CHECK(seen[i] == static_cast<int>(i) + 4);
    }

    SECTION("clients draw different shards from the same master seed") {
        const auto shards = partition(ds, 2, 300, {}, 7);
        int overlap = 0;
        for (std::size_t i = 0; i < shards[0].train.size(); ++i)
            if (shards[0].train[i].grid_index == shards[1].train[i].grid_index) ++overlap;
        CHECK(overlap < static_cast<int>(shards[0].train.size()));
    }

    SECTION("disjoint ranges stay disjoint") {
        PartitionOptions opts;
        opts.disjoint_ranges = true;
        const auto shards = partition(ds, 4, 100, opts, 7);
        for (std::size_t k = 0; k < 4; ++k) {
            const int lo = static_cast<int>(996 * k / 4) + 4;
            const int hi = static_cast<int>(996 * (k + 1) / 4) + 4;
            for (const auto& s : shards[k].train) {
                CHECK(s.grid_index >= lo);
                CHECK(s.grid_index < hi);
            }
        }
    }

    SECTION("insufficient pool is a config error") {
        PartitionOptions opts;
        opts.with_replacement = false;
        CHECK_THROWS_AS(partition(ds, 1, 2000, opts, 7), ConfigError);
    }
}

TEST_CASE("dataset CSV export") {
    TargetSpec spec;
    spec.num_points = 10;
    const auto ds = build_dataset(spec, 4);
    std::ostringstream out;
    export_csv(ds, out);
    const std::string text = out.str();
    CHECK(text.rfind("w0,w1,w2,w3,target,grid_index\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + static_cast<long>(ds.pairs.size()));
}
