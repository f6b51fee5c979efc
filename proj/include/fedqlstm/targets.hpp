#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "fedqlstm/errors.hpp"
#include "fedqlstm/rng.hpp"

namespace fedqlstm {

// Target-function generators and the windowed next-value-prediction datasets
// built from them.

enum class TargetKind { BesselJ, StruveH, Sinusoid };

inline std::string to_string(TargetKind kind) {
    switch (kind) {
        case TargetKind::BesselJ: return "bessel_j";
        case TargetKind::StruveH: return "struve_h";
        case TargetKind::Sinusoid: return "sinusoid";
    }
    return "?";
}

inline TargetKind target_kind_from_string(const std::string& s) {
    if (s == "bessel_j") return TargetKind::BesselJ;
    if (s == "struve_h") return TargetKind::StruveH;
    if (s == "sinusoid") return TargetKind::Sinusoid;
    throw ConfigError("unknown target kind '" + s + "'");
}

// J_alpha(x) by its power series, accumulated with the term recurrence
// t_m = -t_{m-1} (x/2)^2 / (m (m + alpha)) in extended precision. Terms near
// x = 20 reach ~1e7, so double accumulation alone would lose digits to
// cancellation.
inline double bessel_j(double alpha, double x) {
    if (alpha < 0.0) throw ConfigError("bessel_j: order must be >= 0");
    if (x < 0.0) throw ConfigError("bessel_j: argument must be >= 0");
    if (x == 0.0) return alpha == 0.0 ? 1.0 : 0.0;
    const long double half = 0.5L * static_cast<long double>(x);
    long double term = std::pow(half, static_cast<long double>(alpha)) /
                       std::tgamma(static_cast<long double>(alpha) + 1.0L);
    long double sum = term;
    for (int m = 1; m <= 200; ++m) {
        term *= -(half * half) /
                (static_cast<long double>(m) * (static_cast<long double>(m) + alpha));
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-14) break;
    }
    return static_cast<double>(sum);
}

// H_nu(z) by its power series, same accumulation scheme.
inline double struve_h(double nu, double z) {
    if (nu < 0.0) throw ConfigError("struve_h: order must be >= 0");
    if (z < 0.0) throw ConfigError("struve_h: argument must be >= 0");
    if (z == 0.0) return 0.0;
    const long double half = 0.5L * static_cast<long double>(z);
    const long double prefactor = std::pow(half, static_cast<long double>(nu) + 1.0L);
    long double term = 1.0L / (std::tgamma(1.5L) * std::tgamma(static_cast<long double>(nu) + 1.5L));
    long double sum = term;
    for (int n = 1; n <= 200; ++n) {
        term *= -(half * half) / ((static_cast<long double>(n) + 0.5L) *
                                  (static_cast<long double>(n) + nu + 0.5L));
        sum += term;
        if (std::fabs(static_cast<double>(term * prefactor)) < 1e-14) break;
    }
    return static_cast<double>(prefactor * sum);
}

struct TargetSpec {
    TargetKind kind = TargetKind::BesselJ;
    double order = 2.0;  // Bessel alpha / Struve nu
    double x_min = 0.0;
    double x_max = 20.0;
    int num_points = 1000;
    double amplitude = 1.0;  // Sinusoid only
    double frequency = 1.0;
    double phase = 0.0;

    void validate(int seq_len) const {
        if (!(x_min < x_max)) throw ConfigError("TargetSpec: x_min must be < x_max");
        if (num_points < seq_len + 1)
            throw ConfigError("TargetSpec: num_points must be >= seq_len + 1");
        if (kind != TargetKind::Sinusoid && order < 0.0)
            throw ConfigError("TargetSpec: order must be >= 0");
    }

    double eval(double x) const {
        switch (kind) {
            case TargetKind::BesselJ: return bessel_j(order, x);
            case TargetKind::StruveH: return struve_h(order, x);
            case TargetKind::Sinusoid: return amplitude * std::sin(frequency * x + phase);
        }
        throw ConfigError("TargetSpec: unknown kind");
    }
};

inline double sinusoid(const TargetSpec& spec, double x) {
    return spec.amplitude * std::sin(spec.frequency * x + spec.phase);
}

// Min-max map of raw function values onto [-1, 1].
struct Normalization {
    double scale = 1.0;
    double offset = 0.0;

    double normalize(double v) const { return (v - offset) / scale; }
    double denormalize(double y) const { return y * scale + offset; }
};

struct Sample {
    std::vector<double> window;  // seq_len normalized values
    double target = 0.0;         // normalized value at grid_index
    int grid_index = 0;
};

struct SequenceDataset {
    std::vector<Sample> pairs;
    Normalization normalization;
    std::vector<double> grid_values;  // normalized f on the full grid
    int seq_len = 0;
};

// Evaluates the target on a uniform grid, normalizes, and emits every sliding
// (window -> next value) pair.
inline SequenceDataset build_dataset(const TargetSpec& spec, int seq_len) {
    if (seq_len < 1) throw ConfigError("build_dataset: seq_len must be >= 1");
    spec.validate(seq_len);

    const std::size_t n = static_cast<std::size_t>(spec.num_points);
    std::vector<double> raw(n);
    const double dx = (spec.x_max - spec.x_min) / static_cast<double>(spec.num_points - 1);
    for (std::size_t i = 0; i < n; ++i)
        raw[i] = spec.eval(spec.x_min + dx * static_cast<double>(i));

    double lo = raw[0], hi = raw[0];
    for (double v : raw) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi - lo > 0.0))
        throw ConfigError("build_dataset: target function is constant on the grid");

    SequenceDataset ds;
    ds.seq_len = seq_len;
    ds.normalization = {(hi - lo) / 2.0, (hi + lo) / 2.0};
    ds.grid_values.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.grid_values[i] = ds.normalization.normalize(raw[i]);

    const std::size_t count = n - static_cast<std::size_t>(seq_len);
    ds.pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Sample s;
        s.window.assign(ds.grid_values.begin() + static_cast<std::ptrdiff_t>(i),
                        ds.grid_values.begin() + static_cast<std::ptrdiff_t>(i + seq_len));
        s.grid_index = static_cast<int>(i) + seq_len;
        s.target = ds.grid_values[static_cast<std::size_t>(s.grid_index)];
        ds.pairs.push_back(std::move(s));
    }
    return ds;
}

struct PartitionOptions {
    double split = 0.67;  // train fraction
    bool with_replacement = true;
    bool disjoint_ranges = false;  // give each client a contiguous slice of the pool
};

struct Shard {
    std::vector<Sample> train;
    std::vector<Sample> test;
};

// Every client draws per_client windows from the shared pool under its own
// derived stream, then splits them train/test. Clients therefore model the
// same function but see different samples.
inline std::vector<Shard> partition(const SequenceDataset& dataset, int num_clients,
                                    int per_client, const PartitionOptions& options,
                                    std::uint64_t seed) {
    if (num_clients < 1) throw ConfigError("partition: need at least one client");
    if (per_client < 2) throw ConfigError("partition: per_client must be >= 2");
    if (options.split <= 0.0 || options.split >= 1.0)
        throw ConfigError("partition: split must be in (0, 1)");
    const std::size_t pool = dataset.pairs.size();
    if (pool == 0) throw ConfigError("partition: empty window pool");

    const int n_train = static_cast<int>(std::llround(options.split * per_client));
    if (n_train < 1 || n_train >= per_client)
        throw ConfigError("partition: split leaves an empty train or test set");

    std::vector<Shard> shards(static_cast<std::size_t>(num_clients));
    for (int k = 0; k < num_clients; ++k) {
        std::size_t lo = 0, hi = pool;
        if (options.disjoint_ranges) {
            lo = pool * static_cast<std::size_t>(k) / static_cast<std::size_t>(num_clients);
            hi = pool * static_cast<std::size_t>(k + 1) / static_cast<std::size_t>(num_clients);
            if (hi <= lo) throw ConfigError("partition: disjoint range empty for client " +
                                            std::to_string(k));
        }
        const std::size_t range = hi - lo;
        if (!options.with_replacement && static_cast<std::size_t>(per_client) > range)
            throw ConfigError("partition: pool too small to draw " + std::to_string(per_client) +
                              " windows without replacement");

        Rng rng(derive_seed(seed, 0xDA7Au, static_cast<std::uint64_t>(k)));
        std::vector<std::size_t> picks;
        picks.reserve(static_cast<std::size_t>(per_client));
        if (options.with_replacement) {
            for (int i = 0; i < per_client; ++i) picks.push_back(lo + rng.below(range));
        } else {
            for (int idx : rng.sample_without_replacement(static_cast<int>(range), per_client))
                picks.push_back(lo + static_cast<std::size_t>(idx));
        }

        Shard& shard = shards[static_cast<std::size_t>(k)];
        for (int i = 0; i < per_client; ++i) {
            const Sample& s = dataset.pairs[picks[static_cast<std::size_t>(i)]];
            (i < n_train ? shard.train : shard.test).push_back(s);
        }
    }
    return shards;
}

// Columns: the window values, then the target, then the grid index.
inline void export_csv(const SequenceDataset& dataset, std::ostream& out) {
    for (int i = 0; i < dataset.seq_len; ++i) out << "w" << i << ",";
    out << "target,grid_index\n";
    char buf[32];
    for (const Sample& s : dataset.pairs) {
        for (double v : s.window) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", s.target);
        out << buf << "," << s.grid_index << "\n";
    }
}

}  // namespace fedqlstm
