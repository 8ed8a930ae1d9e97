#include "qgreeks/estimators.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "qgreeks/sampling.hpp"
#include "qgreeks/seeding.hpp"

namespace qgreeks {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 32) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

double replicate_spread_error(std::span<const double> replicate_values, double mean) {
    const int k = static_cast<int>(replicate_values.size());
    if (k < 2) return 0.0;
    double ss = 0.0;
    for (double v : replicate_values) ss += (mean - v) * (mean - v);
    return std::sqrt(ss / (k - 1)) / std::sqrt(static_cast<double>(k));
}

std::unique_ptr<PointSource> replicate_source(Sampler sampler, int dims, std::uint64_t seed,
                                              int replicate) {
    if (sampler == Sampler::MonteCarlo) {
        return make_pseudo_source(dims, derive_seed(seed, static_cast<std::uint64_t>(replicate)));
    }
    return make_scrambled_source(dims, ScrambleSeed{seed, replicate});
}

} // namespace

Estimate mc_estimate(const PathFn& fn, int dims, std::int64_t total, std::uint64_t seed) {
    if (total < 2) throw std::invalid_argument("mc_estimate: need at least 2 points");
    auto source = make_pseudo_source(dims, seed);
    std::vector<double> u(static_cast<std::size_t>(dims));
    std::vector<double> samples(static_cast<std::size_t>(total));
    for (std::int64_t i = 0; i < total; ++i) {
        source->next(u);
        samples[i] = fn(u);
    }
    const double mean = pairwise_sum(samples) / static_cast<double>(total);
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(total - 1));

    Estimate e;
    e.value = mean;
    e.std_error = sd / std::sqrt(static_cast<double>(total));
    e.n_per_replicate = total;
    e.replicates = 1;
    e.per_replicate_values = {mean};
    return e;
}

Estimate rqmc_estimate(const PathFn& fn, int dims, std::int64_t n, int replicates,
                       std::uint64_t seed) {
    if (n < 1 || !std::has_single_bit(static_cast<std::uint64_t>(n))) {
        throw std::invalid_argument("rqmc_estimate: n must be a power of two");
    }
    if (replicates < 2) throw std::invalid_argument("rqmc_estimate: need K >= 2 replicates");

    Estimate e;
    e.n_per_replicate = n;
    e.replicates = replicates;
    e.per_replicate_values.resize(static_cast<std::size_t>(replicates));

    std::vector<double> u(static_cast<std::size_t>(dims));
    std::vector<double> samples(static_cast<std::size_t>(n));
    for (int k = 0; k < replicates; ++k) {
        auto source = make_scrambled_source(dims, ScrambleSeed{seed, k + 1});
        for (std::int64_t i = 0; i < n; ++i) {
            source->next(u);
            samples[i] = fn(u);
        }
        e.per_replicate_values[k] = pairwise_sum(samples) / static_cast<double>(n);
    }
    e.value = pairwise_sum(e.per_replicate_values) / static_cast<double>(replicates);
    e.std_error = replicate_spread_error(e.per_replicate_values, e.value);
    return e;
}

std::vector<Estimate> batched_estimate(std::span<const PathFn> nodes, int dims,
                                       const SamplerConfig& cfg) {
    if (nodes.empty()) throw std::invalid_argument("batched_estimate: no nodes");
    if (cfg.replicates < 1) throw std::invalid_argument("batched_estimate: K must be >= 1");
    if (cfg.sampler == Sampler::Rqmc &&
        (cfg.n < 1 || !std::has_single_bit(static_cast<std::uint64_t>(cfg.n)))) {
        throw std::invalid_argument("batched_estimate: n must be a power of two for rqmc");
    }

    const std::size_t node_count = nodes.size();
    std::vector<Estimate> out(node_count);
    for (auto& e : out) {
        e.n_per_replicate = cfg.n;
        e.replicates = cfg.replicates;
        e.per_replicate_values.resize(static_cast<std::size_t>(cfg.replicates));
    }

    std::vector<double> u(static_cast<std::size_t>(dims));
    std::vector<std::vector<double>> samples(node_count,
                                             std::vector<double>(static_cast<std::size_t>(cfg.n)));
    for (int k = 0; k < cfg.replicates; ++k) {
        auto source = replicate_source(cfg.sampler, dims, cfg.seed, k + 1);
        for (std::int64_t i = 0; i < cfg.n; ++i) {
            source->next(u); // one point stream per replicate, shared by all nodes
            for (std::size_t nidx = 0; nidx < node_count; ++nidx) {
                samples[nidx][i] = nodes[nidx](u);
            }
        }
        for (std::size_t nidx = 0; nidx < node_count; ++nidx) {
            out[nidx].per_replicate_values[k] =
                pairwise_sum(samples[nidx]) / static_cast<double>(cfg.n);
        }
    }
    for (auto& e : out) {
        e.value = pairwise_sum(e.per_replicate_values) / static_cast<double>(cfg.replicates);
        e.std_error = replicate_spread_error(e.per_replicate_values, e.value);
    }
    return out;
}

Estimate combine_linear(std::span<const Estimate> nodes, std::span<const double> coeffs) {
    if (nodes.size() != coeffs.size() || nodes.empty()) {
        throw std::invalid_argument("combine_linear: nodes/coeffs size mismatch");
    }
    const int k = nodes.front().replicates;
    const std::int64_t n = nodes.front().n_per_replicate;
    for (const auto& e : nodes) {
        if (e.replicates != k || e.n_per_replicate != n) {
            throw std::invalid_argument("combine_linear: nodes disagree on (n, K)");
        }
    }
    Estimate out;
    out.n_per_replicate = n;
    out.replicates = k;
    out.per_replicate_values.resize(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            acc += coeffs[j] * nodes[j].per_replicate_values[r];
        }
        out.per_replicate_values[r] = acc;
    }
    out.value = pairwise_sum(out.per_replicate_values) / static_cast<double>(k);
    out.std_error = replicate_spread_error(out.per_replicate_values, out.value);
    return out;
}

Estimate sampled_estimate(const PathFn& fn, int dims, const SamplerConfig& cfg) {
    const PathFn nodes[] = {fn};
    return batched_estimate(nodes, dims, cfg)[0];
}

} // namespace qgreeks
