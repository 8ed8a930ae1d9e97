#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgreeks/instruments.hpp"

namespace qgreeks {

// Expectation estimate with replicate bookkeeping. Total budget N = n * K.
// For K > 1 the error bar comes from the replicate spread only:
//   sigma_f^2 = sum_k (mean - V_k)^2 / (K - 1),  std_error = sigma_f / sqrt(K).
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_per_replicate = 0;
    int replicates = 1;
    std::vector<double> per_replicate_values;

    std::int64_t total_budget() const { return n_per_replicate * replicates; }
};

enum class Sampler { MonteCarlo, Rqmc };

struct SamplerConfig {
    Sampler sampler = Sampler::Rqmc;
    std::int64_t n = 1 << 10; // points per replicate; power of two for Rqmc
    int replicates = 16;      // K
    std::uint64_t seed = 0;
};

// Deterministic cascade sum, independent of any parallel schedule.
double pairwise_sum(std::span<const double> values);

// Plain MC: mean of N pseudo-random evaluations, std_error = sample sd / sqrt(N).
Estimate mc_estimate(const PathFn& fn, int dims, std::int64_t total, std::uint64_t seed);

// RQMC: K Owen-scrambled replicates of n points each, replicate-spread error.
// Requires n a power of two and K >= 2.
Estimate rqmc_estimate(const PathFn& fn, int dims, std::int64_t n, int replicates,
                       std::uint64_t seed);

// Common-random-number evaluation: every node sees the identical point stream
// per replicate. MonteCarlo runs use K independent pseudo-random batches so
// linear combinations of nodes (finite differences, interpolation rows)
// propagate error at replicate level.
std::vector<Estimate> batched_estimate(std::span<const PathFn> nodes, int dims,
                                       const SamplerConfig& cfg);

// value = sum_j coeff_j * node_j, combined replicate by replicate.
// All nodes must share (n, K); std_error is 0 for K = 1.
Estimate combine_linear(std::span<const Estimate> nodes, std::span<const double> coeffs);

// Single estimate through the same replicate machinery as batched_estimate.
Estimate sampled_estimate(const PathFn& fn, int dims, const SamplerConfig& cfg);

} // namespace qgreeks
