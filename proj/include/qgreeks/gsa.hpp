#pragma once

#include <cstdint>
#include <vector>

#include "qgreeks/greeks.hpp"
#include "qgreeks/instruments.hpp"

namespace qgreeks {

enum class FnType { A, B, C };

enum class GsaSampler { Qmc, Pseudo };

// Pick-freeze report: singleton main/total Sobol' indices, their sums, and
// the average dimension d_A = sum_i S_i^tot. Raw index estimates are kept;
// negatives are clipped to zero only where summaries need the [0,1] range.
struct GsaReport {
    int dim = 0;
    std::int64_t budget = 0;
    double variance = 0.0;
    std::vector<double> main_raw;
    std::vector<double> total_raw;
    double main_sum = 0.0; // sum of clipped main indices
    double d_a = 0.0;      // sum of raw total indices
    FnType fn_type = FnType::C;
    bool degenerate = false; // constant function, indices undefined
};

// Classification thresholds quantifying the qualitative A/B/C taxonomy;
// recorded in run metadata so labels can be re-derived.
struct ClassifyThresholds {
    double a_main_sum = 0.70;  // type A needs main_sum >= this ...
    double a_min_ratio = 0.50; // ... and S_i/S_i^tot >= this on active variables
    double c_main_sum = 0.50;  // type C when main_sum <= this
    double active_fraction = 0.50; // active: S_i^tot >= fraction * max_j S_j^tot
};

const ClassifyThresholds& classify_thresholds();

// Estimates all singleton indices of g on [0,1]^dim with budget N base
// points. The sampler supplies 2*dim-dimensional points (Sobol' dimensions
// doubled for the pick-freeze pairing). Throws on zero budget; a constant g
// yields a degenerate report.
GsaReport sobol_indices(const PathFn& g, int dim, std::int64_t budget, GsaSampler sampler,
                        std::uint64_t seed = 0);

double average_dimension(const GsaReport& report);
FnType classify(const GsaReport& report);

char fn_type_label(FnType t);

// Composes the full Greek estimation pipeline into one scalar function of the
// D uniforms: node differences for FD/CI (common random numbers by
// construction), the per-path conditional estimate for CPW. CPW combined with
// importance sampling is rejected.
PathFn greek_integrand(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                       GreekMethod method, Scheme scheme, bool importance_sampling,
                       const GreekRequest& request);

PathFn greek_integrand(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                       GreekMethod method, Scheme scheme, bool importance_sampling);

} // namespace qgreeks
