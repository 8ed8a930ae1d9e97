#pragma once

#include <functional>
#include <span>
#include <utility>

#include "qgreeks/market.hpp"
#include "qgreeks/paths.hpp"

namespace qgreeks {

struct PayoffResult {
    double value = 0.0;      // discounted payoff
    double likelihood = 1.0; // importance-sampling weight, 1 when IS is off
    bool alive = true;       // barrier not breached
};

// e^{-rT} * max(mean(S_1..S_D) - K, 0)
PayoffResult asian_call(const AssetPath& path, const MarketSpec& spec);

// e^{-rT} * max(S_D - K, 0) * 1{min_j S_j > B}; requires spec.barrier
PayoffResult down_out_call(const AssetPath& path, const MarketSpec& spec);

// One-sided conditional sampling for the down-and-out call: every draw comes
// from the surviving branch of its conditional, U = (1 - p) + u * p with p the
// conditional survival probability, and the payoff carries likelihood prod p.
// The terminal threshold is max(B, K) so every path finishes in the money.
// Draws follow the scheme's construction order: sequential transitions under
// Euler, terminal-first truncated bridge fills under BrownianBridge.
std::pair<AssetPath, PayoffResult> is_barrier_path(std::span<const double> uniforms,
                                                   const MarketSpec& spec,
                                                   Scheme scheme = Scheme::Euler);

// Scalar function of one uniform point.
using PathFn = std::function<double(std::span<const double>)>;

// Discounted payoff of one path built from a row of D uniforms.
PathFn make_price_fn(Instrument instrument, const MarketSpec& spec, Scheme scheme,
                     bool importance_sampling);

} // namespace qgreeks
