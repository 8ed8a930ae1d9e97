#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qgreeks/market.hpp"

namespace qgreeks {

enum class Scheme { Euler, BrownianBridge };

// Discretized Wiener path W_1..W_D on the equispaced grid t_j = j*T/D.
struct WienerPath {
    Scheme scheme = Scheme::Euler;
    std::vector<double> values;
};

// Bridge plan for D points over (0, T]: terminal point first, then midpoints,
// always bisecting the largest remaining interval (ties toward the earlier
// one). For power-of-two D this is the standard dyadic order.
class BrownianBridge {
public:
    BrownianBridge(int steps, double maturity);

    int steps() const { return steps_; }
    // normals consumed in construction order; w_out receives the W levels
    void build(std::span<const double> normals, std::span<double> w_out) const;

    // plan queries, slot = construction order (slot 0 is the terminal point)
    int fill_index(int slot) const { return fill_index_[slot]; }
    int left_index(int slot) const { return left_index_[slot]; } // -1 anchors at t_0
    int right_index(int slot) const { return right_index_[slot]; }
    double left_weight(int slot) const { return left_weight_[slot]; }
    double right_weight(int slot) const { return right_weight_[slot]; }
    double std_dev(int slot) const { return std_dev_[slot]; }

private:
    int steps_;
    std::vector<int> fill_index_, left_index_, right_index_; // -1 left index means anchored at W_0 = 0
    std::vector<double> left_weight_, right_weight_, std_dev_;
};

// Cached plan lookup keyed by (steps, maturity).
const BrownianBridge& bridge_plan(int steps, double maturity);

void euler_levels(std::span<const double> normals, double dt, std::span<double> w_out);

WienerPath euler_wiener(std::span<const double> normals, const MarketSpec& spec);
WienerPath brownian_bridge_wiener(std::span<const double> normals, const MarketSpec& spec);

// Asset path S_1..S_D; `shifted` holds the CPW path S~_j once filled.
// x1 is the conditioning normal W_1 / sqrt(t_1) (the first normal consumed
// under the Euler scheme).
struct AssetPath {
    std::vector<double> spot;
    std::vector<double> shifted;
    std::optional<double> x1;

    bool has_shift() const { return !shifted.empty(); }
};

void gbm_from_levels(std::span<const double> w, const MarketSpec& spec, std::span<double> s_out);

AssetPath gbm_path(const WienerPath& w, const MarketSpec& spec);

// Fills the shifted path S~_j = S_j * exp(-mu t_1 - sigma x1 sqrt(t_1)).
// S~ depends only on the increments W_j - W_1. Throws if x1 is missing.
AssetPath cpw_shifted_path(AssetPath path, const MarketSpec& spec);

} // namespace qgreeks
