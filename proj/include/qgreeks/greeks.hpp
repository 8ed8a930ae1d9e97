#pragma once

#include <span>
#include <vector>

#include "qgreeks/estimators.hpp"
#include "qgreeks/instruments.hpp"

namespace qgreeks {

enum class GreekParameter { Spot, Volatility };
enum class GreekMethod { FiniteDifference, ChebyshevInterpolation, ConditionalPathwise };
enum class GreekKind { Delta, Gamma, Vega, Vomma };

GreekParameter greek_parameter(GreekKind kind);
int greek_order(GreekKind kind);

// Target derivative plus method parameters. FD uses 2 evaluations for order 1
// and 3 for order 2; CI uses ci_points evaluations.
struct GreekRequest {
    GreekParameter parameter = GreekParameter::Spot;
    int order = 1;
    GreekMethod method = GreekMethod::FiniteDifference;
    double fd_shift = 0.0; // h
    double ci_width = 0.0; // delta-theta
    int ci_points = 7;     // L
};

// Method parameters in use: FD shifts and CI widths per instrument/Greek.
GreekRequest default_greek_request(Instrument instrument, GreekKind kind, GreekMethod method,
                                   const MarketSpec& spec);

// Chebyshev-Gauss-Lobatto nodes on [center - width, center + width], ascending.
std::vector<double> chebyshev_grid(double center, double width, int points);

// Differentiation matrix of order m on an arbitrary grid of distinct nodes:
// barycentric first-order formula, Welfert recursion for higher orders,
// negative-sum diagonal. Exact on polynomials of degree < L at the nodes.
struct DiffMatrix {
    std::vector<double> grid;
    int order = 1;
    std::vector<double> entries; // row-major L x L

    int size() const { return static_cast<int>(grid.size()); }
    double at(int i, int j) const { return entries[i * grid.size() + j]; }
};

DiffMatrix differentiation_matrix(std::span<const double> grid, int order);

// Central finite differences on common-random-number estimates.
Estimate fd_first(const Estimate& plus, const Estimate& minus, double h);
Estimate fd_second(const Estimate& plus, const Estimate& mid, const Estimate& minus, double h);

// Row of D^m * node values at the grid node closest to the center.
Estimate ci_greek(std::span<const Estimate> node_values, int order, std::span<const double> grid);

// Thresholds of the conditional-pathwise separating-variable condition.
struct CpwTerms {
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi_d = 0.0;
    double psi_u = 0.0; // +infinity for both payoffs here
    double psi_d_star = 0.0;
    double s_tilde_d = 0.0;   // shifted terminal value
    double s_tilde_min = 0.0; // min of shifted path over monitoring dates
    double s_tilde_a = 0.0;   // mean of shifted path (Asian)
    double x_tilde_d = 0.0;   // d ln S~_d / d sigma
    int min_index = 0;        // 1-based argmin date of the shifted path
};

CpwTerms cpw_terms_do_call(const AssetPath& path, const MarketSpec& spec);

// Per-path conditional estimate G and its four derivatives.
struct CpwGreeks {
    double value = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double vega = 0.0;
    double vomma = 0.0;

    double pick(GreekKind kind) const;
};

CpwGreeks cpw_do_call_greeks(const AssetPath& path, const MarketSpec& spec);
CpwGreeks cpw_asian_call_greeks(const AssetPath& path, const MarketSpec& spec);

// Per-path conditional Greek (or price for kind == nullopt) as a function of
// the D uniforms.
PathFn make_cpw_path_fn(Instrument instrument, const MarketSpec& spec, Scheme scheme,
                        GreekKind kind);
PathFn make_cpw_price_fn(Instrument instrument, const MarketSpec& spec, Scheme scheme);

// Full Greek pipeline: builds the node pricers (common random numbers),
// runs the configured sampler, and combines per replicate.
Estimate estimate_greek(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                        GreekMethod method, Scheme scheme, bool importance_sampling,
                        const SamplerConfig& sampler, const GreekRequest& request);

Estimate estimate_greek(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                        GreekMethod method, Scheme scheme, bool importance_sampling,
                        const SamplerConfig& sampler);

} // namespace qgreeks
