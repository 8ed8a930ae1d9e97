#pragma once

#include <cmath>
#include <optional>

namespace qgreeks {

// Contract and model parameters for one instrument under Black-Scholes.
struct MarketSpec {
    double spot = 100.0;     // S0
    double rate = 0.03;      // r, continuously compounded
    double sigma = 0.30;     // volatility
    double maturity = 0.25;  // T, years
    int steps = 32;          // D monitoring dates
    double strike = 100.0;   // K
    std::optional<double> barrier; // B, down-and-out level

    double dt() const { return maturity / steps; }
    double drift() const { return rate - 0.5 * sigma * sigma; } // mu
    double time(int j) const { return dt() * j; }               // t_j, j = 1..D
    double discount() const { return std::exp(-rate * maturity); }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class Instrument { AsianCall, DownOutCall };

} // namespace qgreeks
