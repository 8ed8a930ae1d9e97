#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qgreeks/estimators.hpp"
#include "qgreeks/instruments.hpp"
#include "qgreeks/normal.hpp"
#include "qgreeks/sampling.hpp"

using namespace qgreeks;

namespace {

MarketSpec table_spec(double barrier = 0.0) {
    MarketSpec s;
    s.spot = 100.0;
    s.rate = 0.03;
    s.sigma = 0.30;
    s.maturity = 0.25;
    s.steps = 32;
    s.strike = 100.0;
    if (barrier > 0) s.barrier = barrier;
    return s;
}

AssetPath constant_path(double level, int steps = 32) {
    AssetPath p;
    p.spot.assign(static_cast<std::size_t>(steps), level);
    p.x1 = 0.0;
    return p;
}

AssetPath drift_path(const MarketSpec& spec) {
    return gbm_path(euler_wiener(std::vector<double>(spec.steps, 0.0), spec), spec);
}

} // namespace

TEST_CASE("asian call payoff") {
    const MarketSpec spec = table_spec();
    CHECK(asian_call(constant_path(spec.strike), spec).value == 0.0);

    MarketSpec zero_rate = spec;
    zero_rate.rate = 0.0;
    CHECK(asian_call(constant_path(spec.strike + 1.0), zero_rate).value == doctest::Approx(1.0));

    // drift-only average sits just below the strike
    const AssetPath drift = drift_path(spec);
    double mean = 0.0;
    for (double s : drift.spot) mean += s;
    mean /= 32.0;
    CHECK(mean == doctest::Approx(99.81).epsilon(1e-4));
    CHECK(asian_call(drift, spec).value == 0.0);
}

TEST_CASE("down-and-out call payoff") {
    const MarketSpec spec = table_spec(90.0);

    AssetPath touching = constant_path(120.0);
    touching.spot[7] = 90.0; // knocked out at the barrier
    const PayoffResult ko = down_out_call(touching, spec);
    CHECK(ko.value == 0.0);
    CHECK_FALSE(ko.alive);

    const PayoffResult at_strike = down_out_call(constant_path(spec.strike), spec);
    CHECK(at_strike.value == 0.0);
    CHECK(at_strike.alive);

    const PayoffResult drift = down_out_call(drift_path(spec), spec);
    CHECK(drift.value == 0.0); // alive but S_32 < K
    CHECK(drift.alive);

    CHECK_THROWS_AS(down_out_call(constant_path(120.0), table_spec()), std::invalid_argument);
}

TEST_CASE("is_barrier_path reduces to plain sampling when the barrier is negligible") {
    // barrier and strike both pushed toward zero so every threshold is remote
    MarketSpec spec = table_spec(1e-6);
    spec.strike = 1e-6;
    const SampleMatrix u = pseudo_uniforms(32, 1, 99);

    const auto [path, result] = is_barrier_path(u.point(0), spec, Scheme::Euler);
    CHECK(result.likelihood == doctest::Approx(1.0).epsilon(1e-12));

    // plain Euler path from the same uniforms
    std::vector<double> normals(32);
    for (int j = 0; j < 32; ++j) normals[j] = inverse_normal_cdf(u.at(0, j));
    const AssetPath plain = gbm_path(euler_wiener(normals, spec), spec);
    for (int j = 0; j < 32; ++j) {
        CHECK(path.spot[j] == doctest::Approx(plain.spot[j]).epsilon(1e-9));
    }
}

TEST_CASE("is_barrier_path always survives and finishes in the money") {
    for (Scheme scheme : {Scheme::Euler, Scheme::BrownianBridge}) {
        const MarketSpec spec = table_spec(90.0);
        const SampleMatrix u = pseudo_uniforms(32, 256, 123);
        for (std::int64_t p = 0; p < u.count; ++p) {
            const auto [path, result] = is_barrier_path(u.point(p), spec, scheme);
            double min_spot = path.spot[0];
            for (double s : path.spot) min_spot = std::min(min_spot, s);
            REQUIRE(min_spot > *spec.barrier);
            REQUIRE(path.spot.back() > spec.strike);
            REQUIRE(result.likelihood > 0.0);
            REQUIRE(result.likelihood <= 1.0);
            REQUIRE(result.value > 0.0);
        }
    }
    CHECK_THROWS_AS(is_barrier_path(std::vector<double>(32, 0.5), table_spec(), Scheme::Euler),
                    std::invalid_argument);
}

TEST_CASE("importance sampling agrees with the reference price") {
    const MarketSpec spec = table_spec(90.0);
    const PathFn fn = make_price_fn(Instrument::DownOutCall, spec, Scheme::BrownianBridge, true);
    const Estimate is = rqmc_estimate(fn, 32, 1 << 12, 16, 2025);
    // reference value and error for the same instrument at 2^16 total points
    CHECK(std::abs(is.value - 5.98604) < 3.0 * (is.std_error + 3.72e-4));
}

TEST_CASE("importance sampling is unbiased against plain sampling per barrier level") {
    for (double barrier : {90.0, 80.0, 70.0}) {
        const MarketSpec spec = table_spec(barrier);
        const Estimate plain = rqmc_estimate(
            make_price_fn(Instrument::DownOutCall, spec, Scheme::BrownianBridge, false), 32,
            1 << 12, 16, 31);
        const Estimate is = rqmc_estimate(
            make_price_fn(Instrument::DownOutCall, spec, Scheme::BrownianBridge, true), 32,
            1 << 12, 16, 32);
        const double combined =
            std::sqrt(plain.std_error * plain.std_error + is.std_error * is.std_error);
        INFO("barrier ", barrier, " plain ", plain.value, " is ", is.value);
        CHECK(std::abs(plain.value - is.value) < 3.0 * combined);
    }
}

TEST_CASE("importance sampling reduces variance at the near barrier") {
    const MarketSpec spec = table_spec(90.0);
    const Estimate plain = rqmc_estimate(
        make_price_fn(Instrument::DownOutCall, spec, Scheme::BrownianBridge, false), 32, 1 << 12,
        16, 7);
    const Estimate is = rqmc_estimate(
        make_price_fn(Instrument::DownOutCall, spec, Scheme::BrownianBridge, true), 32, 1 << 12,
        16, 7);
    CHECK(is.std_error < plain.std_error);
}

TEST_CASE("price functions validate their inputs") {
    CHECK_THROWS_AS(make_price_fn(Instrument::DownOutCall, table_spec(), Scheme::Euler, false),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_price_fn(Instrument::AsianCall, table_spec(), Scheme::Euler, true),
                    std::invalid_argument);
    MarketSpec bad = table_spec();
    bad.barrier = 150.0;
    CHECK_THROWS_AS(make_price_fn(Instrument::DownOutCall, bad, Scheme::Euler, false),
                    std::invalid_argument);
}

TEST_CASE("euler and bridge price estimates agree in distribution") {
    const MarketSpec spec = table_spec();
    const Estimate euler = mc_estimate(
        make_price_fn(Instrument::AsianCall, spec, Scheme::Euler, false), 32, 1 << 16, 5);
    const Estimate bridge = mc_estimate(
        make_price_fn(Instrument::AsianCall, spec, Scheme::BrownianBridge, false), 32, 1 << 16, 6);
    const double combined =
        std::sqrt(euler.std_error * euler.std_error + bridge.std_error * bridge.std_error);
    CHECK(std::abs(euler.value - bridge.value) < 3.0 * combined);
}
