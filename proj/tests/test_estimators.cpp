#include <doctest.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qgreeks/estimators.hpp"
#include "qgreeks/greeks.hpp"
#include "qgreeks/instruments.hpp"
#include "qgreeks/seeding.hpp"

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

} // namespace

TEST_CASE("pairwise sum matches the naive sum") {
    std::vector<double> v(1000);
    for (int i = 0; i < 1000; ++i) v[i] = std::cos(i * 0.37);
    double naive = 0.0;
    for (double x : v) naive += x;
    CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-13));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("mc estimate of a constant payoff") {
    const PathFn c = [](std::span<const double>) { return 2.5; };
    const Estimate e = mc_estimate(c, 4, 64, 1);
    CHECK(e.value == doctest::Approx(2.5));
    CHECK(e.std_error == 0.0);
    CHECK(e.replicates == 1);
    CHECK(e.n_per_replicate == 64);
    CHECK(e.total_budget() == 64);
    CHECK_THROWS_AS(mc_estimate(c, 4, 1, 1), std::invalid_argument);
}

TEST_CASE("mc error shrinks like one over root two when doubling") {
    const PathFn payoff = [](std::span<const double> u) { return u[0] * u[0] + u[1]; };
    double ratio_sum = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
        const Estimate small = mc_estimate(payoff, 2, 1 << 12, derive_seed(100, seed));
        const Estimate big = mc_estimate(payoff, 2, 1 << 13, derive_seed(200, seed));
        ratio_sum += big.std_error / small.std_error;
    }
    const double mean_ratio = ratio_sum / 10.0;
    CHECK(mean_ratio > 0.8 / std::sqrt(2.0));
    CHECK(mean_ratio < 1.2 / std::sqrt(2.0));
}

TEST_CASE("rqmc estimate bookkeeping and validation") {
    const PathFn c = [](std::span<const double>) { return 1.25; };
    const Estimate e = rqmc_estimate(c, 4, 256, 8, 9);
    CHECK(e.value == doctest::Approx(1.25));
    CHECK(e.std_error == 0.0);
    CHECK(e.replicates == 8);
    CHECK(e.n_per_replicate == 256);
    CHECK(e.total_budget() == 256 * 8);
    CHECK(e.per_replicate_values.size() == 8);

    CHECK_THROWS_AS(rqmc_estimate(c, 4, 100, 8, 9), std::invalid_argument); // not a power of two
    CHECK_THROWS_AS(rqmc_estimate(c, 4, 256, 1, 9), std::invalid_argument); // needs K >= 2
}

TEST_CASE("estimates are bit-for-bit deterministic in the seed") {
    const MarketSpec spec = table_spec();
    const PathFn fn = make_price_fn(Instrument::AsianCall, spec, Scheme::BrownianBridge, false);
    const Estimate a = rqmc_estimate(fn, 32, 512, 8, 77);
    const Estimate b = rqmc_estimate(fn, 32, 512, 8, 77);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.per_replicate_values == b.per_replicate_values);

    const Estimate c = mc_estimate(fn, 32, 4096, 7);
    const Estimate d = mc_estimate(fn, 32, 4096, 7);
    CHECK(c.value == d.value);
    CHECK(c.std_error == d.std_error);
}

TEST_CASE("mc and rqmc agree within combined errors for every payoff") {
    struct Case {
        Instrument instrument;
        double barrier;
        bool is;
    };
    for (const Case& c : {Case{Instrument::AsianCall, 0.0, false},
                          Case{Instrument::DownOutCall, 90.0, false},
                          Case{Instrument::DownOutCall, 90.0, true}}) {
        const MarketSpec spec = table_spec(c.barrier);
        const PathFn euler = make_price_fn(c.instrument, spec, Scheme::Euler, c.is);
        const PathFn bridge = make_price_fn(c.instrument, spec, Scheme::BrownianBridge, c.is);
        const Estimate mc = mc_estimate(euler, 32, 1 << 16, 11);
        const Estimate rq = rqmc_estimate(bridge, 32, 1 << 12, 16, 12);
        const double combined =
            std::sqrt(mc.std_error * mc.std_error + rq.std_error * rq.std_error);
        INFO("instrument ", static_cast<int>(c.instrument), " is ", c.is);
        CHECK(std::abs(mc.value - rq.value) < 3.0 * combined);
    }
}

TEST_CASE("batched nodes share one point stream per replicate") {
    // recording wrappers: every node must observe the identical sequence
    auto seen_a = std::make_shared<std::vector<double>>();
    auto seen_b = std::make_shared<std::vector<double>>();
    const PathFn record_a = [seen_a](std::span<const double> u) {
        seen_a->insert(seen_a->end(), u.begin(), u.end());
        return u[0];
    };
    const PathFn record_b = [seen_b](std::span<const double> u) {
        seen_b->insert(seen_b->end(), u.begin(), u.end());
        return 2.0 * u[0];
    };
    SamplerConfig cfg;
    cfg.sampler = Sampler::Rqmc;
    cfg.n = 64;
    cfg.replicates = 4;
    cfg.seed = 3;
    const PathFn nodes[] = {record_a, record_b};
    const auto estimates = batched_estimate(nodes, 8, cfg);
    CHECK(*seen_a == *seen_b);
    CHECK(seen_a->size() == 64 * 4 * 8);
    CHECK(estimates[1].value == doctest::Approx(2.0 * estimates[0].value).epsilon(1e-14));
}

TEST_CASE("batched identical nodes produce identical estimates") {
    const MarketSpec spec = table_spec();
    const PathFn fn = make_price_fn(Instrument::AsianCall, spec, Scheme::Euler, false);
    SamplerConfig cfg;
    cfg.sampler = Sampler::MonteCarlo;
    cfg.n = 512;
    cfg.replicates = 4;
    cfg.seed = 5;
    const PathFn nodes[] = {fn, fn};
    const auto estimates = batched_estimate(nodes, 32, cfg);
    CHECK(estimates[0].value == estimates[1].value);
    CHECK(estimates[0].std_error == estimates[1].std_error);
    CHECK(estimates[0].per_replicate_values == estimates[1].per_replicate_values);
}

TEST_CASE("common random numbers collapse the error of a finite difference") {
    // payoff linear in theta: the differenced estimator's spread shrinks by h
    const double h = 0.01;
    const PathFn plus = [&](std::span<const double> u) { return (1.0 + h) * u[0]; };
    const PathFn minus = [&](std::span<const double> u) { return (1.0 - h) * u[0]; };
    SamplerConfig cfg;
    cfg.sampler = Sampler::MonteCarlo;
    cfg.n = 1024;
    cfg.replicates = 8;
    cfg.seed = 17;
    const PathFn nodes[] = {plus, minus};
    const auto estimates = batched_estimate(nodes, 2, cfg);
    const double coeffs[] = {1.0, -1.0};
    const Estimate diff = combine_linear(estimates, coeffs);
    CHECK(diff.std_error < 0.1 * estimates[0].std_error);
    const Estimate derivative = fd_first(estimates[0], estimates[1], h);
    CHECK(derivative.value == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("combine_linear rejects mismatched replicate shapes") {
    Estimate a;
    a.replicates = 4;
    a.n_per_replicate = 64;
    a.per_replicate_values = {1, 2, 3, 4};
    Estimate b = a;
    b.replicates = 2;
    b.per_replicate_values = {1, 2};
    const Estimate nodes[] = {a, b};
    const double coeffs[] = {1.0, -1.0};
    CHECK_THROWS_AS(combine_linear(nodes, coeffs), std::invalid_argument);
}
