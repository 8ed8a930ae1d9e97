#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qgreeks/greeks.hpp"
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

Estimate exact_estimate(double value) {
    Estimate e;
    e.value = value;
    e.std_error = 0.0;
    e.n_per_replicate = 1;
    e.replicates = 2;
    e.per_replicate_values = {value, value};
    return e;
}

AssetPath shifted_path_from_normals(std::span<const double> normals, const MarketSpec& spec) {
    return cpw_shifted_path(gbm_path(euler_wiener(normals, spec), spec), spec);
}

// per-path conditional value rebuilt from the same normals at a bumped spec
double cpw_value_at(Instrument instrument, std::span<const double> normals,
                    const MarketSpec& spec) {
    const AssetPath path = shifted_path_from_normals(normals, spec);
    return instrument == Instrument::AsianCall ? cpw_asian_call_greeks(path, spec).value
                                               : cpw_do_call_greeks(path, spec).value;
}

CpwGreeks cpw_at(Instrument instrument, std::span<const double> normals, const MarketSpec& spec) {
    const AssetPath path = shifted_path_from_normals(normals, spec);
    return instrument == Instrument::AsianCall ? cpw_asian_call_greeks(path, spec)
                                               : cpw_do_call_greeks(path, spec);
}

} // namespace

TEST_CASE("chebyshev grid anchors") {
    const std::vector<double> three = chebyshev_grid(0.0, 1.0, 3);
    CHECK(three[0] == doctest::Approx(-1.0));
    CHECK(three[1] == doctest::Approx(0.0));
    CHECK(three[2] == doctest::Approx(1.0));

    const std::vector<double> seven = chebyshev_grid(100.0, 5.0, 7);
    CHECK(seven.front() == 95.0);
    CHECK(seven.back() == 105.0);
    for (int j = 0; j < 7; ++j) {
        CHECK(seven[j] + seven[6 - j] == doctest::Approx(200.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(chebyshev_grid(0.0, 1.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(chebyshev_grid(0.0, 0.0, 5), std::invalid_argument);
}

TEST_CASE("differentiation matrix is exact on polynomials") {
    const std::vector<double> grid = chebyshev_grid(100.0, 7.5, 7);
    const int L = 7;

    for (int order : {1, 2}) {
        const DiffMatrix dm = differentiation_matrix(grid, order);
        for (int degree = 0; degree < L; ++degree) {
            std::vector<double> values(L), expected(L);
            for (int i = 0; i < L; ++i) {
                const double x = (grid[i] - 100.0) / 7.5; // conditioning-friendly scale
                values[i] = std::pow(x, degree);
                double d = 0.0;
                if (order == 1 && degree >= 1) d = degree * std::pow(x, degree - 1);
                if (order == 2 && degree >= 2) {
                    d = degree * (degree - 1) * std::pow(x, degree - 2);
                }
                expected[i] = d / std::pow(7.5, order);
            }
            for (int i = 0; i < L; ++i) {
                double acc = 0.0;
                for (int j = 0; j < L; ++j) acc += dm.at(i, j) * values[j];
                REQUIRE(acc == doctest::Approx(expected[i]).epsilon(1e-8).scale(1.0));
            }
        }
    }

    // constant vector maps to zero
    const DiffMatrix d1 = differentiation_matrix(grid, 1);
    for (int i = 0; i < L; ++i) {
        double acc = 0.0;
        for (int j = 0; j < L; ++j) acc += d1.at(i, j);
        CHECK(std::abs(acc) < 1e-10);
    }

    const std::vector<double> dup = {1.0, 2.0, 2.0, 3.0};
    CHECK_THROWS_AS(differentiation_matrix(dup, 1), std::invalid_argument);
}

TEST_CASE("finite-difference combinations on exact node values") {
    // V(theta) = theta^2 around theta = 3
    const double h = 0.7;
    const Estimate d1 = fd_first(exact_estimate((3 + h) * (3 + h)),
                                 exact_estimate((3 - h) * (3 - h)), h);
    CHECK(d1.value == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(d1.std_error == 0.0);

    const Estimate flat = fd_first(exact_estimate(5.0), exact_estimate(5.0), h);
    CHECK(flat.value == 0.0);

    const Estimate d2 = fd_second(exact_estimate((3 + h) * (3 + h)), exact_estimate(9.0),
                                  exact_estimate((3 - h) * (3 - h)), h);
    CHECK(d2.value == doctest::Approx(2.0).epsilon(1e-12));

    const Estimate lin = fd_second(exact_estimate(3 + h), exact_estimate(3.0),
                                   exact_estimate(3 - h), h);
    CHECK(lin.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    // V(theta) = theta^4 at theta = 1: second difference = 12 + 2 h^2
    const double hh = 0.01;
    const Estimate quart = fd_second(exact_estimate(std::pow(1 + hh, 4)), exact_estimate(1.0),
                                     exact_estimate(std::pow(1 - hh, 4)), hh);
    CHECK(std::abs(quart.value - 12.0) < 0.01);

    CHECK_THROWS_AS(fd_first(exact_estimate(1), exact_estimate(1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fd_second(exact_estimate(1), exact_estimate(1), exact_estimate(1), 0.0),
                    std::invalid_argument);
}

TEST_CASE("ci_greek on exact node values") {
    const std::vector<double> grid = chebyshev_grid(3.0, 1.0, 7);
    std::vector<Estimate> squares, flats;
    for (double x : grid) {
        squares.push_back(exact_estimate(x * x));
        flats.push_back(exact_estimate(4.0));
    }
    const Estimate d2 = ci_greek(squares, 2, grid);
    CHECK(d2.value == doctest::Approx(2.0).epsilon(1e-8));
    const Estimate d1 = ci_greek(squares, 1, grid);
    CHECK(d1.value == doctest::Approx(6.0).epsilon(1e-8));
    const Estimate zero = ci_greek(flats, 1, grid);
    CHECK(std::abs(zero.value) < 1e-9);

    CHECK_THROWS_AS(ci_greek(std::span<const Estimate>(squares.data(), 5), 1, grid),
                    std::invalid_argument);
}

TEST_CASE("cpw terms for the down-and-out call") {
    const MarketSpec base = table_spec(90.0);
    SampleMatrix u = pseudo_uniforms(32, 1, 4);
    std::vector<double> normals(32);
    for (int j = 0; j < 32; ++j) normals[j] = inverse_normal_cdf(u.at(0, j));
    const AssetPath path = shifted_path_from_normals(normals, base);

    // strike at S~_d and barrier at S~_min collapse both thresholds
    const CpwTerms probe = cpw_terms_do_call(path, base);
    MarketSpec tuned = base;
    tuned.strike = probe.s_tilde_d;
    tuned.barrier = std::min(probe.s_tilde_min, tuned.spot * 0.999);
    if (*tuned.barrier == probe.s_tilde_min) {
        const CpwTerms t = cpw_terms_do_call(path, tuned);
        const double expected = -tuned.drift() * tuned.time(1) /
                                (tuned.sigma * std::sqrt(tuned.time(1)));
        CHECK(t.psi1 == doctest::Approx(expected).epsilon(1e-10));
        CHECK(t.psi2 == doctest::Approx(expected).epsilon(1e-10));
    }

    // remote barrier sends psi2 to -inf: psi_d = psi1
    MarketSpec remote = base;
    remote.barrier = 1e-12;
    const CpwTerms far = cpw_terms_do_call(path, remote);
    CHECK(far.psi2 < -10.0);
    CHECK(far.psi_d == far.psi1);
    CHECK(std::isinf(far.psi_u));

    // definitional identity on random paths
    for (int seed = 1; seed < 20; ++seed) {
        const SampleMatrix m = pseudo_uniforms(32, 1, seed);
        for (int j = 0; j < 32; ++j) normals[j] = inverse_normal_cdf(m.at(0, j));
        const CpwTerms t = cpw_terms_do_call(shifted_path_from_normals(normals, base), base);
        CHECK(t.psi_d_star ==
              doctest::Approx(t.psi_d - base.sigma * std::sqrt(base.time(1))).epsilon(1e-13));
        CHECK(t.psi_d == std::max(t.psi1, t.psi2));
    }

    AssetPath unshifted = gbm_path(euler_wiener(normals, base), base);
    CHECK_THROWS_AS(cpw_terms_do_call(unshifted, base), std::invalid_argument);
}

TEST_CASE("cpw conditional estimate limits") {
    const MarketSpec base = table_spec(90.0);
    std::vector<double> normals(32, 0.3);

    // deep knock-out region: thresholds far right, everything vanishes
    MarketSpec deep = base;
    deep.strike = 1e6;
    const CpwGreeks gone = cpw_at(Instrument::DownOutCall, normals, deep);
    CHECK(gone.value == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(gone.delta == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(gone.gamma == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(gone.vega == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(gone.vomma == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    // thresholds far left: G tends to the forward minus discounted strike
    MarketSpec sure = base;
    sure.strike = 1e-9;
    sure.barrier = 1e-12;
    const AssetPath path = shifted_path_from_normals(normals, sure);
    const CpwTerms t = cpw_terms_do_call(path, sure);
    const CpwGreeks all = cpw_do_call_greeks(path, sure);
    const double e1 = std::exp(sure.rate * (sure.time(1) - sure.maturity));
    CHECK(all.value == doctest::Approx(e1 * t.s_tilde_d - sure.discount() * sure.strike)
                           .epsilon(1e-10));

    // K -> 0 for the asian conditional estimate
    MarketSpec asian = table_spec();
    asian.strike = 1e-9;
    const AssetPath apath = shifted_path_from_normals(normals, asian);
    const CpwTerms at = cpw_terms_do_call(cpw_shifted_path(gbm_path(euler_wiener(normals, asian),
                                                                    asian),
                                                           asian),
                                          table_spec(90.0));
    const CpwGreeks ag = cpw_asian_call_greeks(apath, asian);
    CHECK(ag.value == doctest::Approx(e1 * at.s_tilde_a).epsilon(1e-9));
}

TEST_CASE("cpw derivatives match per-path finite differences of the estimate") {
    // gradient checks over random paths, away from the psi1 = psi2 crossing
    for (Instrument instrument : {Instrument::AsianCall, Instrument::DownOutCall}) {
        const MarketSpec spec =
            instrument == Instrument::DownOutCall ? table_spec(90.0) : table_spec();
        const SampleMatrix u = pseudo_uniforms(32, 1000, 20260314);
        std::vector<double> normals(32);
        int checked = 0;
        for (std::int64_t p = 0; p < u.count; ++p) {
            for (int j = 0; j < 32; ++j) normals[j] = inverse_normal_cdf(u.at(p, j));

            if (instrument == Instrument::DownOutCall) {
                const CpwTerms t =
                    cpw_terms_do_call(shifted_path_from_normals(normals, spec), spec);
                if (std::abs(t.psi1 - t.psi2) < 1e-3) continue; // kink neighborhood
            }
            ++checked;
            const CpwGreeks g = cpw_at(instrument, normals, spec);

            // spot direction
            const double hs = 1e-5 * spec.spot;
            MarketSpec up = spec, dn = spec;
            up.spot += hs;
            dn.spot -= hs;
            const double fd_delta = (cpw_value_at(instrument, normals, up) -
                                     cpw_value_at(instrument, normals, dn)) /
                                    (2 * hs);
            REQUIRE(g.delta == doctest::Approx(fd_delta).epsilon(1e-5).scale(0.1));
            const double fd_gamma = (cpw_at(instrument, normals, up).delta -
                                     cpw_at(instrument, normals, dn).delta) /
                                    (2 * hs);
            REQUIRE(g.gamma == doctest::Approx(fd_gamma).epsilon(1e-4).scale(0.01));

            // volatility direction
            const double hv = 1e-6;
            MarketSpec vup = spec, vdn = spec;
            vup.sigma += hv;
            vdn.sigma -= hv;
            const double fd_vega = (cpw_value_at(instrument, normals, vup) -
                                    cpw_value_at(instrument, normals, vdn)) /
                                   (2 * hv);
            REQUIRE(g.vega == doctest::Approx(fd_vega).epsilon(1e-4).scale(0.1));
            const double fd_vomma = (cpw_at(instrument, normals, vup).vega -
                                     cpw_at(instrument, normals, vdn).vega) /
                                    (2 * hv);
            REQUIRE(g.vomma == doctest::Approx(fd_vomma).epsilon(1e-4).scale(1.0));
        }
        CHECK(checked > 900);
    }
}

TEST_CASE("cpw asian delta is nonnegative path by path") {
    const MarketSpec spec = table_spec();
    const SampleMatrix u = pseudo_uniforms(32, 500, 8);
    std::vector<double> normals(32);
    for (std::int64_t p = 0; p < u.count; ++p) {
        for (int j = 0; j < 32; ++j) normals[j] = inverse_normal_cdf(u.at(p, j));
        REQUIRE(cpw_at(Instrument::AsianCall, normals, spec).delta >= 0.0);
    }
}

TEST_CASE("cpw asian price reproduces the reference table value") {
    const MarketSpec spec = table_spec();
    SamplerConfig cfg;
    cfg.sampler = Sampler::Rqmc;
    cfg.n = 1 << 14;
    cfg.replicates = 16;
    cfg.seed = 99;
    const Estimate price = sampled_estimate(
        make_cpw_price_fn(Instrument::AsianCall, spec, Scheme::BrownianBridge), 32, cfg);
    CHECK(std::abs(price.value - 3.71198) < 3.0 * (price.std_error + 1.27e-5));
}

TEST_CASE("greek pipeline validation") {
    const MarketSpec spec = table_spec(90.0);
    SamplerConfig cfg;
    cfg.n = 256;
    cfg.replicates = 4;

    CHECK_THROWS_AS(estimate_greek(Instrument::DownOutCall, spec, GreekKind::Delta,
                                   GreekMethod::ConditionalPathwise, Scheme::BrownianBridge, true,
                                   cfg),
                    std::invalid_argument);

    GreekRequest bad = default_greek_request(Instrument::DownOutCall, GreekKind::Delta,
                                             GreekMethod::FiniteDifference, spec);
    bad.fd_shift = 0.0;
    CHECK_THROWS_AS(estimate_greek(Instrument::DownOutCall, spec, GreekKind::Delta,
                                   GreekMethod::FiniteDifference, Scheme::BrownianBridge, false,
                                   cfg, bad),
                    std::invalid_argument);

    GreekRequest wide = default_greek_request(Instrument::DownOutCall, GreekKind::Vega,
                                              GreekMethod::ChebyshevInterpolation, spec);
    wide.ci_width = spec.sigma * 1.5; // grid would cross zero volatility
    CHECK_THROWS_AS(estimate_greek(Instrument::DownOutCall, spec, GreekKind::Vega,
                                   GreekMethod::ChebyshevInterpolation, Scheme::BrownianBridge,
                                   false, cfg, wide),
                    std::invalid_argument);
}

TEST_CASE("fd and cpw deltas agree under common budgets") {
    const MarketSpec spec = table_spec();
    SamplerConfig cfg;
    cfg.sampler = Sampler::Rqmc;
    cfg.n = 1 << 11;
    cfg.replicates = 16;
    cfg.seed = 123;
    const Estimate fd = estimate_greek(Instrument::AsianCall, spec, GreekKind::Delta,
                                       GreekMethod::FiniteDifference, Scheme::BrownianBridge,
                                       false, cfg);
    const Estimate cpw = estimate_greek(Instrument::AsianCall, spec, GreekKind::Delta,
                                        GreekMethod::ConditionalPathwise, Scheme::BrownianBridge,
                                        false, cfg);
    const double combined = std::sqrt(fd.std_error * fd.std_error + cpw.std_error * cpw.std_error);
    CHECK(std::abs(fd.value - cpw.value) < 3.0 * combined + fd.std_error);
}
