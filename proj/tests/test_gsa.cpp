#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qgreeks/gsa.hpp"
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

// Brute-force ANOVA of g on [0,1]^3 by midpoint tensor quadrature:
// main S_i from the variance of E[g | u_i], total S_i^tot from 1 minus the
// variance of E[g | u_{-i}].
struct TensorAnova {
    std::vector<double> main, total;
};

TensorAnova tensor_anova_3d(const std::function<double(double, double, double)>& g, int n) {
    const double h = 1.0 / n;
    auto node = [&](int i) { return (i + 0.5) * h; };

    double mean = 0.0, mean_sq = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                const double v = g(node(a), node(b), node(c));
                mean += v;
                mean_sq += v * v;
            }
        }
    }
    const double cells = static_cast<double>(n) * n * n;
    mean /= cells;
    const double variance = mean_sq / cells - mean * mean;

    TensorAnova out;
    out.main.resize(3);
    out.total.resize(3);
    for (int axis = 0; axis < 3; ++axis) {
        // conditional mean on the kept axis -> main effect
        double var_cond_single = 0.0;
        for (int i = 0; i < n; ++i) {
            double cond = 0.0;
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    const double u0 = axis == 0 ? node(i) : node(a);
                    const double u1 = axis == 1 ? node(i) : (axis == 0 ? node(a) : node(b));
                    const double u2 = axis == 2 ? node(i) : node(b);
                    cond += g(u0, u1, u2);
                }
            }
            cond /= static_cast<double>(n) * n;
            var_cond_single += (cond - mean) * (cond - mean);
        }
        var_cond_single /= n;
        out.main[axis] = var_cond_single / variance;

        // conditional mean on the complement -> total effect
        double var_cond_pair = 0.0;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                double cond = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double u0 = axis == 0 ? node(i) : node(a);
                    const double u1 = axis == 1 ? node(i) : (axis == 0 ? node(a) : node(b));
                    const double u2 = axis == 2 ? node(i) : node(b);
                    cond += g(u0, u1, u2);
                }
                cond /= n;
                var_cond_pair += (cond - mean) * (cond - mean);
            }
        }
        var_cond_pair /= static_cast<double>(n) * n;
        out.total[axis] = 1.0 - var_cond_pair / variance;
    }
    return out;
}

} // namespace

TEST_CASE("additive test function has analytic indices") {
    const PathFn g = [](std::span<const double> u) { return u[0] + u[1]; };
    const GsaReport report = sobol_indices(g, 2, 1 << 16, GsaSampler::Qmc);
    CHECK(std::abs(report.main_raw[0] - 0.5) < 0.02);
    CHECK(std::abs(report.main_raw[1] - 0.5) < 0.02);
    CHECK(std::abs(report.total_raw[0] - 0.5) < 0.02);
    CHECK(std::abs(report.total_raw[1] - 0.5) < 0.02);
    CHECK(std::abs(report.d_a - 1.0) < 0.02);
    CHECK(average_dimension(report) == report.d_a);
    CHECK(report.fn_type == FnType::A);
    CHECK(std::abs(report.variance - 1.0 / 6.0) < 1e-3);
}

TEST_CASE("multiplicative test function has analytic indices") {
    // product of |4u - 2| factors: S_i = 3/7, S_i^tot = 4/7, d_A = 8/7
    const PathFn g = [](std::span<const double> u) {
        return std::abs(4.0 * u[0] - 2.0) * std::abs(4.0 * u[1] - 2.0);
    };
    const GsaReport report = sobol_indices(g, 2, 1 << 16, GsaSampler::Qmc);
    CHECK(std::abs(report.main_raw[0] - 3.0 / 7.0) < 0.02);
    CHECK(std::abs(report.main_raw[1] - 3.0 / 7.0) < 0.02);
    CHECK(std::abs(report.total_raw[0] - 4.0 / 7.0) < 0.02);
    CHECK(std::abs(report.total_raw[1] - 4.0 / 7.0) < 0.02);
    CHECK(std::abs(report.d_a - 8.0 / 7.0) < 0.02);
}

TEST_CASE("dummy variable carries no total effect") {
    const PathFn g = [](std::span<const double> u) { return std::exp(u[0]); };
    const GsaReport report = sobol_indices(g, 2, 1 << 14, GsaSampler::Qmc);
    CHECK(std::abs(report.total_raw[1]) < 0.01);
    CHECK(std::abs(report.main_raw[1]) < 0.01);
    CHECK(std::abs(report.total_raw[0] - 1.0) < 0.02);
}

TEST_CASE("pick-freeze matches brute-force tensor anova on a piecewise polynomial") {
    auto g3 = [](double a, double b, double c) {
        return a * b + (c > 0.5 ? a - 0.5 : 0.25 * b);
    };
    const TensorAnova oracle = tensor_anova_3d(g3, 100); // 1e6 nodes
    const PathFn g = [&](std::span<const double> u) { return g3(u[0], u[1], u[2]); };
    const GsaReport report = sobol_indices(g, 3, 1 << 16, GsaSampler::Qmc);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(report.main_raw[i] - oracle.main[i]) < 0.02);
        CHECK(std::abs(report.total_raw[i] - oracle.total[i]) < 0.02);
    }
}

TEST_CASE("index estimates are internally consistent") {
    const MarketSpec spec = table_spec();
    const PathFn g = greek_integrand(Instrument::AsianCall, spec, GreekKind::Delta,
                                     GreekMethod::ConditionalPathwise, Scheme::BrownianBridge,
                                     false);
    const GsaReport report = sobol_indices(g, 32, 1 << 14, GsaSampler::Qmc);
    double main_sum_raw = 0.0;
    for (int i = 0; i < 32; ++i) {
        CHECK(report.main_raw[i] <= report.total_raw[i] + 0.02);
        main_sum_raw += std::max(report.main_raw[i], 0.0);
    }
    CHECK(report.main_sum == doctest::Approx(main_sum_raw));
    CHECK(report.main_sum <= 1.02);
    CHECK(report.d_a >= report.main_sum - 0.02);
    CHECK(report.d_a >= 1.0 - 0.02);
}

TEST_CASE("constant integrand degenerates") {
    const PathFn g = [](std::span<const double>) { return 3.0; };
    const GsaReport report = sobol_indices(g, 4, 1 << 10, GsaSampler::Qmc);
    CHECK(report.degenerate);
    CHECK(report.variance == 0.0);
}

TEST_CASE("classification thresholds") {
    GsaReport synthetic;
    synthetic.dim = 3;
    synthetic.variance = 1.0;

    // concentrated, additive-dominated: type A
    synthetic.main_raw = {0.85, 0.02, 0.02};
    synthetic.total_raw = {0.92, 0.04, 0.04};
    synthetic.main_sum = 0.89;
    synthetic.d_a = 1.0;
    CHECK(classify(synthetic) == FnType::A);

    // interactions dominate: type C
    synthetic.main_raw = {0.1, 0.1, 0.1};
    synthetic.total_raw = {0.9, 0.9, 0.9};
    synthetic.main_sum = 0.3;
    synthetic.d_a = 2.7;
    CHECK(classify(synthetic) == FnType::C);

    // additive but spread over equally-important variables with weak
    // main-to-total ratios: type B
    synthetic.main_raw = {0.25, 0.25, 0.25};
    synthetic.total_raw = {0.55, 0.55, 0.55};
    synthetic.main_sum = 0.75;
    synthetic.d_a = 1.65;
    CHECK(classify(synthetic) == FnType::B);

    const auto& th = classify_thresholds();
    CHECK(th.a_main_sum > th.c_main_sum);
    CHECK(fn_type_label(FnType::A) == 'A');
    CHECK(fn_type_label(FnType::B) == 'B');
    CHECK(fn_type_label(FnType::C) == 'C');
}

TEST_CASE("greek integrands compose the node pipeline exactly") {
    const MarketSpec spec = table_spec();
    const GreekRequest request = default_greek_request(Instrument::AsianCall, GreekKind::Delta,
                                                       GreekMethod::FiniteDifference, spec);
    const PathFn composed = greek_integrand(Instrument::AsianCall, spec, GreekKind::Delta,
                                            GreekMethod::FiniteDifference, Scheme::BrownianBridge,
                                            false, request);
    MarketSpec up = spec, dn = spec;
    up.spot += request.fd_shift;
    dn.spot -= request.fd_shift;
    const PathFn plus = make_price_fn(Instrument::AsianCall, up, Scheme::BrownianBridge, false);
    const PathFn minus = make_price_fn(Instrument::AsianCall, dn, Scheme::BrownianBridge, false);

    const SampleMatrix u = pseudo_uniforms(32, 64, 55);
    for (std::int64_t p = 0; p < u.count; ++p) {
        const double manual = (plus(u.point(p)) - minus(u.point(p))) / (2.0 * request.fd_shift);
        REQUIRE(composed(u.point(p)) == doctest::Approx(manual).epsilon(1e-12));
    }
}

TEST_CASE("cpw integrand at the centered point equals the drift-path formula") {
    const MarketSpec spec = table_spec();
    const PathFn g = greek_integrand(Instrument::AsianCall, spec, GreekKind::Delta,
                                     GreekMethod::ConditionalPathwise, Scheme::BrownianBridge,
                                     false);
    const std::vector<double> half(32, 0.5);
    const double at_center = g(half);
    CHECK(std::isfinite(at_center));

    const AssetPath drift = cpw_shifted_path(
        gbm_path(euler_wiener(std::vector<double>(32, 0.0), spec), spec), spec);
    CHECK(at_center == doctest::Approx(cpw_asian_call_greeks(drift, spec).delta).epsilon(1e-12));
}

TEST_CASE("cpw with importance sampling is rejected") {
    const MarketSpec spec = table_spec(90.0);
    CHECK_THROWS_AS(greek_integrand(Instrument::DownOutCall, spec, GreekKind::Delta,
                                    GreekMethod::ConditionalPathwise, Scheme::BrownianBridge,
                                    true),
                    std::invalid_argument);
}

TEST_CASE("sobol_indices input validation") {
    const PathFn g = [](std::span<const double> u) { return u[0]; };
    CHECK_THROWS_AS(sobol_indices(g, 0, 1024, GsaSampler::Qmc), std::invalid_argument);
    CHECK_THROWS_AS(sobol_indices(g, 2, 1, GsaSampler::Qmc), std::invalid_argument);
}

TEST_CASE("pseudo-random sampler also recovers the additive indices") {
    const PathFn g = [](std::span<const double> u) { return u[0] + u[1]; };
    const GsaReport report = sobol_indices(g, 2, 1 << 16, GsaSampler::Pseudo, 17);
    CHECK(std::abs(report.main_raw[0] - 0.5) < 0.05);
    CHECK(std::abs(report.d_a - 1.0) < 0.05);
}
