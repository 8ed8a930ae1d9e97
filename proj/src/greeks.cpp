#include "qgreeks/greeks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "qgreeks/normal.hpp"

namespace qgreeks {

GreekParameter greek_parameter(GreekKind kind) {
    return (kind == GreekKind::Delta || kind == GreekKind::Gamma) ? GreekParameter::Spot
                                                                  : GreekParameter::Volatility;
}

int greek_order(GreekKind kind) {
    return (kind == GreekKind::Delta || kind == GreekKind::Vega) ? 1 : 2;
}

GreekRequest default_greek_request(Instrument instrument, GreekKind kind, GreekMethod method,
                                   const MarketSpec& spec) {
    GreekRequest r;
    r.parameter = greek_parameter(kind);
    r.order = greek_order(kind);
    r.method = method;
    r.ci_points = 7;
    const bool barrier = instrument == Instrument::DownOutCall;
    switch (kind) {
        case GreekKind::Delta:
            r.fd_shift = barrier ? 0.001 * spec.spot : 0.1;
            r.ci_width = barrier ? 0.05 * spec.spot : 0.10 * spec.spot;
            break;
        case GreekKind::Gamma:
            r.fd_shift = barrier ? 0.001 * spec.spot : 0.1;
            r.ci_width = barrier ? 0.075 * spec.spot : 0.10 * spec.spot;
            break;
        case GreekKind::Vega:
        case GreekKind::Vomma:
            r.fd_shift = 0.0003 * spec.sigma;
            r.ci_width = 0.40 * spec.sigma;
            break;
    }
    return r;
}

// --- grids and differentiation matrices --------------------------------------

std::vector<double> chebyshev_grid(double center, double width, int points) {
    if (points < 3) throw std::invalid_argument("chebyshev_grid: need at least 3 points");
    if (!(width > 0)) throw std::invalid_argument("chebyshev_grid: width must be > 0");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        // cos runs 1 -> -1; store ascending
        grid[points - 1 - j] = center + width * std::cos(j * std::numbers::pi / (points - 1));
    }
    grid.front() = center - width;
    grid.back() = center + width;
    return grid;
}

DiffMatrix differentiation_matrix(std::span<const double> grid, int order) {
    const int L = static_cast<int>(grid.size());
    if (L < 2) throw std::invalid_argument("differentiation_matrix: need at least 2 nodes");
    if (order < 1 || order >= L) {
        throw std::invalid_argument("differentiation_matrix: order must be in [1, L-1]");
    }
    for (int i = 0; i < L; ++i) {
        for (int j = i + 1; j < L; ++j) {
            if (grid[i] == grid[j]) {
                throw std::invalid_argument("differentiation_matrix: duplicate grid nodes");
            }
        }
    }

    // barycentric weights, normalized to tame the products
    std::vector<double> w(static_cast<std::size_t>(L), 1.0);
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            if (j != i) w[i] *= (grid[i] - grid[j]);
        }
        w[i] = 1.0 / w[i];
    }
    double scale = 0.0;
    for (double v : w) scale = std::max(scale, std::abs(v));
    for (double& v : w) v /= scale;

    auto idx = [L](int i, int j) { return i * L + j; };
    std::vector<double> d1(static_cast<std::size_t>(L) * L, 0.0);
    for (int i = 0; i < L; ++i) {
        double diag = 0.0;
        for (int j = 0; j < L; ++j) {
            if (j == i) continue;
            d1[idx(i, j)] = (w[j] / w[i]) / (grid[i] - grid[j]);
            diag -= d1[idx(i, j)];
        }
        d1[idx(i, i)] = diag;
    }

    std::vector<double> dm = d1;
    for (int m = 2; m <= order; ++m) {
        std::vector<double> next(static_cast<std::size_t>(L) * L, 0.0);
        for (int i = 0; i < L; ++i) {
            double diag = 0.0;
            for (int j = 0; j < L; ++j) {
                if (j == i) continue;
                next[idx(i, j)] =
                    m / (grid[i] - grid[j]) * ((w[j] / w[i]) * dm[idx(i, i)] - dm[idx(i, j)]);
                diag -= next[idx(i, j)];
            }
            next[idx(i, i)] = diag;
        }
        dm = std::move(next);
    }

    DiffMatrix out;
    out.grid.assign(grid.begin(), grid.end());
    out.order = order;
    out.entries = std::move(dm);
    return out;
}

// --- finite differences and interpolation rows -------------------------------

Estimate fd_first(const Estimate& plus, const Estimate& minus, double h) {
    if (!(h > 0)) throw std::invalid_argument("fd_first: shift h must be > 0");
    const Estimate nodes[] = {plus, minus};
    const double coeffs[] = {1.0 / (2.0 * h), -1.0 / (2.0 * h)};
    return combine_linear(nodes, coeffs);
}

Estimate fd_second(const Estimate& plus, const Estimate& mid, const Estimate& minus, double h) {
    if (!(h > 0)) throw std::invalid_argument("fd_second: shift h must be > 0");
    const Estimate nodes[] = {plus, mid, minus};
    const double inv = 1.0 / (h * h);
    const double coeffs[] = {inv, -2.0 * inv, inv};
    return combine_linear(nodes, coeffs);
}

Estimate ci_greek(std::span<const Estimate> node_values, int order, std::span<const double> grid) {
    if (node_values.size() != grid.size()) {
        throw std::invalid_argument("ci_greek: grid/value length mismatch");
    }
    const DiffMatrix dm = differentiation_matrix(grid, order);
    const int center = (static_cast<int>(grid.size()) - 1) / 2;
    std::vector<double> coeffs(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) coeffs[j] = dm.at(center, static_cast<int>(j));
    return combine_linear(node_values, coeffs);
}

// --- conditional pathwise ----------------------------------------------------

namespace {

struct CpwCommon {
    double t1, sqt1, st1; // t_1, sqrt(t_1), sigma*sqrt(t_1)
    double e1, e2;        // e^{r(t_1 - T)}, e^{-rT}
    double mu;
};

CpwCommon cpw_common(const MarketSpec& spec) {
    CpwCommon c;
    c.t1 = spec.time(1);
    c.sqt1 = std::sqrt(c.t1);
    c.st1 = spec.sigma * c.sqt1;
    c.e1 = std::exp(spec.rate * (c.t1 - spec.maturity));
    c.e2 = spec.discount();
    c.mu = spec.drift();
    return c;
}

// d ln S~_j / d sigma = -sigma (t_j - t_1) + (W_j - W_1), with the increment
// recovered from the shifted level itself.
double x_tilde(double s_tilde, double t_j, const MarketSpec& spec, const CpwCommon& c) {
    const double dt_j = t_j - c.t1;
    const double w_inc = (std::log(s_tilde / spec.spot) - c.mu * dt_j) / spec.sigma;
    return -spec.sigma * dt_j + w_inc;
}

} // namespace

CpwTerms cpw_terms_do_call(const AssetPath& path, const MarketSpec& spec) {
    if (!path.has_shift()) throw std::invalid_argument("cpw_terms_do_call: shifted path missing");
    if (!spec.barrier) throw std::invalid_argument("cpw_terms_do_call: market.barrier missing");
    const CpwCommon c = cpw_common(spec);

    CpwTerms t;
    t.s_tilde_d = path.shifted.back();
    int argmin = 0;
    for (int j = 1; j < static_cast<int>(path.shifted.size()); ++j) {
        if (path.shifted[j] < path.shifted[argmin]) argmin = j;
    }
    t.min_index = argmin + 1;
    t.s_tilde_min = path.shifted[argmin];
    double mean = 0.0;
    for (double s : path.shifted) mean += s;
    t.s_tilde_a = mean / static_cast<double>(path.shifted.size());

    t.psi1 = (std::log(spec.strike / t.s_tilde_d) - c.mu * c.t1) / c.st1;
    t.psi2 = (std::log(*spec.barrier / t.s_tilde_min) - c.mu * c.t1) / c.st1;
    t.psi_d = std::max(t.psi1, t.psi2);
    t.psi_u = std::numeric_limits<double>::infinity();
    t.psi_d_star = t.psi_d - c.st1;
    t.x_tilde_d = x_tilde(t.s_tilde_d, spec.maturity, spec, c);
    return t;
}

double CpwGreeks::pick(GreekKind kind) const {
    switch (kind) {
        case GreekKind::Delta: return delta;
        case GreekKind::Gamma: return gamma;
        case GreekKind::Vega: return vega;
        case GreekKind::Vomma: return vomma;
    }
    return 0.0;
}

CpwGreeks cpw_do_call_greeks(const AssetPath& path, const MarketSpec& spec) {
    const CpwCommon c = cpw_common(spec);
    const CpwTerms t = cpw_terms_do_call(path, spec);
    const double k = spec.strike;
    const double sd = t.s_tilde_d;

    const double n_d = normal_pdf(t.psi_d);
    const double n_ds = normal_pdf(t.psi_d_star);
    const double surv_d = normal_cdf(-t.psi_d);      // 1 - N(psi_d)
    const double surv_ds = normal_cdf(-t.psi_d_star);

    CpwGreeks g;
    g.value = c.e1 * sd * surv_ds - c.e2 * k * surv_d;
    g.delta = c.e1 * (sd / spec.spot) * (surv_ds + n_ds / c.st1) -
              c.e2 * k * n_d / (spec.spot * c.st1);
    g.gamma = (c.e1 * sd * n_ds * t.psi_d - c.e2 * k * n_d * t.psi_d_star) /
              (spec.spot * spec.spot * spec.sigma * spec.sigma * c.t1);

    // sigma-derivatives of the thresholds; the argmin date carries psi_2
    const double xd = t.x_tilde_d;
    const double t_min = spec.time(t.min_index);
    const double x_min = x_tilde(t.s_tilde_min, t_min, spec, c);
    const double g1p = -xd + spec.sigma * c.t1;    // d/dsigma of ln(K/S~_d) - mu t_1
    const double g2p = -x_min + spec.sigma * c.t1; // d/dsigma of ln(B/S~_min) - mu t_1
    const double psi1p = g1p / c.st1 - t.psi1 / spec.sigma;
    const double psi2p = g2p / c.st1 - t.psi2 / spec.sigma;
    const double sig2 = spec.sigma * spec.sigma;
    const double psi2pp = t_min / c.st1 - 2.0 * g2p / (sig2 * c.sqt1) + 2.0 * t.psi2 / sig2;

    const bool branch2 = t.psi2 > t.psi1;
    const double n_2 = normal_pdf(t.psi2);
    const double psi2s = t.psi2 - c.st1;
    const double n_2s = normal_pdf(psi2s);
    const double diff2 = c.e2 * k * n_2 - c.e1 * sd * n_2s; // vanishes at psi_2 = psi_1

    g.vega = c.e1 * sd * (xd * surv_ds + n_ds * c.sqt1);
    if (branch2) g.vega += psi2p * diff2;

    const double psidp = branch2 ? psi2p : psi1p;  // active branch
    const double psidsp = psidp - c.sqt1;
    const double dA = c.e1 * sd *
                      (xd * (xd * surv_ds + n_ds * c.sqt1) + (c.t1 - spec.maturity) * surv_ds -
                       n_ds * psidsp * (xd + t.psi_d_star * c.sqt1));
    g.vomma = dA;
    if (branch2) {
        const double psi2sp = psi2p - c.sqt1;
        const double dB = psi2pp * diff2 +
                          psi2p * (-c.e2 * k * n_2 * t.psi2 * psi2p -
                                   c.e1 * sd * n_2s * (xd - psi2s * psi2sp));
        g.vomma += dB;
    }
    return g;
}

CpwGreeks cpw_asian_call_greeks(const AssetPath& path, const MarketSpec& spec) {
    if (!path.has_shift()) {
        throw std::invalid_argument("cpw_asian_call_greeks: shifted path missing");
    }
    const CpwCommon c = cpw_common(spec);
    const double k = spec.strike;
    const int steps = static_cast<int>(path.shifted.size());

    double sa = 0.0, sa_p = 0.0, sa_pp = 0.0;
    for (int j = 0; j < steps; ++j) {
        const double s = path.shifted[j];
        const double tj = spec.time(j + 1);
        const double x = x_tilde(s, tj, spec, c);
        sa += s;
        sa_p += s * x;
        sa_pp += s * (x * x - (tj - c.t1));
    }
    sa /= steps;
    sa_p /= steps;
    sa_pp /= steps;

    const double psi_d = (std::log(k / sa) - c.mu * c.t1) / c.st1;
    const double psi_ds = psi_d - c.st1;
    const double n_d = normal_pdf(psi_d);
    const double n_ds = normal_pdf(psi_ds);
    const double surv_d = normal_cdf(-psi_d);
    const double surv_ds = normal_cdf(-psi_ds);

    CpwGreeks g;
    g.value = c.e1 * sa * surv_ds - c.e2 * k * surv_d;
    g.delta = c.e1 * (sa / spec.spot) * surv_ds;
    g.gamma = c.e2 * k * n_d / (spec.spot * spec.spot * spec.sigma * c.sqt1);
    g.vega = c.e1 * surv_ds * sa_p + c.e2 * k * n_d * c.sqt1;

    const double gp = -sa_p / sa + spec.sigma * c.t1; // d/dsigma of ln(K/S~_A) - mu t_1
    const double psi_dp = gp / c.st1 - psi_d / spec.sigma;
    const double psi_dsp = psi_dp - c.sqt1;
    g.vomma = c.e1 * (-n_ds * psi_dsp * sa_p + surv_ds * sa_pp) -
              c.e2 * psi_d * k * n_d * psi_dp * c.sqt1;
    return g;
}

// --- per-path CPW functions ---------------------------------------------------

namespace {

struct CpwPipeline {
    MarketSpec spec;
    Scheme scheme;
    const BrownianBridge* bridge;
    std::vector<double> normals, w;
    AssetPath path;

    CpwPipeline(const MarketSpec& s, Scheme sch)
        : spec(s),
          scheme(sch),
          bridge(sch == Scheme::BrownianBridge ? &bridge_plan(s.steps, s.maturity) : nullptr),
          normals(static_cast<std::size_t>(s.steps)),
          w(static_cast<std::size_t>(s.steps)) {
        path.spot.resize(static_cast<std::size_t>(s.steps));
        path.shifted.resize(static_cast<std::size_t>(s.steps));
    }

    const AssetPath& build(std::span<const double> u) {
        const int steps = spec.steps;
        for (int j = 0; j < steps; ++j) normals[j] = inverse_normal_cdf(u[j]);
        if (bridge) {
            bridge->build(normals, w);
        } else {
            euler_levels(normals, spec.dt(), w);
        }
        gbm_from_levels(w, spec, path.spot);
        const double t1 = spec.time(1);
        path.x1 = w[0] / std::sqrt(t1);
        const double shift = std::exp(-spec.drift() * t1 - spec.sigma * w[0]);
        for (int j = 0; j < steps; ++j) path.shifted[j] = path.spot[j] * shift;
        return path;
    }
};

} // namespace

PathFn make_cpw_path_fn(Instrument instrument, const MarketSpec& spec, Scheme scheme,
                        GreekKind kind) {
    spec.validate();
    if (instrument == Instrument::DownOutCall && !spec.barrier) {
        throw std::invalid_argument("make_cpw_path_fn: down_out_call requires market.barrier");
    }
    auto pipe = std::make_shared<CpwPipeline>(spec, scheme);
    if (instrument == Instrument::AsianCall) {
        return [pipe, kind](std::span<const double> u) {
            return cpw_asian_call_greeks(pipe->build(u), pipe->spec).pick(kind);
        };
    }
    return [pipe, kind](std::span<const double> u) {
        return cpw_do_call_greeks(pipe->build(u), pipe->spec).pick(kind);
    };
}

PathFn make_cpw_price_fn(Instrument instrument, const MarketSpec& spec, Scheme scheme) {
    spec.validate();
    auto pipe = std::make_shared<CpwPipeline>(spec, scheme);
    if (instrument == Instrument::AsianCall) {
        return [pipe](std::span<const double> u) {
            return cpw_asian_call_greeks(pipe->build(u), pipe->spec).value;
        };
    }
    return [pipe](std::span<const double> u) {
        return cpw_do_call_greeks(pipe->build(u), pipe->spec).value;
    };
}

// --- Greek pipeline -----------------------------------------------------------

namespace {

MarketSpec with_parameter(const MarketSpec& spec, GreekParameter param, double value) {
    MarketSpec s = spec;
    if (param == GreekParameter::Spot) {
        s.spot = value;
    } else {
        s.sigma = value;
    }
    s.validate();
    return s;
}

double parameter_value(const MarketSpec& spec, GreekParameter param) {
    return param == GreekParameter::Spot ? spec.spot : spec.sigma;
}

void validate_request(const GreekRequest& r, const MarketSpec& spec) {
    if (r.order != 1 && r.order != 2) {
        throw std::invalid_argument("greek request: order must be 1 or 2");
    }
    if (r.method == GreekMethod::FiniteDifference && !(r.fd_shift > 0)) {
        throw std::invalid_argument("greek request: fd_shift must be > 0");
    }
    if (r.method == GreekMethod::ChebyshevInterpolation) {
        if (!(r.ci_width > 0)) throw std::invalid_argument("greek request: ci_width must be > 0");
        if (r.ci_points < 3) throw std::invalid_argument("greek request: ci_points must be >= 3");
        if (!(r.ci_width < parameter_value(spec, r.parameter))) {
            throw std::invalid_argument("greek request: ci_width must keep the grid positive");
        }
    }
}

} // namespace

Estimate estimate_greek(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                        GreekMethod method, Scheme scheme, bool importance_sampling,
                        const SamplerConfig& sampler, const GreekRequest& request) {
    validate_request(request, spec);
    if (method == GreekMethod::ConditionalPathwise) {
        if (importance_sampling) {
            throw std::invalid_argument("estimate_greek: cpw cannot combine with importance sampling");
        }
        return sampled_estimate(make_cpw_path_fn(instrument, spec, scheme, kind), spec.steps,
                                sampler);
    }

    const GreekParameter param = request.parameter;
    const double theta = parameter_value(spec, param);
    const int order = request.order;

    std::vector<double> grid;
    std::vector<double> coeffs;
    if (method == GreekMethod::FiniteDifference) {
        const double h = request.fd_shift;
        if (order == 1) {
            grid = {theta + h, theta - h};
            coeffs = {1.0 / (2.0 * h), -1.0 / (2.0 * h)};
        } else {
            grid = {theta + h, theta, theta - h};
            coeffs = {1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)};
        }
    } else {
        grid = chebyshev_grid(theta, request.ci_width, request.ci_points);
        const DiffMatrix dm = differentiation_matrix(grid, order);
        const int center = (static_cast<int>(grid.size()) - 1) / 2;
        coeffs.resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            coeffs[j] = dm.at(center, static_cast<int>(j));
        }
    }

    std::vector<PathFn> nodes;
    nodes.reserve(grid.size());
    for (double value : grid) {
        nodes.push_back(make_price_fn(instrument, with_parameter(spec, param, value), scheme,
                                      importance_sampling));
    }
    const std::vector<Estimate> node_estimates = batched_estimate(nodes, spec.steps, sampler);
    return combine_linear(node_estimates, coeffs);
}

Estimate estimate_greek(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                        GreekMethod method, Scheme scheme, bool importance_sampling,
                        const SamplerConfig& sampler) {
    return estimate_greek(instrument, spec, kind, method, scheme, importance_sampling, sampler,
                          default_greek_request(instrument, kind, method, spec));
}

} // namespace qgreeks
