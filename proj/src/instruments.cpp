#include "qgreeks/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "qgreeks/normal.hpp"

namespace qgreeks {

PayoffResult asian_call(const AssetPath& path, const MarketSpec& spec) {
    double mean = 0.0;
    for (double s : path.spot) mean += s;
    mean /= static_cast<double>(path.spot.size());
    return {spec.discount() * std::max(mean - spec.strike, 0.0), 1.0, true};
}

PayoffResult down_out_call(const AssetPath& path, const MarketSpec& spec) {
    if (!spec.barrier) throw std::invalid_argument("down_out_call: market.barrier missing");
    const double barrier = *spec.barrier;
    bool alive = true;
    for (double s : path.spot) {
        if (s <= barrier) {
            alive = false;
            break;
        }
    }
    const double value = alive ? spec.discount() * std::max(path.spot.back() - spec.strike, 0.0) : 0.0;
    return {value, 1.0, alive};
}

namespace {

// Nudges a uniform away from the closed endpoints before the inverse CDF.
inline double clamp_open(double u) {
    constexpr double lo = 0x1p-53;
    constexpr double hi = 1.0 - 0x1p-53;
    return std::min(std::max(u, lo), hi);
}

} // namespace

std::pair<AssetPath, PayoffResult> is_barrier_path(std::span<const double> uniforms,
                                                   const MarketSpec& spec, Scheme scheme) {
    if (!spec.barrier) throw std::invalid_argument("is_barrier_path: market.barrier missing");
    spec.validate();
    const int steps = spec.steps;
    if (static_cast<int>(uniforms.size()) != steps) {
        throw std::invalid_argument("is_barrier_path: uniforms length must equal steps");
    }

    const double mu = spec.drift();
    const double barrier = *spec.barrier;
    const double log_barrier = std::log(barrier);
    const double log_last = std::log(std::max(barrier, spec.strike));

    AssetPath path;
    path.spot.resize(static_cast<std::size_t>(steps));
    double likelihood = 1.0;

    if (scheme == Scheme::Euler) {
        // Appendix-style sequential recursion: each step samples only the
        // surviving branch of the next transition.
        const double dt = spec.dt();
        const double sqdt = std::sqrt(dt);
        double s = spec.spot;
        double first_normal = 0.0;
        for (int j = 0; j < steps; ++j) {
            const double threshold = (j == steps - 1) ? log_last : log_barrier;
            const double p =
                normal_cdf((std::log(s) - threshold + mu * dt) / (spec.sigma * sqdt));
            const double u = clamp_open((1.0 - p) + uniforms[j] * p);
            const double x = inverse_normal_cdf(u);
            if (j == 0) first_normal = x;
            s *= std::exp(mu * dt + spec.sigma * sqdt * x);
            likelihood *= p;
            path.spot[j] = s;
        }
        path.x1 = first_normal;
    } else {
        // Same one-sided conditional sampling, applied in bridge construction
        // order: the terminal draws from its marginal above max(B, K), every
        // midpoint from its bridge conditional above B. Drift drops out of
        // the conditional mean, which interpolates the log-price anchors.
        const BrownianBridge& plan = bridge_plan(steps, spec.maturity);
        const double log_s0 = std::log(spec.spot);
        std::vector<double> y(static_cast<std::size_t>(steps)); // log S_j
        {
            const double mean = log_s0 + mu * spec.maturity;
            const double sd = spec.sigma * plan.std_dev(0);
            const double p = normal_cdf((mean - log_last) / sd);
            const double u = clamp_open((1.0 - p) + uniforms[0] * p);
            y[steps - 1] = mean + sd * inverse_normal_cdf(u);
            likelihood *= p;
        }
        for (int slot = 1; slot < steps; ++slot) {
            const int l = plan.left_index(slot);
            const double y_left = l < 0 ? log_s0 : y[l];
            const double mean =
                plan.left_weight(slot) * y_left + plan.right_weight(slot) * y[plan.right_index(slot)];
            const double sd = spec.sigma * plan.std_dev(slot);
            const double p = normal_cdf((mean - log_barrier) / sd);
            const double u = clamp_open((1.0 - p) + uniforms[slot] * p);
            y[plan.fill_index(slot)] = mean + sd * inverse_normal_cdf(u);
            likelihood *= p;
        }
        for (int j = 0; j < steps; ++j) path.spot[j] = std::exp(y[j]);
        const double t1 = spec.time(1);
        path.x1 = (y[0] - log_s0 - mu * t1) / (spec.sigma * std::sqrt(t1));
    }

    PayoffResult result;
    result.alive = true;
    result.likelihood = likelihood;
    result.value = spec.discount() * (path.spot.back() - spec.strike) * likelihood;
    return {std::move(path), result};
}

PathFn make_price_fn(Instrument instrument, const MarketSpec& spec, Scheme scheme,
                     bool importance_sampling) {
    spec.validate();
    if (instrument == Instrument::DownOutCall && !spec.barrier) {
        throw std::invalid_argument("make_price_fn: down_out_call requires market.barrier");
    }
    if (importance_sampling && instrument != Instrument::DownOutCall) {
        throw std::invalid_argument("make_price_fn: importance sampling requires down_out_call");
    }

    if (importance_sampling) {
        return [spec, scheme](std::span<const double> u) {
            return is_barrier_path(u, spec, scheme).second.value;
        };
    }

    const int steps = spec.steps;
    auto normals = std::make_shared<std::vector<double>>(steps);
    auto w = std::make_shared<std::vector<double>>(steps);
    auto s = std::make_shared<std::vector<double>>(steps);
    const BrownianBridge* bridge =
        scheme == Scheme::BrownianBridge ? &bridge_plan(steps, spec.maturity) : nullptr;

    return [=](std::span<const double> u) {
        for (int j = 0; j < steps; ++j) (*normals)[j] = inverse_normal_cdf(u[j]);
        if (bridge) {
            bridge->build(*normals, *w);
        } else {
            euler_levels(*normals, spec.dt(), *w);
        }
        gbm_from_levels(*w, spec, *s);

        if (instrument == Instrument::AsianCall) {
            double mean = 0.0;
            for (double v : *s) mean += v;
            mean /= static_cast<double>(steps);
            return spec.discount() * std::max(mean - spec.strike, 0.0);
        }
        const double barrier = *spec.barrier;
        for (double v : *s) {
            if (v <= barrier) return 0.0;
        }
        return spec.discount() * std::max(s->back() - spec.strike, 0.0);
    };
}

} // namespace qgreeks
