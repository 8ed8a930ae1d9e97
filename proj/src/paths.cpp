#include "qgreeks/paths.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qgreeks {

void MarketSpec::validate() const {
    if (!(spot > 0)) throw std::invalid_argument("market.spot must be > 0");
    if (!(sigma > 0)) throw std::invalid_argument("market.sigma must be > 0");
    if (!(maturity > 0)) throw std::invalid_argument("market.maturity must be > 0");
    if (steps < 1) throw std::invalid_argument("market.steps must be >= 1");
    if (!(strike > 0)) throw std::invalid_argument("market.strike must be > 0");
    if (barrier && !(*barrier > 0 && *barrier < spot)) {
        throw std::invalid_argument("market.barrier must satisfy 0 < B < spot");
    }
}

// --- Brownian bridge ---------------------------------------------------------

BrownianBridge::BrownianBridge(int steps, double maturity) : steps_(steps) {
    if (steps < 1) throw std::invalid_argument("bridge: steps must be >= 1");
    const double dt = maturity / steps;
    auto t = [dt](int idx) { return idx < 0 ? 0.0 : dt * (idx + 1); }; // idx -1 is t_0 = 0

    fill_index_.resize(steps);
    left_index_.resize(steps);
    right_index_.resize(steps);
    left_weight_.resize(steps);
    right_weight_.resize(steps);
    std_dev_.resize(steps);

    // terminal point first
    fill_index_[0] = steps - 1;
    left_index_[0] = -1;
    right_index_[0] = steps - 1;
    left_weight_[0] = 0.0;
    right_weight_[0] = 0.0;
    std_dev_[0] = std::sqrt(t(steps - 1));

    std::vector<bool> known(steps, false);
    known[steps - 1] = true;

    for (int slot = 1; slot < steps; ++slot) {
        // widest unset gap; earlier gap wins ties
        int best_left = -2, best_right = -2;
        double best_span = -1.0;
        int gap_start = 0;
        for (int i = 0; i <= steps - 1; ++i) {
            if (!known[i]) continue;
            if (gap_start <= i - 1) {
                const int l = gap_start - 1; // known anchor index (or -1 for t_0)
                const double span = t(i) - t(l);
                if (span > best_span + 1e-15) {
                    best_span = span;
                    best_left = l;
                    best_right = i;
                }
            }
            gap_start = i + 1;
        }
        const int l = best_left, r = best_right;
        const int mid = l + 1 + (r - 1 - (l + 1)) / 2; // earlier midpoint on ties

        fill_index_[slot] = mid;
        left_index_[slot] = l;
        right_index_[slot] = r;
        const double span = t(r) - t(l);
        left_weight_[slot] = (t(r) - t(mid)) / span;
        right_weight_[slot] = (t(mid) - t(l)) / span;
        std_dev_[slot] = std::sqrt((t(mid) - t(l)) * (t(r) - t(mid)) / span);
        known[mid] = true;
    }
}

void BrownianBridge::build(std::span<const double> normals, std::span<double> w_out) const {
    if (static_cast<int>(normals.size()) != steps_) {
        throw std::invalid_argument("bridge: normals length must equal steps");
    }
    w_out[steps_ - 1] = std_dev_[0] * normals[0];
    for (int slot = 1; slot < steps_; ++slot) {
        const int l = left_index_[slot];
        const double wl = l < 0 ? 0.0 : w_out[l];
        w_out[fill_index_[slot]] = left_weight_[slot] * wl +
                                   right_weight_[slot] * w_out[right_index_[slot]] +
                                   std_dev_[slot] * normals[slot];
    }
}

const BrownianBridge& bridge_plan(int steps, double maturity) {
    static std::map<std::pair<int, double>, BrownianBridge> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(steps, maturity);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, BrownianBridge(steps, maturity)).first;
    }
    return it->second;
}

// --- Wiener paths ------------------------------------------------------------

void euler_levels(std::span<const double> normals, double dt, std::span<double> w_out) {
    const double sqdt = std::sqrt(dt);
    double w = 0.0;
    for (std::size_t j = 0; j < normals.size(); ++j) {
        w += sqdt * normals[j];
        w_out[j] = w;
    }
}

WienerPath euler_wiener(std::span<const double> normals, const MarketSpec& spec) {
    if (static_cast<int>(normals.size()) != spec.steps) {
        throw std::invalid_argument("euler_wiener: normals length must equal steps");
    }
    WienerPath path{Scheme::Euler, std::vector<double>(normals.size())};
    euler_levels(normals, spec.dt(), path.values);
    return path;
}

WienerPath brownian_bridge_wiener(std::span<const double> normals, const MarketSpec& spec) {
    if (static_cast<int>(normals.size()) != spec.steps) {
        throw std::invalid_argument("brownian_bridge_wiener: normals length must equal steps");
    }
    WienerPath path{Scheme::BrownianBridge, std::vector<double>(normals.size())};
    bridge_plan(spec.steps, spec.maturity).build(normals, path.values);
    return path;
}

// --- GBM ---------------------------------------------------------------------

void gbm_from_levels(std::span<const double> w, const MarketSpec& spec, std::span<double> s_out) {
    const double mu = spec.drift();
    const double dt = spec.dt();
    for (std::size_t j = 0; j < w.size(); ++j) {
        s_out[j] = spec.spot * std::exp(mu * dt * (static_cast<double>(j) + 1.0) + spec.sigma * w[j]);
    }
}

AssetPath gbm_path(const WienerPath& w, const MarketSpec& spec) {
    if (static_cast<int>(w.values.size()) != spec.steps) {
        throw std::invalid_argument("gbm_path: path length must equal steps");
    }
    AssetPath path;
    path.spot.resize(w.values.size());
    gbm_from_levels(w.values, spec, path.spot);
    path.x1 = w.values[0] / std::sqrt(spec.time(1));
    return path;
}

AssetPath cpw_shifted_path(AssetPath path, const MarketSpec& spec) {
    if (!path.x1) throw std::invalid_argument("cpw_shifted_path: path carries no x1");
    const double t1 = spec.time(1);
    const double shift = std::exp(-spec.drift() * t1 - spec.sigma * (*path.x1) * std::sqrt(t1));
    path.shifted.resize(path.spot.size());
    for (std::size_t j = 0; j < path.spot.size(); ++j) {
        path.shifted[j] = path.spot[j] * shift;
    }
    return path;
}

} // namespace qgreeks
