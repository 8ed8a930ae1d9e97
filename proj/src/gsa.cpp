#include "qgreeks/gsa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qgreeks/sampling.hpp"

namespace qgreeks {

const ClassifyThresholds& classify_thresholds() {
    static const ClassifyThresholds t;
    return t;
}

char fn_type_label(FnType t) {
    switch (t) {
        case FnType::A: return 'A';
        case FnType::B: return 'B';
        case FnType::C: return 'C';
    }
    return '?';
}

FnType classify(const GsaReport& report) {
    const auto& th = classify_thresholds();
    if (report.degenerate) return FnType::C;
    if (report.main_sum <= th.c_main_sum) return FnType::C;
    if (report.main_sum >= th.a_main_sum) {
        double max_total = 0.0;
        for (double t : report.total_raw) max_total = std::max(max_total, t);
        double min_ratio = 1.0;
        for (int i = 0; i < report.dim; ++i) {
            const double total = report.total_raw[i];
            if (total < th.active_fraction * max_total) continue; // inactive variable
            const double main = std::max(report.main_raw[i], 0.0);
            min_ratio = std::min(min_ratio, total > 0 ? main / total : 1.0);
        }
        if (min_ratio >= th.a_min_ratio) return FnType::A;
    }
    return FnType::B;
}

double average_dimension(const GsaReport& report) { return report.d_a; }

GsaReport sobol_indices(const PathFn& g, int dim, std::int64_t budget, GsaSampler sampler,
                        std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("sobol_indices: dim must be >= 1");
    if (budget < 2) throw std::invalid_argument("sobol_indices: budget must be >= 2");

    std::unique_ptr<PointSource> source =
        sampler == GsaSampler::Qmc ? make_sobol_source(2 * dim) : make_pseudo_source(2 * dim, seed);

    std::vector<double> pair(static_cast<std::size_t>(2 * dim));
    std::vector<double> hybrid(static_cast<std::size_t>(dim));

    // accumulators
    std::vector<double> total_acc(static_cast<std::size_t>(dim), 0.0); // (g(u) - g(u with i from u'))^2
    std::vector<double> main_acc(static_cast<std::size_t>(dim), 0.0);  // g(u) (g(u' with i from u) - g(u'))
    double sum = 0.0, sum_sq = 0.0;

    for (std::int64_t p = 0; p < budget; ++p) {
        source->next(pair);
        const std::span<const double> u(pair.data(), static_cast<std::size_t>(dim));
        const std::span<const double> uprime(pair.data() + dim, static_cast<std::size_t>(dim));

        const double gu = g(u);
        const double gup = g(uprime);
        sum += gu + gup;
        sum_sq += gu * gu + gup * gup;

        for (int i = 0; i < dim; ++i) {
            // total: base point with coordinate i replaced from the paired point
            std::copy(u.begin(), u.end(), hybrid.begin());
            hybrid[i] = uprime[i];
            const double g_tot = g(hybrid);
            const double diff = gu - g_tot;
            total_acc[i] += diff * diff;

            // main: paired point with coordinate i replaced from the base point
            std::copy(uprime.begin(), uprime.end(), hybrid.begin());
            hybrid[i] = u[i];
            main_acc[i] += gu * (g(hybrid) - gup);
        }
    }

    const double count = 2.0 * static_cast<double>(budget);
    const double mean = sum / count;
    const double variance = std::max(sum_sq / count - mean * mean, 0.0);

    GsaReport report;
    report.dim = dim;
    report.budget = budget;
    report.variance = variance;
    report.main_raw.resize(static_cast<std::size_t>(dim));
    report.total_raw.resize(static_cast<std::size_t>(dim));
    if (variance == 0.0) {
        report.degenerate = true;
        report.fn_type = FnType::C;
        return report;
    }
    const double inv_n = 1.0 / static_cast<double>(budget);
    double d_a = 0.0, main_sum = 0.0;
    for (int i = 0; i < dim; ++i) {
        report.total_raw[i] = 0.5 * total_acc[i] * inv_n / variance;
        report.main_raw[i] = main_acc[i] * inv_n / variance;
        d_a += report.total_raw[i];
        main_sum += std::max(report.main_raw[i], 0.0);
    }
    report.d_a = d_a;
    report.main_sum = main_sum;
    report.fn_type = classify(report);
    return report;
}

PathFn greek_integrand(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                       GreekMethod method, Scheme scheme, bool importance_sampling,
                       const GreekRequest& request) {
    spec.validate();
    if (method == GreekMethod::ConditionalPathwise) {
        if (importance_sampling) {
            throw std::invalid_argument("greek_integrand: cpw cannot combine with importance sampling");
        }
        return make_cpw_path_fn(instrument, spec, scheme, kind);
    }

    const GreekParameter param = request.parameter;
    const double theta = param == GreekParameter::Spot ? spec.spot : spec.sigma;
    std::vector<double> grid;
    std::vector<double> coeffs;
    if (method == GreekMethod::FiniteDifference) {
        const double h = request.fd_shift;
        if (!(h > 0)) throw std::invalid_argument("greek_integrand: fd_shift must be > 0");
        if (request.order == 1) {
            grid = {theta + h, theta - h};
            coeffs = {1.0 / (2.0 * h), -1.0 / (2.0 * h)};
        } else {
            grid = {theta + h, theta, theta - h};
            coeffs = {1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)};
        }
    } else {
        grid = chebyshev_grid(theta, request.ci_width, request.ci_points);
        const DiffMatrix dm = differentiation_matrix(grid, request.order);
        const int center = (static_cast<int>(grid.size()) - 1) / 2;
        coeffs.resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            coeffs[j] = dm.at(center, static_cast<int>(j));
        }
    }

    auto nodes = std::make_shared<std::vector<PathFn>>();
    nodes->reserve(grid.size());
    for (double value : grid) {
        MarketSpec node_spec = spec;
        if (param == GreekParameter::Spot) {
            node_spec.spot = value;
        } else {
            node_spec.sigma = value;
        }
        nodes->push_back(make_price_fn(instrument, node_spec, scheme, importance_sampling));
    }
    return [nodes, coeffs](std::span<const double> u) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nodes->size(); ++j) acc += coeffs[j] * (*nodes)[j](u);
        return acc;
    };
}

PathFn greek_integrand(Instrument instrument, const MarketSpec& spec, GreekKind kind,
                       GreekMethod method, Scheme scheme, bool importance_sampling) {
    return greek_integrand(instrument, spec, kind, method, scheme, importance_sampling,
                           default_greek_request(instrument, kind, method, spec));
}

} // namespace qgreeks
