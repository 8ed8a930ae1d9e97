#include "qgreeks/experiments.hpp"

#include <cmath>
#include <stdexcept>

#include "qgreeks/seeding.hpp"

namespace qgreeks {

PowerLawFit fit_power_law(std::span<const std::int64_t> budgets, std::span<const double> errors) {
    if (budgets.size() != errors.size() || budgets.size() < 3) {
        throw std::invalid_argument("fit_power_law: need at least 3 (budget, error) pairs");
    }
    const std::size_t n = budgets.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(errors[i] > 0)) throw std::invalid_argument("fit_power_law: errors must be > 0");
        const double x = std::log10(static_cast<double>(budgets[i]));
        const double y = std::log10(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    PowerLawFit fit;
    fit.alpha = -slope;
    fit.intercept = (sy - slope * sx) / n;
    return fit;
}

namespace {

Estimate run_at_budget(const StudyConfig& cfg, std::int64_t budget, std::uint64_t seed) {
    SamplerConfig sampler;
    sampler.sampler = cfg.sampler;
    sampler.seed = seed;
    if (cfg.sampler == Sampler::MonteCarlo && !cfg.greek) {
        // plain price estimator: single full-budget MC pass
        return mc_estimate(
            make_price_fn(cfg.instrument, cfg.market, cfg.scheme, cfg.importance_sampling),
            cfg.market.steps, budget, seed);
    }
    sampler.replicates = cfg.replicates;
    sampler.n = budget / cfg.replicates;
    if (sampler.n < 1 || sampler.n * cfg.replicates != budget) {
        throw std::invalid_argument("convergence_study: budget must split into K replicates");
    }
    if (!cfg.greek) {
        return sampled_estimate(
            make_price_fn(cfg.instrument, cfg.market, cfg.scheme, cfg.importance_sampling),
            cfg.market.steps, sampler);
    }
    const GreekRequest request =
        cfg.request ? *cfg.request
                    : default_greek_request(cfg.instrument, *cfg.greek, cfg.method, cfg.market);
    return estimate_greek(cfg.instrument, cfg.market, *cfg.greek, cfg.method, cfg.scheme,
                          cfg.importance_sampling, sampler, request);
}

} // namespace

ConvergenceResult convergence_study(const StudyConfig& cfg) {
    if (cfg.budgets.size() < 3) {
        throw std::invalid_argument("convergence_study: need at least 3 budgets");
    }
    ConvergenceResult result;
    for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
        const std::uint64_t seed = derive_seed(cfg.master_seed, i);
        try {
            const Estimate e = run_at_budget(cfg, cfg.budgets[i], seed);
            result.budgets.push_back(cfg.budgets[i]);
            result.errors.push_back(e.std_error);
        } catch (const std::exception& ex) {
            result.complete = false;
            result.failure = ex.what();
            break;
        }
    }
    if (result.budgets.size() >= 3) {
        const PowerLawFit fit = fit_power_law(result.budgets, result.errors);
        result.alpha = fit.alpha;
        result.intercept = fit.intercept;
    } else {
        result.complete = false;
    }
    if (!result.errors.empty()) result.eps0 = result.errors.front();
    return result;
}

BiasVarianceResult bias_variance_sweep(Instrument instrument, const MarketSpec& spec,
                                       GreekKind kind, std::span<const double> widths,
                                       const SamplerConfig& working,
                                       std::int64_t reference_budget, std::uint64_t seed) {
    if (widths.empty()) throw std::invalid_argument("bias_variance_sweep: no widths");
    if (reference_budget < 2) {
        throw std::invalid_argument("bias_variance_sweep: missing reference budget");
    }

    // Reference derivative: high-budget RQMC+BBD conditional-pathwise run.
    SamplerConfig ref_cfg;
    ref_cfg.sampler = Sampler::Rqmc;
    ref_cfg.replicates = working.replicates;
    ref_cfg.n = reference_budget / ref_cfg.replicates;
    ref_cfg.seed = derive_seed(seed, 0xfeed);
    const Estimate reference =
        estimate_greek(instrument, spec, kind, GreekMethod::ConditionalPathwise,
                       Scheme::BrownianBridge, false, ref_cfg);

    GreekRequest request =
        default_greek_request(instrument, kind, GreekMethod::ChebyshevInterpolation, spec);

    BiasVarianceResult result;
    result.reference = reference.value;
    for (std::size_t widx = 0; widx < widths.size(); ++widx) {
        request.ci_width = widths[widx];

        // bias: CI differentiation applied to reference node prices
        const GreekParameter param = request.parameter;
        const double theta = param == GreekParameter::Spot ? spec.spot : spec.sigma;
        const std::vector<double> grid = chebyshev_grid(theta, request.ci_width, request.ci_points);
        const DiffMatrix dm = differentiation_matrix(grid, request.order);
        const int center = (static_cast<int>(grid.size()) - 1) / 2;
        double ci_of_reference = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            MarketSpec node_spec = spec;
            if (param == GreekParameter::Spot) {
                node_spec.spot = grid[j];
            } else {
                node_spec.sigma = grid[j];
            }
            const Estimate node = sampled_estimate(
                make_cpw_price_fn(instrument, node_spec, Scheme::BrownianBridge),
                node_spec.steps, ref_cfg);
            ci_of_reference += dm.at(center, static_cast<int>(j)) * node.value;
        }
        const double bias = std::abs(ci_of_reference - reference.value);

        // in-sample error of the CI Greek at the working budget
        SamplerConfig work = working;
        work.seed = derive_seed(seed, widx + 1);
        const Estimate greek =
            estimate_greek(instrument, spec, kind, GreekMethod::ChebyshevInterpolation,
                           Scheme::BrownianBridge, false, work, request);

        result.widths.push_back(widths[widx]);
        result.bias.push_back(bias);
        result.rqmc_error.push_back(greek.std_error);
        result.total.push_back(std::sqrt(bias * bias + greek.std_error * greek.std_error));
    }
    return result;
}

TableReproduction table_reproduction(TableSelector selector, const TableOptions& options) {
    TableReproduction out;
    out.selector = selector;

    if (selector == TableSelector::Prices) {
        std::size_t study = 0;
        for (std::int64_t budget : options.budgets) {
            int log2n = 0;
            while ((1ll << log2n) < budget) ++log2n;
            const PriceRef* ref = nullptr;
            for (const auto& row : reference_price_table()) {
                if (row.log2_budget == log2n) ref = &row;
            }
            if (!ref) continue;
            for (Instrument instrument : {Instrument::DownOutCall, Instrument::AsianCall}) {
                MarketSpec spec = options.market;
                if (instrument == Instrument::AsianCall) spec.barrier.reset();
                for (Sampler sampler : {Sampler::MonteCarlo, Sampler::Rqmc}) {
                    const Scheme scheme = sampler == Sampler::MonteCarlo ? Scheme::Euler
                                                                         : Scheme::BrownianBridge;
                    const std::uint64_t seed = derive_seed(options.master_seed, study++);
                    Estimate e;
                    if (sampler == Sampler::MonteCarlo) {
                        e = mc_estimate(make_price_fn(instrument, spec, scheme, false), spec.steps,
                                        budget, seed);
                    } else {
                        SamplerConfig cfg{Sampler::Rqmc, budget / options.replicates,
                                          options.replicates, seed};
                        e = sampled_estimate(make_price_fn(instrument, spec, scheme, false),
                                             spec.steps, cfg);
                    }
                    PriceRow row;
                    row.budget = budget;
                    row.instrument = instrument;
                    row.sampler = sampler;
                    row.value = e.value;
                    row.std_error = e.std_error;
                    if (instrument == Instrument::DownOutCall) {
                        row.ref_value = sampler == Sampler::MonteCarlo ? ref->mc_do : ref->rqmc_do;
                        row.ref_error =
                            sampler == Sampler::MonteCarlo ? ref->mc_do_err : ref->rqmc_do_err;
                    } else {
                        row.ref_value =
                            sampler == Sampler::MonteCarlo ? ref->mc_asian : ref->rqmc_asian;
                        row.ref_error =
                            sampler == Sampler::MonteCarlo ? ref->mc_asian_err : ref->rqmc_asian_err;
                    }
                    out.price_rows.push_back(row);
                }
            }
        }
        return out;
    }

    const bool down_out = selector == TableSelector::GsaDownOut;
    const std::span<const GsaRef> table =
        down_out ? reference_gsa_do_table() : reference_gsa_asian_table();
    MarketSpec spec = options.market;
    if (!down_out) spec.barrier.reset();
    const Instrument instrument = down_out ? Instrument::DownOutCall : Instrument::AsianCall;

    std::size_t study = 0;
    for (const auto& ref : table) {
        ++study;
        if (options.greek_filter && ref.greek != *options.greek_filter) continue;
        const PathFn g = greek_integrand(instrument, spec, ref.greek, ref.method, ref.scheme,
                                         ref.importance_sampling);
        const GsaReport report = sobol_indices(g, spec.steps, options.gsa_budget, GsaSampler::Qmc,
                                               derive_seed(options.master_seed, study));
        GsaRow row;
        row.greek = ref.greek;
        row.scheme = ref.scheme;
        row.method = ref.method;
        row.importance_sampling = ref.importance_sampling;
        row.main_sum = report.main_sum;
        row.d_a = report.d_a;
        row.type = fn_type_label(report.fn_type);
        row.ref_main_sum = ref.main_sum;
        row.ref_d_a = ref.d_a;
        row.ref_type = ref.type;
        out.gsa_rows.push_back(row);
    }
    return out;
}

} // namespace qgreeks
