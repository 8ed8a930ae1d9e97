#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qgreeks/gsa.hpp"
#include "qgreeks/greeks.hpp"

namespace qgreeks {

// Least-squares fit of log10(err) = log10(c) - alpha * log10(N).
struct PowerLawFit {
    double alpha = 0.0;
    double intercept = 0.0; // log10(c)
};

PowerLawFit fit_power_law(std::span<const std::int64_t> budgets, std::span<const double> errors);

struct ConvergenceResult {
    std::vector<std::int64_t> budgets;
    std::vector<double> errors;
    double alpha = 0.0;
    double intercept = 0.0;
    double eps0 = 0.0; // error at the smallest budget
    bool complete = true;
    std::string failure; // non-empty when a budget aborted
};

struct StudyConfig {
    Instrument instrument = Instrument::AsianCall;
    MarketSpec market;
    Scheme scheme = Scheme::BrownianBridge;
    Sampler sampler = Sampler::Rqmc;
    std::optional<GreekKind> greek;            // price study when empty
    GreekMethod method = GreekMethod::FiniteDifference;
    bool importance_sampling = false;
    std::vector<std::int64_t> budgets;         // powers of two
    int replicates = 16;
    std::uint64_t master_seed = 0;
    std::optional<GreekRequest> request;       // method parameters override
};

// Runs the configured estimator at each budget with derived per-budget seeds
// and fits the error power law. A failure mid-study returns partial results
// with complete = false.
ConvergenceResult convergence_study(const StudyConfig& cfg);

struct BiasVarianceResult {
    std::vector<double> widths;
    std::vector<double> bias;       // |CI on reference node values - reference|
    std::vector<double> rqmc_error; // in-sample SE of the CI Greek per width
    std::vector<double> total;      // sqrt(bias^2 + rqmc_error^2)
    double reference = 0.0;         // high-budget CPW derivative
};

// Reference values come from RQMC+BBD runs at `reference_budget` total points
// (CPW for the derivative, plain pricing for the node values).
BiasVarianceResult bias_variance_sweep(Instrument instrument, const MarketSpec& spec,
                                       GreekKind kind, std::span<const double> widths,
                                       const SamplerConfig& working,
                                       std::int64_t reference_budget, std::uint64_t seed);

// --- reference tables -------------------------------------------------------

struct PriceRef {
    int log2_budget;
    double mc_do, mc_do_err;
    double mc_asian, mc_asian_err;
    double rqmc_do, rqmc_do_err;
    double rqmc_asian, rqmc_asian_err;
};

struct GsaRef {
    GreekKind greek;
    Scheme scheme;
    GreekMethod method;
    bool importance_sampling;
    double main_sum;
    double d_a;
    char type;
};

std::span<const PriceRef> reference_price_table();
std::span<const GsaRef> reference_gsa_do_table();
std::span<const GsaRef> reference_gsa_asian_table();
const GsaRef* find_gsa_ref(std::span<const GsaRef> table, GreekKind kind, Scheme scheme,
                           GreekMethod method, bool importance_sampling);

// --- table reproduction -----------------------------------------------------

enum class TableSelector { Prices, GsaDownOut, GsaAsian };

struct PriceRow {
    std::int64_t budget;
    Instrument instrument;
    Sampler sampler;
    double value, std_error;
    double ref_value, ref_error;
};

struct GsaRow {
    GreekKind greek;
    Scheme scheme;
    GreekMethod method;
    bool importance_sampling;
    double main_sum, d_a;
    char type;
    double ref_main_sum, ref_d_a;
    char ref_type;
};

struct TableReproduction {
    TableSelector selector;
    std::vector<PriceRow> price_rows;
    std::vector<GsaRow> gsa_rows;
};

struct TableOptions {
    MarketSpec market;
    std::vector<std::int64_t> budgets;     // prices: budgets to reproduce
    std::int64_t gsa_budget = 1 << 16;
    int replicates = 16;
    std::uint64_t master_seed = 0;
    std::optional<GreekKind> greek_filter; // gsa tables: restrict to one Greek
};

TableReproduction table_reproduction(TableSelector selector, const TableOptions& options);

} // namespace qgreeks
