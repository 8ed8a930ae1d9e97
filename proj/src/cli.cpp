#include "qgreeks/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgreeks/config.hpp"
#include "qgreeks/experiments.hpp"
#include "qgreeks/gsa.hpp"
#include "qgreeks/seeding.hpp"

namespace qgreeks {

namespace {

constexpr const char* kVersion = "qgreeks 0.1.0";

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

nlohmann::json base_metadata(const std::string& command, const RunConfig& cfg) {
    nlohmann::json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    std::ostringstream hash;
    hash << "0x" << std::hex << config_hash(cfg);
    meta["config_hash"] = hash.str();
    meta["master_seed"] = cfg.master_seed;
    meta["config"] = serialize_config(cfg);
    meta["uniforms"] = {
        {"pseudo", "mt19937_64, 53-bit cell-centered mapping"},
        {"lds", "sobol joe-kuo-d6 table (192 dims), natural indexing, zero point skipped"},
        {"scramble", "nested uniform scramble, hash-keyed per-prefix flips, zero point included"},
    };
    if (cfg.importance_sampling) {
        meta["importance_sampling_composition"] =
            "one-sided conditional sampling applied in the scheme's construction order: "
            "sequential transitions under euler, terminal-first truncated bridge fills "
            "under bbd; terminal threshold max(barrier, strike)";
    }
    return meta;
}

void write_metadata(const std::filesystem::path& dir, const std::string& command,
                    const nlohmann::json& meta) {
    write_file(dir / (command + "_meta.json"), meta.dump(2) + "\n");
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> budget;
};

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg = args.config_path.empty() ? RunConfig{} : parse_config_file(args.config_path);
    if (args.seed) cfg.master_seed = *args.seed;
    if (args.budget) apply_override(cfg, "budgets = " + *args.budget);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    for (const auto& o : args.overrides) apply_override(cfg, o);
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    return cfg;
}

// --- subcommands --------------------------------------------------------------

int cmd_price(const RunConfig& cfg) {
    std::ostringstream csv;
    csv << "instrument,scheme,sampler,N,n,K,value,std_error\n";
    for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
        const std::int64_t budget = cfg.budgets[i];
        const std::uint64_t seed = derive_seed(cfg.master_seed, i);
        Estimate e;
        if (cfg.sampler == Sampler::MonteCarlo) {
            e = mc_estimate(
                make_price_fn(cfg.instrument, cfg.market, cfg.scheme, cfg.importance_sampling),
                cfg.market.steps, budget, seed);
        } else {
            SamplerConfig sc = cfg.sampler_config(budget);
            sc.seed = seed;
            e = sampled_estimate(
                make_price_fn(cfg.instrument, cfg.market, cfg.scheme, cfg.importance_sampling),
                cfg.market.steps, sc);
        }
        csv << to_string(cfg.instrument) << ',' << to_string(cfg.scheme) << ','
            << to_string(cfg.sampler) << ',' << e.total_budget() << ',' << e.n_per_replicate << ','
            << e.replicates << ',' << fmt(e.value) << ',' << fmt(e.std_error) << '\n';
    }
    write_file(std::filesystem::path(cfg.output_dir) / "price.csv", csv.str());
    write_metadata(cfg.output_dir, "price", base_metadata("price", cfg));
    return 0;
}

int cmd_greek(const RunConfig& cfg) {
    if (!cfg.greek) throw ConfigError("field 'greek': required for the greek subcommand");
    const GreekRequest request = cfg.greek_request();
    std::ostringstream csv;
    csv << "instrument,scheme,sampler,N,n,K,greek,method,h_or_width,L,value,std_error\n";
    for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
        SamplerConfig sc = cfg.sampler_config(cfg.budgets[i]);
        sc.seed = derive_seed(cfg.master_seed, i);
        const Estimate e = estimate_greek(cfg.instrument, cfg.market, *cfg.greek, cfg.method,
                                          cfg.scheme, cfg.importance_sampling, sc, request);
        const double h_or_width = cfg.method == GreekMethod::ChebyshevInterpolation
                                      ? request.ci_width
                                      : request.fd_shift;
        const int l = cfg.method == GreekMethod::ChebyshevInterpolation ? request.ci_points
                      : cfg.method == GreekMethod::FiniteDifference     ? (request.order + 1)
                                                                        : 1;
        csv << to_string(cfg.instrument) << ',' << to_string(cfg.scheme) << ','
            << to_string(cfg.sampler) << ',' << e.total_budget() << ',' << e.n_per_replicate << ','
            << e.replicates << ',' << to_string(*cfg.greek) << ',' << to_string(cfg.method) << ','
            << fmt(h_or_width) << ',' << l << ',' << fmt(e.value) << ',' << fmt(e.std_error)
            << '\n';
    }
    write_file(std::filesystem::path(cfg.output_dir) / "greek.csv", csv.str());
    write_metadata(cfg.output_dir, "greek", base_metadata("greek", cfg));
    return 0;
}

int cmd_gsa(const RunConfig& cfg) {
    PathFn g;
    if (cfg.greek) {
        g = greek_integrand(cfg.instrument, cfg.market, *cfg.greek, cfg.method, cfg.scheme,
                            cfg.importance_sampling, cfg.greek_request());
    } else {
        g = make_price_fn(cfg.instrument, cfg.market, cfg.scheme, cfg.importance_sampling);
    }
    const GsaSampler sampler =
        cfg.sampler == Sampler::MonteCarlo ? GsaSampler::Pseudo : GsaSampler::Qmc;
    const GsaReport report =
        sobol_indices(g, cfg.market.steps, cfg.gsa_budget, sampler, cfg.master_seed);

    std::ostringstream csv;
    csv << "variable,S_main,S_total\n";
    for (int i = 0; i < report.dim; ++i) {
        csv << (i + 1) << ',' << fmt(report.main_raw[i]) << ',' << fmt(report.total_raw[i]) << '\n';
    }
    csv << "main_sum,d_A,type\n";
    csv << fmt(report.main_sum) << ',' << fmt(report.d_a) << ','
        << (report.degenerate ? '?' : fn_type_label(report.fn_type)) << '\n';
    write_file(std::filesystem::path(cfg.output_dir) / "gsa.csv", csv.str());

    nlohmann::json meta = base_metadata("gsa", cfg);
    const auto& th = classify_thresholds();
    meta["classification_thresholds"] = {{"a_main_sum", th.a_main_sum},
                                         {"a_min_ratio", th.a_min_ratio},
                                         {"c_main_sum", th.c_main_sum},
                                         {"active_fraction", th.active_fraction}};
    meta["degenerate"] = report.degenerate;
    meta["variance"] = report.variance;
    write_metadata(cfg.output_dir, "gsa", meta);
    return 0;
}

int cmd_convergence(const RunConfig& cfg) {
    StudyConfig study;
    study.instrument = cfg.instrument;
    study.market = cfg.market;
    study.scheme = cfg.scheme;
    study.sampler = cfg.sampler;
    study.greek = cfg.greek;
    study.method = cfg.method;
    study.importance_sampling = cfg.importance_sampling;
    study.budgets = cfg.budgets;
    study.replicates = cfg.replicates;
    study.master_seed = cfg.master_seed;
    if (cfg.greek) study.request = cfg.greek_request();

    const ConvergenceResult result = convergence_study(study);

    std::ostringstream csv;
    csv << "N,error\n";
    for (std::size_t i = 0; i < result.budgets.size(); ++i) {
        csv << result.budgets[i] << ',' << fmt(result.errors[i]) << '\n';
    }
    csv << "alpha,intercept,eps0\n";
    csv << fmt(result.alpha) << ',' << fmt(result.intercept) << ',' << fmt(result.eps0) << '\n';
    write_file(std::filesystem::path(cfg.output_dir) / "convergence.csv", csv.str());

    nlohmann::json meta = base_metadata("convergence", cfg);
    meta["complete"] = result.complete;
    if (!result.complete) meta["failure"] = result.failure;
    write_metadata(cfg.output_dir, "convergence", meta);
    return result.complete ? 0 : 1;
}

int cmd_bias_sweep(const RunConfig& cfg, const std::vector<double>& widths_arg,
                   std::int64_t reference_budget) {
    if (!cfg.greek) throw ConfigError("field 'greek': required for the bias-sweep subcommand");
    std::vector<double> widths = widths_arg;
    if (widths.empty()) {
        const GreekRequest request = cfg.greek_request();
        for (double f : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) widths.push_back(f * request.ci_width);
    }
    SamplerConfig working = cfg.sampler_config(cfg.budgets.front());
    working.sampler = Sampler::Rqmc;
    const BiasVarianceResult result =
        bias_variance_sweep(cfg.instrument, cfg.market, *cfg.greek, widths, working,
                            reference_budget, cfg.master_seed);

    std::ostringstream csv;
    csv << "width,bias,rqmc_error,total\n";
    for (std::size_t i = 0; i < result.widths.size(); ++i) {
        csv << fmt(result.widths[i]) << ',' << fmt(result.bias[i]) << ','
            << fmt(result.rqmc_error[i]) << ',' << fmt(result.total[i]) << '\n';
    }
    write_file(std::filesystem::path(cfg.output_dir) / "bias_sweep.csv", csv.str());

    nlohmann::json meta = base_metadata("bias-sweep", cfg);
    meta["reference_value"] = result.reference;
    meta["reference_budget"] = reference_budget;
    write_metadata(cfg.output_dir, "bias_sweep", meta);
    return 0;
}

int cmd_reproduce_table(const RunConfig& cfg, const std::string& which) {
    TableSelector selector;
    if (which == "prices") {
        selector = TableSelector::Prices;
    } else if (which == "gsa_do") {
        selector = TableSelector::GsaDownOut;
    } else if (which == "gsa_asian") {
        selector = TableSelector::GsaAsian;
    } else {
        throw ConfigError("field 'which': expected prices, gsa_do or gsa_asian, got '" + which +
                          "'");
    }

    TableOptions options;
    options.market = cfg.market;
    if (selector != TableSelector::GsaAsian && !options.market.barrier) options.market.barrier = 90.0;
    options.budgets = cfg.budgets;
    options.gsa_budget = cfg.gsa_budget;
    options.replicates = cfg.replicates;
    options.master_seed = cfg.master_seed;
    options.greek_filter = cfg.greek;

    const TableReproduction table = table_reproduction(selector, options);

    std::ostringstream csv;
    if (selector == TableSelector::Prices) {
        csv << "N,instrument,sampler,value,std_error,ref_value,ref_error\n";
        for (const auto& row : table.price_rows) {
            csv << row.budget << ',' << to_string(row.instrument) << ',' << to_string(row.sampler)
                << ',' << fmt(row.value) << ',' << fmt(row.std_error) << ',' << fmt(row.ref_value)
                << ',' << fmt(row.ref_error) << '\n';
        }
    } else {
        csv << "greek,scheme,method,importance_sampling,main_sum,d_A,type,ref_main_sum,ref_d_A,"
               "ref_type\n";
        for (const auto& row : table.gsa_rows) {
            csv << to_string(row.greek) << ',' << to_string(row.scheme) << ','
                << to_string(row.method) << ',' << (row.importance_sampling ? "true" : "false")
                << ',' << fmt(row.main_sum) << ',' << fmt(row.d_a) << ',' << row.type << ','
                << fmt(row.ref_main_sum) << ',' << fmt(row.ref_d_a) << ',' << row.ref_type << '\n';
        }
    }
    write_file(std::filesystem::path(cfg.output_dir) / ("table_" + which + ".csv"), csv.str());

    nlohmann::json meta = base_metadata("reproduce-table", cfg);
    meta["which"] = which;
    write_metadata(cfg.output_dir, "table_" + which, meta);
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Path-dependent option prices, Greeks and Sobol' sensitivity indices "
                 "under MC and randomized QMC"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs common;
    std::vector<double> sweep_widths;
    std::string table_which = "prices";
    std::string reference_budget_text = "2^20";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "configuration file (key = value lines)");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "master seed");
        sub->add_option("--budget", common.budget, "budget list, e.g. 2^14 or 2^10..2^18");
        sub->add_option("--override", common.overrides, "key=value override (repeatable)");
    };

    CLI::App* price = app.add_subcommand("price", "price the configured instrument");
    add_common(price);
    CLI::App* greek = app.add_subcommand("greek", "estimate one Greek");
    add_common(greek);
    CLI::App* gsa = app.add_subcommand("gsa", "Sobol' indices of the configured integrand");
    add_common(gsa);
    CLI::App* convergence = app.add_subcommand("convergence", "error power-law study over budgets");
    add_common(convergence);
    CLI::App* bias = app.add_subcommand("bias-sweep", "interpolation-width bias/variance sweep");
    add_common(bias);
    bias->add_option("--widths", sweep_widths, "absolute interpolation widths to sweep");
    bias->add_option("--reference-budget", reference_budget_text, "reference run budget");
    CLI::App* table = app.add_subcommand("reproduce-table", "side-by-side reference tables");
    add_common(table);
    table->add_option("--which", table_which, "prices | gsa_do | gsa_asian");

    std::vector<std::string> argv_copy = args;
    std::vector<const char*> argv;
    argv.push_back("qgreeks");
    for (const auto& a : argv_copy) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    }

    try {
        const RunConfig cfg = load_config(common);
        if (price->parsed()) return cmd_price(cfg);
        if (greek->parsed()) return cmd_greek(cfg);
        if (gsa->parsed()) return cmd_gsa(cfg);
        if (convergence->parsed()) return cmd_convergence(cfg);
        if (bias->parsed()) {
            RunConfig ref_cfg; // reuse the budget-token parser for the reference budget
            apply_override(ref_cfg, "budgets = " + reference_budget_text);
            return cmd_bias_sweep(cfg, sweep_widths, ref_cfg.budgets.front());
        }
        if (table->parsed()) return cmd_reproduce_table(cfg, table_which);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace qgreeks
