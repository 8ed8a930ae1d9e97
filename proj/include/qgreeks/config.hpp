#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgreeks/estimators.hpp"
#include "qgreeks/greeks.hpp"
#include "qgreeks/market.hpp"

namespace qgreeks {

// Raised on malformed or inconsistent configuration; carries the field name
// (and line number when parsed from a file).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` configuration with `#` comments. Defaults mirror the
// bundled market parameters and the per-Greek method-parameter table.
struct RunConfig {
    Instrument instrument = Instrument::AsianCall;
    MarketSpec market;
    Scheme scheme = Scheme::BrownianBridge;
    Sampler sampler = Sampler::Rqmc;
    GreekMethod method = GreekMethod::FiniteDifference;
    bool importance_sampling = false;
    std::optional<GreekKind> greek;
    std::vector<std::int64_t> budgets = {1 << 14};
    int replicates = 16;
    std::uint64_t master_seed = 20260314ull;
    std::optional<double> fd_shift;
    std::optional<double> ci_width;
    int ci_points = 7;
    std::int64_t gsa_budget = 1 << 18;
    std::string output_dir = ".";

    // Consistency checks across fields (barrier presence, IS combinations,
    // power-of-two budgets). Throws ConfigError naming the field.
    void validate() const;

    SamplerConfig sampler_config(std::int64_t total_budget) const;
    GreekRequest greek_request() const; // defaults resolved for (instrument, greek, method)
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Applies `key=value` overrides on top of a parsed config.
void apply_override(RunConfig& cfg, const std::string& assignment);

// Canonical serialization; parse(serialize(cfg)) is semantically identical.
std::string serialize_config(const RunConfig& cfg);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const RunConfig& cfg);

// enum <-> text used by config and CSV output
std::string to_string(Instrument v);
std::string to_string(Scheme v);
std::string to_string(Sampler v);
std::string to_string(GreekMethod v);
std::string to_string(GreekKind v);

} // namespace qgreeks
