#include "qgreeks/config.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <sstream>

namespace qgreeks {

std::string to_string(Instrument v) {
    return v == Instrument::AsianCall ? "asian_call" : "down_out_call";
}
std::string to_string(Scheme v) { return v == Scheme::Euler ? "euler" : "bbd"; }
std::string to_string(Sampler v) { return v == Sampler::MonteCarlo ? "mc" : "rqmc"; }
std::string to_string(GreekMethod v) {
    switch (v) {
        case GreekMethod::FiniteDifference: return "fd";
        case GreekMethod::ChebyshevInterpolation: return "ci";
        case GreekMethod::ConditionalPathwise: return "cpw";
    }
    return "?";
}
std::string to_string(GreekKind v) {
    switch (v) {
        case GreekKind::Delta: return "delta";
        case GreekKind::Gamma: return "gamma";
        case GreekKind::Vega: return "vega";
        case GreekKind::Vomma: return "vomma";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& field, const std::string& message, int line = 0) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << "field '" << field << "': " << message;
    throw ConfigError(os.str());
}

double parse_double(const std::string& field, const std::string& value, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) fail(field, "trailing characters in '" + value + "'", line);
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(field, "cannot parse number '" + value + "'", line);
    }
}

std::int64_t parse_budget_token(const std::string& field, const std::string& token, int line) {
    const std::string t = trim(token);
    std::int64_t v = 0;
    if (t.rfind("2^", 0) == 0) {
        const int p = static_cast<int>(parse_double(field, t.substr(2), line));
        if (p < 0 || p > 62) fail(field, "exponent out of range in '" + t + "'", line);
        v = 1ll << p;
    } else {
        try {
            v = std::stoll(t);
        } catch (const std::exception&) {
            fail(field, "cannot parse budget '" + t + "'", line);
        }
    }
    if (v < 2) fail(field, "budget must be >= 2", line);
    return v;
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
    if (key == "instrument") {
        if (value == "asian_call") {
            cfg.instrument = Instrument::AsianCall;
        } else if (value == "down_out_call") {
            cfg.instrument = Instrument::DownOutCall;
        } else {
            fail(key, "expected asian_call or down_out_call, got '" + value + "'", line);
        }
    } else if (key == "scheme") {
        if (value == "euler") {
            cfg.scheme = Scheme::Euler;
        } else if (value == "bbd") {
            cfg.scheme = Scheme::BrownianBridge;
        } else {
            fail(key, "expected euler or bbd, got '" + value + "'", line);
        }
    } else if (key == "sampler") {
        if (value == "mc") {
            cfg.sampler = Sampler::MonteCarlo;
        } else if (value == "rqmc") {
            cfg.sampler = Sampler::Rqmc;
        } else {
            fail(key, "expected mc or rqmc, got '" + value + "'", line);
        }
    } else if (key == "method") {
        if (value == "fd") {
            cfg.method = GreekMethod::FiniteDifference;
        } else if (value == "ci") {
            cfg.method = GreekMethod::ChebyshevInterpolation;
        } else if (value == "cpw") {
            cfg.method = GreekMethod::ConditionalPathwise;
        } else {
            fail(key, "expected fd, ci or cpw, got '" + value + "'", line);
        }
    } else if (key == "importance_sampling") {
        if (value == "true" || value == "1") {
            cfg.importance_sampling = true;
        } else if (value == "false" || value == "0") {
            cfg.importance_sampling = false;
        } else {
            fail(key, "expected true or false, got '" + value + "'", line);
        }
    } else if (key == "greek") {
        if (value == "none" || value.empty()) {
            cfg.greek.reset();
        } else if (value == "delta") {
            cfg.greek = GreekKind::Delta;
        } else if (value == "gamma") {
            cfg.greek = GreekKind::Gamma;
        } else if (value == "vega") {
            cfg.greek = GreekKind::Vega;
        } else if (value == "vomma") {
            cfg.greek = GreekKind::Vomma;
        } else {
            fail(key, "expected delta, gamma, vega or vomma, got '" + value + "'", line);
        }
    } else if (key == "budgets" || key == "budget") {
        cfg.budgets.clear();
        std::stringstream ss(value);
        std::string token;
        while (std::getline(ss, token, ',')) {
            const std::size_t range = token.find("..");
            if (range != std::string::npos) {
                // doubling range, e.g. 2^10..2^18
                std::int64_t lo = parse_budget_token(key, token.substr(0, range), line);
                const std::int64_t hi = parse_budget_token(key, token.substr(range + 2), line);
                if (lo > hi) fail(key, "empty budget range '" + token + "'", line);
                for (; lo <= hi; lo *= 2) cfg.budgets.push_back(lo);
            } else {
                cfg.budgets.push_back(parse_budget_token(key, token, line));
            }
        }
        if (cfg.budgets.empty()) fail(key, "no budgets given", line);
    } else if (key == "replicates") {
        cfg.replicates = static_cast<int>(parse_double(key, value, line));
    } else if (key == "master_seed") {
        try {
            cfg.master_seed = std::stoull(value);
        } catch (const std::exception&) {
            fail(key, "cannot parse seed '" + value + "'", line);
        }
    } else if (key == "spot") {
        cfg.market.spot = parse_double(key, value, line);
    } else if (key == "rate") {
        cfg.market.rate = parse_double(key, value, line);
    } else if (key == "sigma") {
        cfg.market.sigma = parse_double(key, value, line);
    } else if (key == "maturity") {
        cfg.market.maturity = parse_double(key, value, line);
    } else if (key == "steps") {
        cfg.market.steps = static_cast<int>(parse_double(key, value, line));
    } else if (key == "strike") {
        cfg.market.strike = parse_double(key, value, line);
    } else if (key == "barrier") {
        if (value == "none" || value.empty()) {
            cfg.market.barrier.reset();
        } else {
            cfg.market.barrier = parse_double(key, value, line);
        }
    } else if (key == "fd_shift") {
        cfg.fd_shift = parse_double(key, value, line);
    } else if (key == "ci_width") {
        cfg.ci_width = parse_double(key, value, line);
    } else if (key == "ci_points") {
        cfg.ci_points = static_cast<int>(parse_double(key, value, line));
    } else if (key == "gsa_budget") {
        cfg.gsa_budget = parse_budget_token(key, value, line);
    } else if (key == "out_dir") {
        cfg.output_dir = value;
    } else {
        fail(key, "unknown configuration key", line);
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            fail(line, "expected 'key = value'", line_no);
        }
        assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("field 'config': cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("field 'override': expected key=value, got '" + assignment + "'");
    }
    assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), 0);
}

void RunConfig::validate() const {
    try {
        market.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("field '") + ex.what() + "'");
    }
    if (instrument == Instrument::DownOutCall && !market.barrier) {
        throw ConfigError("field 'barrier': required for down_out_call");
    }
    if (importance_sampling && instrument != Instrument::DownOutCall) {
        throw ConfigError("field 'importance_sampling': requires down_out_call");
    }
    if (importance_sampling && method == GreekMethod::ConditionalPathwise) {
        throw ConfigError("field 'method': cpw cannot combine with importance_sampling");
    }
    if (replicates < 1) throw ConfigError("field 'replicates': must be >= 1");
    if (budgets.empty()) throw ConfigError("field 'budgets': must not be empty");
    for (std::int64_t b : budgets) {
        if (!std::has_single_bit(static_cast<std::uint64_t>(b))) {
            throw ConfigError("field 'budgets': " + std::to_string(b) + " is not a power of two");
        }
        if (sampler == Sampler::Rqmc && b % replicates != 0) {
            throw ConfigError("field 'budgets': " + std::to_string(b) +
                              " does not split into replicates");
        }
    }
    if (ci_points < 3) throw ConfigError("field 'ci_points': must be >= 3");
    if (fd_shift && !(*fd_shift > 0)) throw ConfigError("field 'fd_shift': must be > 0");
    if (ci_width && !(*ci_width > 0)) throw ConfigError("field 'ci_width': must be > 0");
    if (gsa_budget < 2) throw ConfigError("field 'gsa_budget': must be >= 2");
}

SamplerConfig RunConfig::sampler_config(std::int64_t total_budget) const {
    SamplerConfig cfg;
    cfg.sampler = sampler;
    cfg.replicates = replicates;
    cfg.n = total_budget / replicates;
    cfg.seed = master_seed;
    return cfg;
}

GreekRequest RunConfig::greek_request() const {
    const GreekKind kind = greek.value_or(GreekKind::Delta);
    GreekRequest r = default_greek_request(instrument, kind, method, market);
    if (fd_shift) r.fd_shift = *fd_shift;
    if (ci_width) r.ci_width = *ci_width;
    r.ci_points = ci_points;
    return r;
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "instrument = " << to_string(cfg.instrument) << "\n";
    os << "scheme = " << to_string(cfg.scheme) << "\n";
    os << "sampler = " << to_string(cfg.sampler) << "\n";
    os << "method = " << to_string(cfg.method) << "\n";
    os << "importance_sampling = " << (cfg.importance_sampling ? "true" : "false") << "\n";
    os << "greek = " << (cfg.greek ? to_string(*cfg.greek) : std::string("none")) << "\n";
    os << "budgets = ";
    for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
        if (i) os << ",";
        os << cfg.budgets[i];
    }
    os << "\n";
    os << "replicates = " << cfg.replicates << "\n";
    os << "master_seed = " << cfg.master_seed << "\n";
    os << "spot = " << cfg.market.spot << "\n";
    os << "rate = " << cfg.market.rate << "\n";
    os << "sigma = " << cfg.market.sigma << "\n";
    os << "maturity = " << cfg.market.maturity << "\n";
    os << "steps = " << cfg.market.steps << "\n";
    os << "strike = " << cfg.market.strike << "\n";
    os << "barrier = ";
    if (cfg.market.barrier) {
        os << *cfg.market.barrier;
    } else {
        os << "none";
    }
    os << "\n";
    if (cfg.fd_shift) os << "fd_shift = " << *cfg.fd_shift << "\n";
    if (cfg.ci_width) os << "ci_width = " << *cfg.ci_width << "\n";
    os << "ci_points = " << cfg.ci_points << "\n";
    os << "gsa_budget = " << cfg.gsa_budget << "\n";
    os << "out_dir = " << cfg.output_dir << "\n";
    return os.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace qgreeks
