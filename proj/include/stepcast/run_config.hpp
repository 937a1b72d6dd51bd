#pragma once

// Plain-text `key = value` run configuration with a fixed, documented schema.
// Lines starting with '#' are comments. Unknown keys and unparsable values
// are rejected with the line number; every run can dump the fully resolved
// configuration (defaults included) next to its outputs.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stepcast/abc.hpp"
#include "stepcast/date.hpp"
#include "stepcast/error.hpp"

namespace stepcast {

enum class ValueType { integer, real, text, real_list, integer_list, choice, date, prior };

struct KeySpec {
    std::string key;
    ValueType type;
    std::string default_value;  // empty: unset unless given
    std::string help;
    std::vector<std::string> choices{};
    std::size_t list_size = 0;  // required list length, 0 = any
};

namespace config_detail {
inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    return out;
}

inline double to_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ValidationError("'" + s + "' is not a number");
    }
    if (used != s.size()) throw ValidationError("'" + s + "' is not a number");
    return v;
}

inline std::int64_t to_integer(const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ValidationError("'" + s + "' is not an integer");
    }
    if (used != s.size()) throw ValidationError("'" + s + "' is not an integer");
    return v;
}

/// "gamma:shape,rate" or "uniform:lo,hi".
inline Prior1D to_prior(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ValidationError("prior '" + s + "' must look like gamma:a,b or uniform:lo,hi");
    const auto kind = trim(s.substr(0, colon));
    const auto args = split(s.substr(colon + 1), ',');
    if (args.size() != 2) throw ValidationError("prior '" + s + "' needs two numbers");
    const double a = to_real(args[0]);
    const double b = to_real(args[1]);
    try {
        if (kind == "gamma") return GammaPrior{a, b};
        if (kind == "uniform") return UniformPrior{a, b};
    } catch (const ArgumentError& e) {
        throw ValidationError(e.what());
    }
    throw ValidationError("prior kind must be gamma or uniform, got '" + kind + "'");
}
}  // namespace config_detail

class RunConfig {
public:
    static const std::vector<KeySpec>& schema() {
        using V = ValueType;
        static const std::vector<KeySpec> keys = {
            {"seed", V::integer, "1", "master seed; every stochastic step derives from it"},
            // simulate
            {"model", V::choice, "wellspecified", "generator for simulate", {"wellspecified", "misspecified"}},
            {"sim.theta", V::real, "10", "urn total mass"},
            {"sim.p", V::real, "0.7", "renewal probability"},
            {"sim.alpha", V::real, "0.25", "Beta base measure, first shape"},
            {"sim.beta", V::real, "0.3", "Beta base measure, second shape"},
            {"sim.n", V::integer, "500", "particles"},
            {"sim.T", V::integer, "110", "time horizon; T + 1 curves are written"},
            {"sim.a", V::real, "0.9", "misspecified model: weight on the previous curve"},
            {"sim.noise_size", V::integer, "20", "misspecified model: samples per noise cdf"},
            {"sim.noise_alpha", V::real, "5", "misspecified model: noise Beta first shape"},
            {"sim.noise_beta", V::real, "3", "misspecified model: noise Beta second shape"},
            {"sim.start_date", V::date, "2020-01-01", "date of the first simulated curve"},
            // fit
            {"prior.theta", V::prior, "gamma:2,0.04", "prior of theta (gamma uses shape,rate)"},
            {"prior.p", V::prior, "uniform:0,1", "prior of p"},
            {"prior.alpha", V::prior, "uniform:0,1", "prior of alpha"},
            {"prior.beta", V::prior, "uniform:0,1", "prior of beta"},
            {"proposal.sd", V::real_list, "3,0.15,0.15,0.15", "random-walk sd for theta,p,alpha,beta", {}, 4},
            {"proposal.mode", V::choice, "symmetric", "Hastings correction", {"symmetric", "exact"}},
            {"abc.c", V::real_list, "0.35,0.5,0.02", "threshold fractions c1,c2,c3", {}, 3},
            {"abc.eps", V::real_list, "", "explicit thresholds eps1,eps2,eps3 (override abc.c)", {}, 3},
            {"abc.iterations", V::integer, "50000", "chain length I"},
            {"abc.max_bootstrap", V::integer, "100000", "prior draws allowed before the first acceptance"},
            {"fit.n", V::integer, "0", "particles; 0 calibrates from the smallest jump"},
            {"fit.tol", V::real, "0.001", "lower bound on the jump size used for calibration"},
            {"fit.train", V::integer, "0", "use only the first k curves; 0 uses all"},
            {"fit.lattice", V::choice, "false", "round the data onto the 1/n lattice before fitting", {"true", "false"}},
            {"grid_size", V::integer, "500", "grid points for every curve distance"},
            // forecast
            {"forecast.horizons", V::integer_list, "1,3,8,10", "steps ahead"},
            {"forecast.members", V::integer, "1000", "ensemble size"},
            {"forecast.coverage", V::real, "0.99", "pointwise band coverage"},
            {"forecast.burn_in", V::integer, "0", "chain samples dropped before drawing parameters"},
            {"forecast.thin", V::integer, "1", "keep every k-th chain sample"},
            {"forecast.reconstruction", V::choice, "auto", "particles from the last curve",
             {"auto", "exact", "quantile"}},
            {"forecast.include_members", V::choice, "false", "write every member curve", {"true", "false"}},
            // market
            {"market.side", V::choice, "supply", "curve side fitted from a bid table", {"demand", "supply"}},
            {"market.tie_rule", V::choice, "midpoint", "clearing price on flat crossings",
             {"midpoint", "demand_side", "supply_side"}},
            {"market.cap", V::real, "23", "price cap in EUR/GJ"},
            {"market.L_demand", V::real, "", "known first-jump quantity of the forecast day, demand"},
            {"market.L_supply", V::real, "", "known first-jump quantity of the forecast day, supply"},
            {"ar.coef_prior", V::real, "1000", "Normal prior scale of the AR coefficient"},
            {"ar.coef_prior_scale", V::choice, "variance", "how ar.coef_prior is read", {"variance", "precision"}},
            {"ar.var_shape", V::real, "0.01", "inverse-gamma shape of the innovation variance"},
            {"ar.var_scale", V::real, "0.01", "inverse-gamma scale of the innovation variance"},
            {"ar.chain_length", V::integer, "11000", "Gibbs iterations"},
            {"ar.burn_in", V::integer, "1000", "Gibbs iterations dropped"},
            // serve
            {"serve.host", V::text, "127.0.0.1", "bind address"},
            {"serve.port", V::integer, "8080", "port"},
            {"serve.coverage", V::real, "0.95", "band coverage reported by /ensemble"},
            // paths
            {"path.data", V::text, "", "curve series JSON"},
            {"path.bids", V::text, "", "bid table CSV"},
            {"path.chain", V::text, "", "chain NDJSON"},
            {"path.demand_chain", V::text, "", "chain NDJSON for the demand side"},
            {"path.supply_chain", V::text, "", "chain NDJSON for the supply side"},
            {"path.truth", V::text, "", "truth series JSON or bid CSV for evaluate"},
            {"path.forecasts", V::text, "", "directory with forecast_h*.json"},
            {"path.artifacts", V::text, "", "market ensemble JSON served by serve"},
            {"path.out", V::text, "out", "output directory or file"},
        };
        return keys;
    }

    static const KeySpec& spec(const std::string& key) {
        const auto& s = schema();
        const auto it = std::find_if(s.begin(), s.end(), [&](const KeySpec& k) { return k.key == key; });
        if (it == s.end()) throw ValidationError("unknown config key '" + key + "'");
        return *it;
    }

    RunConfig() {
        for (const auto& k : schema()) values_[k.key] = k.default_value;
    }

    static RunConfig parse(std::istream& in, const std::string& source = "config") {
        RunConfig cfg;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = config_detail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ValidationError(source + ":" + std::to_string(line_no) + ": expected key = value");
            }
            try {
                cfg.set(config_detail::trim(line.substr(0, eq)), config_detail::trim(line.substr(eq + 1)));
            } catch (const ValidationError& e) {
                throw ValidationError(source + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
        return cfg;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open config " + path);
        return parse(in, path);
    }

    /// Validates against the schema before storing.
    void set(const std::string& key, const std::string& value) {
        const KeySpec& k = spec(key);
        try {
            check(k, value);
        } catch (const ValidationError& e) {
            throw ValidationError(key + ": " + e.what());
        }
        values_[key] = value;
        explicit_.insert(key);
    }

    /// "key=value" as given on the command line.
    void set_assignment(const std::string& assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos) throw ValidationError("expected key=value, got '" + assignment + "'");
        set(config_detail::trim(assignment.substr(0, eq)), config_detail::trim(assignment.substr(eq + 1)));
    }

    [[nodiscard]] bool has(const std::string& key) const { return !raw(key).empty(); }
    [[nodiscard]] bool is_explicit(const std::string& key) const { return explicit_.count(key) > 0; }

    [[nodiscard]] const std::string& raw(const std::string& key) const {
        spec(key);
        return values_.at(key);
    }

    [[nodiscard]] std::string text(const std::string& key) const { return required(key); }
    [[nodiscard]] double real(const std::string& key) const { return config_detail::to_real(required(key)); }
    [[nodiscard]] std::int64_t integer(const std::string& key) const {
        return config_detail::to_integer(required(key));
    }
    [[nodiscard]] std::size_t count(const std::string& key) const {
        const auto v = integer(key);
        if (v < 0) throw ValidationError(key + " must be >= 0");
        return static_cast<std::size_t>(v);
    }
    [[nodiscard]] bool flag(const std::string& key) const { return required(key) == "true"; }
    [[nodiscard]] std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        for (const auto& c : config_detail::split(required(key), ',')) out.push_back(config_detail::to_real(c));
        return out;
    }
    [[nodiscard]] std::vector<std::size_t> counts(const std::string& key) const {
        std::vector<std::size_t> out;
        for (const auto& c : config_detail::split(required(key), ',')) {
            const auto v = config_detail::to_integer(c);
            if (v < 0) throw ValidationError(key + " entries must be >= 0");
            out.push_back(static_cast<std::size_t>(v));
        }
        return out;
    }
    [[nodiscard]] Prior1D prior(const std::string& key) const { return config_detail::to_prior(required(key)); }

    [[nodiscard]] PriorSpec prior_spec() const {
        return {prior("prior.theta"), prior("prior.p"), prior("prior.alpha"), prior("prior.beta")};
    }

    [[nodiscard]] ProposalSpec proposal_spec() const {
        ProposalSpec p;
        const auto sd = reals("proposal.sd");
        std::copy(sd.begin(), sd.end(), p.step_sd.begin());
        p.mode = text("proposal.mode") == "exact" ? HastingsMode::exact : HastingsMode::symmetric;
        return p;
    }

    /// Every key with its resolved value, in schema order.
    [[nodiscard]] std::string snapshot() const {
        std::ostringstream out;
        out << "# resolved configuration\n";
        for (const auto& k : schema()) {
            out << k.key << " = " << values_.at(k.key);
            if (!explicit_.count(k.key)) out << "  # default";
            out << '\n';
        }
        return out.str();
    }

private:
    [[nodiscard]] const std::string& required(const std::string& key) const {
        const auto& v = raw(key);
        if (v.empty()) throw ValidationError("config key '" + key + "' is required here");
        return v;
    }

    static void check(const KeySpec& k, const std::string& v) {
        if (v.empty()) return;  // explicit unset
        switch (k.type) {
            case ValueType::integer: config_detail::to_integer(v); break;
            case ValueType::real: config_detail::to_real(v); break;
            case ValueType::text: break;
            case ValueType::date: parse_iso_date(v); break;
            case ValueType::prior: config_detail::to_prior(v); break;
            case ValueType::choice:
                if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
                    std::string all;
                    for (const auto& c : k.choices) all += (all.empty() ? "" : " | ") + c;
                    throw ValidationError("'" + v + "' is not one of " + all);
                }
                break;
            case ValueType::real_list:
            case ValueType::integer_list: {
                const auto cells = config_detail::split(v, ',');
                for (const auto& c : cells) {
                    if (k.type == ValueType::real_list) {
                        config_detail::to_real(c);
                    } else {
                        config_detail::to_integer(c);
                    }
                }
                if (k.list_size && cells.size() != k.list_size) {
                    throw ValidationError("expected " + std::to_string(k.list_size) + " comma-separated values");
                }
                break;
            }
        }
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> explicit_;
};

}  // namespace stepcast
