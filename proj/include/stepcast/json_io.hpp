#pragma once

// JSON / NDJSON / CSV encodings of curves, series, chains, ensembles and AR
// fits. Every top-level document carries "schema_version".

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stepcast/abc.hpp"
#include "stepcast/ar_gibbs.hpp"
#include "stepcast/date.hpp"
#include "stepcast/error.hpp"
#include "stepcast/forecast.hpp"
#include "stepcast/intersect.hpp"
#include "stepcast/market.hpp"
#include "stepcast/step_curve.hpp"
#include "stepcast/summaries.hpp"

namespace stepcast::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {
inline json number(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

inline double to_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ValidationError("expected a number, got " + j.dump());
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return j.at(key);
}

inline void check_schema(const json& j) {
    if (j.is_object() && j.contains("schema_version") && j.at("schema_version").get<int>() > kSchemaVersion) {
        throw ValidationError("unsupported schema_version " + j.at("schema_version").dump());
    }
}
}  // namespace detail

// ---- curves and series

inline json to_json(const StepCurve& c) {
    return {{"domain", {c.domain().lo, c.domain().hi}},
            {"jumps", c.jumps()},
            {"levels", c.levels()},
            {"base_level", c.base_level()}};
}

inline StepCurve curve_from_json(const json& j) {
    try {
        const auto& d = detail::field(j, "domain");
        if (!d.is_array() || d.size() != 2) throw ValidationError("'domain' must be [lo, hi]");
        return StepCurve(detail::field(j, "jumps").get<std::vector<double>>(),
                         detail::field(j, "levels").get<std::vector<double>>(),
                         Domain{d[0].get<double>(), d[1].get<double>()},
                         j.value("base_level", 0.0));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("curve json: ") + e.what());
    }
}

inline json to_json(const CurveSeries& s) {
    json curves = json::array();
    for (std::size_t t = 0; t < s.size(); ++t) {
        json c = to_json(s.curves[t]);
        if (!s.dates.empty()) c["date"] = s.dates[t];
        curves.push_back(std::move(c));
    }
    return {{"schema_version", kSchemaVersion}, {"curves", std::move(curves)}};
}

/// Accepts the wrapped form {"curves": [...]} or a bare array.
inline CurveSeries series_from_json(const json& j) {
    detail::check_schema(j);
    const json& arr = j.is_array() ? j : detail::field(j, "curves");
    if (!arr.is_array()) throw ValidationError("series json: 'curves' must be an array");
    CurveSeries s;
    bool any_date = false;
    for (const auto& c : arr) {
        s.curves.push_back(curve_from_json(c));
        if (c.contains("date")) {
            const auto d = c.at("date").get<std::string>();
            parse_iso_date(d);
            s.dates.push_back(d);
            any_date = true;
        } else {
            s.dates.emplace_back();
        }
    }
    if (!any_date) {
        s.dates.clear();
    } else if (std::any_of(s.dates.begin(), s.dates.end(), [](const auto& d) { return d.empty(); })) {
        throw ValidationError("series json: either every curve has a date or none does");
    }
    s.validate();
    return s;
}

/// Consecutive daily dates from `start`.
inline std::vector<std::string> daily_dates(const std::string& start, std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t t = 0; t < count; ++t) out.push_back(add_days(start, static_cast<int>(t)));
    return out;
}

// ---- summaries

inline json to_json(const SeriesSummary& s) {
    return {{"mean_jump_count", s.mean_jump_count},
            {"mean_consecutive_l2", s.mean_consecutive_l2},
            {"envelope_l2", s.envelope_l2},
            {"pointwise_mean", s.pointwise_mean_grid}};
}

inline json to_json(const Thresholds& t) {
    json j = {{"eps", {detail::number(t.eps1), detail::number(t.eps2), detail::number(t.eps3)}}};
    if (t.c1 != 0.0 || t.c2 != 0.0 || t.c3 != 0.0) j["c"] = {t.c1, t.c2, t.c3};
    return j;
}

inline Thresholds thresholds_from_json(const json& j) {
    const auto& e = detail::field(j, "eps");
    Thresholds t;
    t.eps1 = detail::to_number(e.at(0));
    t.eps2 = detail::to_number(e.at(1));
    t.eps3 = detail::to_number(e.at(2));
    if (j.contains("c")) {
        t.c1 = j["c"].at(0).get<double>();
        t.c2 = j["c"].at(1).get<double>();
        t.c3 = j["c"].at(2).get<double>();
    }
    return t;
}

// ---- chains

inline json to_json(const ParamVector& p) { return {p.theta, p.p, p.alpha, p.beta}; }

inline ParamVector params_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ValidationError("parameter vector must be [theta, p, alpha, beta]");
    return ParamVector(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

inline json to_json(const Prior1D& p) {
    if (const auto* u = std::get_if<UniformPrior>(&p.dist())) return {{"kind", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
    const auto& g = std::get<GammaPrior>(p.dist());
    return {{"kind", "gamma"}, {"shape", g.shape}, {"rate", g.rate}};
}

inline Prior1D prior1d_from_json(const json& j) {
    const auto kind = detail::field(j, "kind").get<std::string>();
    if (kind == "uniform") return UniformPrior{j.at("lo").get<double>(), j.at("hi").get<double>()};
    if (kind == "gamma") return GammaPrior{j.at("shape").get<double>(), j.at("rate").get<double>()};
    throw ValidationError("unknown prior kind '" + kind + "'");
}

inline json to_json(const PriorSpec& p) {
    return {{"theta", to_json(p.theta)}, {"p", to_json(p.p)}, {"alpha", to_json(p.alpha)}, {"beta", to_json(p.beta)}};
}

inline PriorSpec prior_from_json(const json& j) {
    return {prior1d_from_json(j.at("theta")), prior1d_from_json(j.at("p")), prior1d_from_json(j.at("alpha")),
            prior1d_from_json(j.at("beta"))};
}

inline json to_json(const ChainDiagnostics& d) {
    return {{"accepted", d.accepted},
            {"mh_rejected", d.mh_rejected},
            {"gate_rejected", d.gate_rejected},
            {"bootstrap_attempts", d.bootstrap_attempts}};
}

inline json to_json(const ChainSample& s, std::size_t iteration) {
    return {{"record", "sample"},
            {"iteration", iteration},
            {"params", to_json(s.params)},
            {"accepted", s.accepted},
            {"outcome", to_string(s.outcome)},
            {"distances", {s.distances.jumps, s.distances.mean_curve, s.distances.volatility}},
            {"mh_ratio", detail::number(s.mh_ratio)},
            {"proposal", to_json(s.proposal)}};
}

/// First line: a header with the run metadata and diagnostics; then one
/// line per iteration.
inline void write_chain_ndjson(std::ostream& out, const ChainRecord& rec, const json& extra = json::object()) {
    json header = {{"schema_version", kSchemaVersion},
                   {"record", "header"},
                   {"iterations", rec.samples.size()},
                   {"seed", rec.seed},
                   {"acceptance_rate", rec.acceptance_rate},
                   {"thresholds", to_json(rec.thresholds)},
                   {"proposal",
                    {{"step_sd", rec.proposal.step_sd},
                     {"mode", rec.proposal.mode == HastingsMode::exact ? "exact" : "symmetric"}}},
                   {"prior", to_json(rec.prior)},
                   {"diagnostics", to_json(rec.diagnostics)}};
    for (const auto& [k, v] : extra.items()) header[k] = v;
    out << header.dump() << '\n';
    for (std::size_t i = 0; i < rec.samples.size(); ++i) out << to_json(rec.samples[i], i).dump() << '\n';
}

struct LoadedChain {
    ChainRecord record;
    json header;
};

inline StepOutcome outcome_from_string(const std::string& s) {
    for (auto o : {StepOutcome::bootstrap, StepOutcome::accepted, StepOutcome::mh_rejected,
                   StepOutcome::gate1_rejected, StepOutcome::gate2_rejected, StepOutcome::gate3_rejected}) {
        if (s == to_string(o)) return o;
    }
    throw ValidationError("unknown outcome '" + s + "'");
}

inline LoadedChain read_chain_ndjson(std::istream& in) {
    LoadedChain out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError("chain line " + std::to_string(line_no) + ": " + e.what());
        }
        const auto kind = j.value("record", std::string{});
        if (kind == "header") {
            detail::check_schema(j);
            out.header = j;
            out.record.seed = j.value("seed", std::uint64_t{0});
            out.record.acceptance_rate = j.value("acceptance_rate", 0.0);
            if (j.contains("thresholds")) out.record.thresholds = thresholds_from_json(j["thresholds"]);
            if (j.contains("prior")) out.record.prior = prior_from_json(j["prior"]);
            if (j.contains("proposal")) {
                out.record.proposal.step_sd = j["proposal"].at("step_sd").get<std::array<double, 4>>();
                out.record.proposal.mode =
                    j["proposal"].value("mode", "symmetric") == "exact" ? HastingsMode::exact : HastingsMode::symmetric;
            }
            if (j.contains("diagnostics")) {
                const auto& d = j["diagnostics"];
                out.record.diagnostics.accepted = d.value("accepted", std::size_t{0});
                out.record.diagnostics.mh_rejected = d.value("mh_rejected", std::size_t{0});
                out.record.diagnostics.gate_rejected = d.at("gate_rejected").get<std::array<std::size_t, 3>>();
                out.record.diagnostics.bootstrap_attempts = d.value("bootstrap_attempts", std::size_t{0});
            }
        } else if (kind == "sample") {
            ChainSample s;
            s.params = params_from_json(j.at("params"));
            s.accepted = j.value("accepted", false);
            s.outcome = outcome_from_string(j.value("outcome", std::string{"accepted"}));
            const auto& d = j.at("distances");
            s.distances = {d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()};
            s.mh_ratio = detail::to_number(j.at("mh_ratio"));
            s.proposal = params_from_json(j.at("proposal"));
            out.record.samples.push_back(s);
        } else {
            throw ValidationError("chain line " + std::to_string(line_no) + ": unknown record type");
        }
    }
    if (out.header.is_null()) throw ValidationError("chain file has no header record");
    if (out.record.samples.empty()) throw ValidationError("chain file has no samples");
    return out;
}

// ---- ensembles

inline json to_json(const ForecastEnsemble& e, bool include_members = false) {
    json j = {{"schema_version", kSchemaVersion},
              {"horizon", e.horizon},
              {"n_members", e.members.size()},
              {"coverage", e.coverage},
              {"grid_size", e.pointwise_mean_grid.size()},
              {"point_index", e.point_index},
              {"point_estimate", to_json(e.point_estimate)},
              {"pointwise_mean", e.pointwise_mean_grid},
              {"band_lower", e.band_lower},
              {"band_upper", e.band_upper}};
    if (include_members) {
        json m = json::array();
        for (const auto& c : e.members) m.push_back(to_json(c));
        j["members"] = std::move(m);
    }
    return j;
}

inline ForecastEnsemble ensemble_from_json(const json& j) {
    detail::check_schema(j);
    ForecastEnsemble e;
    e.horizon = detail::field(j, "horizon").get<std::size_t>();
    e.coverage = j.value("coverage", 0.99);
    e.point_index = j.value("point_index", std::size_t{0});
    e.point_estimate = curve_from_json(detail::field(j, "point_estimate"));
    e.pointwise_mean_grid = detail::field(j, "pointwise_mean").get<Grid>();
    e.band_lower = detail::field(j, "band_lower").get<Grid>();
    e.band_upper = detail::field(j, "band_upper").get<Grid>();
    if (j.contains("members")) {
        for (const auto& c : j["members"]) e.members.push_back(curve_from_json(c));
    }
    return e;
}

/// grid_x, lower, mean, upper, point
inline void write_bands_csv(std::ostream& out, const ForecastEnsemble& e) {
    const auto xs = grid_points(e.point_estimate.domain(), e.pointwise_mean_grid.size());
    const auto point = to_grid(e.point_estimate, xs.size());
    out << "x,lower,mean,upper,point\n";
    out << std::setprecision(10);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out << xs[k] << ',' << e.band_lower[k] << ',' << e.pointwise_mean_grid[k] << ',' << e.band_upper[k] << ','
            << point[k] << '\n';
    }
}

// ---- auction plane

inline json to_json(const AuctionCurve& c) {
    return {{"side", to_string(c.side())},
            {"jumps", c.jumps()},
            {"prices", c.prices()},
            {"extent", c.extent()},
            {"cap", c.cap()}};
}

inline AuctionCurve auction_curve_from_json(const json& j) {
    try {
        return AuctionCurve(parse_side(detail::field(j, "side").get<std::string>()),
                            detail::field(j, "jumps").get<std::vector<double>>(),
                            detail::field(j, "prices").get<std::vector<double>>(),
                            detail::field(j, "extent").get<double>(), j.value("cap", kPriceCap));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("auction curve json: ") + e.what());
    }
}

inline json to_json(const market::MarketDay& d) {
    return {{"schema_version", kSchemaVersion},
            {"date", d.date},
            {"demand", to_json(d.demand)},
            {"supply", to_json(d.supply)},
            {"demand_L", d.demand_ends.L},
            {"demand_R", d.demand_ends.R},
            {"supply_L", d.supply_ends.L},
            {"supply_R", d.supply_ends.R}};
}

/// Ensemble of (demand, supply) member pairs at one horizon.
struct MarketEnsemble {
    std::size_t horizon = 1;
    std::string date;
    std::vector<market::CurvePair> members;
};

inline json to_json(const MarketEnsemble& e) {
    json members = json::array();
    for (const auto& m : e.members) members.push_back({{"demand", to_json(m.demand)}, {"supply", to_json(m.supply)}});
    json j = {{"horizon", e.horizon}, {"members", std::move(members)}};
    if (!e.date.empty()) j["date"] = e.date;
    return j;
}

inline json market_bundle_to_json(const std::vector<MarketEnsemble>& ensembles, TieRule rule) {
    json hs = json::array();
    for (const auto& e : ensembles) hs.push_back(to_json(e));
    return {{"schema_version", kSchemaVersion}, {"kind", "market_ensemble"}, {"tie_rule", to_string(rule)},
            {"horizons", std::move(hs)}};
}

struct MarketBundle {
    std::vector<MarketEnsemble> ensembles;
    TieRule tie_rule = TieRule::midpoint;
};

inline MarketBundle market_bundle_from_json(const json& j) {
    detail::check_schema(j);
    MarketBundle b;
    b.tie_rule = parse_tie_rule(j.value("tie_rule", std::string{"midpoint"}));
    for (const auto& h : detail::field(j, "horizons")) {
        MarketEnsemble e;
        e.horizon = detail::field(h, "horizon").get<std::size_t>();
        e.date = h.value("date", std::string{});
        for (const auto& m : detail::field(h, "members")) {
            market::CurvePair pair{auction_curve_from_json(detail::field(m, "demand")),
                                   auction_curve_from_json(detail::field(m, "supply"))};
            if (pair.demand.side() != Side::demand || pair.supply.side() != Side::supply) {
                throw ValidationError("market ensemble: member sides are swapped");
            }
            e.members.push_back(std::move(pair));
        }
        if (e.members.empty()) throw ValidationError("market ensemble: horizon without members");
        b.ensembles.push_back(std::move(e));
    }
    return b;
}

// ---- AR fits

namespace detail {
inline json sample_summary(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() > 1 ? v.size() - 1 : 1);
    auto q = [&](double p) { return v[static_cast<std::size_t>(p * static_cast<double>(v.size() - 1))]; };
    return {{"mean", mean}, {"sd", std::sqrt(var)}, {"q025", q(0.025)}, {"q50", q(0.5)}, {"q975", q(0.975)}};
}
}  // namespace detail

inline json to_json(const ar::ARFit& fit) {
    return {{"schema_version", kSchemaVersion},
            {"transform", ar::to_string(fit.transform)},
            {"last_level", fit.last_level},
            {"last_transformed", fit.last_transformed},
            {"n_samples", fit.coef_samples.size()},
            {"coef", detail::sample_summary(fit.coef_samples)},
            {"var", detail::sample_summary(fit.var_samples)}};
}

// ---- files

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace stepcast::io
