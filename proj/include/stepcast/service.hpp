#pragma once

// Request handlers of the what-if service, independent of the HTTP layer.
// State is an immutable market ensemble bundle loaded at startup.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stepcast/error.hpp"
#include "stepcast/forecast.hpp"
#include "stepcast/intersect.hpp"
#include "stepcast/json_io.hpp"
#include "stepcast/market.hpp"

namespace stepcast::service {

using json = nlohmann::json;

struct Response {
    int status = 200;
    json body;
};

inline Response error(int status, const std::string& message, json details = json::object()) {
    json body = {{"schema_version", io::kSchemaVersion}, {"error", message}};
    if (!details.empty()) body["details"] = std::move(details);
    return {status, std::move(body)};
}

struct PriceSummary {
    std::size_t n_members = 0;
    std::size_t n_cleared = 0;
    std::optional<double> mean;
    std::map<std::string, double> quantiles;
    std::vector<double> hist_edges;
    std::vector<std::size_t> hist_counts;
};

inline constexpr double kHistogramBinWidth = 1.0;

/// Mean, nearest-rank quantiles and a unit-width histogram over [0, cap].
inline PriceSummary summarize_prices(std::vector<double> prices, std::size_t n_members, double cap = kPriceCap) {
    PriceSummary s;
    s.n_members = n_members;
    s.n_cleared = prices.size();
    const auto bins = static_cast<std::size_t>(std::ceil(cap / kHistogramBinWidth));
    for (std::size_t b = 0; b <= bins; ++b) s.hist_edges.push_back(std::min(cap, kHistogramBinWidth * static_cast<double>(b)));
    s.hist_counts.assign(bins, 0);
    if (prices.empty()) return s;
    double acc = 0.0;
    for (double p : prices) {
        acc += p;
        const auto b = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, p) / kHistogramBinWidth));
        ++s.hist_counts[b];
    }
    s.mean = acc / static_cast<double>(prices.size());
    const std::pair<const char*, double> qs[] = {{"q025", 0.025}, {"q05", 0.05}, {"q25", 0.25}, {"q50", 0.5},
                                                 {"q75", 0.75},   {"q95", 0.95}, {"q975", 0.975}};
    for (const auto& [name, q] : qs) s.quantiles[name] = nearest_rank_quantile(prices, q);
    return s;
}

inline json to_json(const PriceSummary& s) {
    json q = json::object();
    for (const auto& [k, v] : s.quantiles) q[k] = v;
    return {{"n_members", s.n_members},
            {"n_cleared", s.n_cleared},
            {"n_no_intersection", s.n_members - s.n_cleared},
            {"mean", s.mean ? json(*s.mean) : json(nullptr)},
            {"quantiles", std::move(q)},
            {"histogram", {{"edges", s.hist_edges}, {"counts", s.hist_counts}}}};
}

/// Clearing price of every member after the optional bid; members that do
/// not cross are skipped.
inline std::vector<double> clearing_prices(const io::MarketEnsemble& e, const std::optional<Bid>& bid, TieRule rule) {
    std::vector<double> out;
    out.reserve(e.members.size());
    for (const auto& m : e.members) {
        try {
            out.push_back(bid ? market::clearing_price(market::inject_bid(m, *bid), rule).price
                              : market::clearing_price(m, rule).price);
        } catch (const NoIntersectionError&) {
        }
    }
    return out;
}

/// Per side: pointwise bands and the member closest to the pointwise mean,
/// all on a shared quantity grid.
struct SideView {
    std::vector<double> quantity_grid;
    std::vector<double> band_lower;
    std::vector<double> band_upper;
    std::vector<double> pointwise_mean;
    std::size_t point_index = 0;
};

inline SideView side_view(const io::MarketEnsemble& e, Side side, double coverage, std::size_t grid_size) {
    double qmax = 0.0;
    for (const auto& m : e.members) qmax = std::max(qmax, (side == Side::demand ? m.demand : m.supply).extent());
    SideView v;
    v.quantity_grid = grid_points(Domain{0.0, qmax}, grid_size);
    std::vector<Grid> grids;
    grids.reserve(e.members.size());
    for (const auto& m : e.members) {
        const AuctionCurve& c = side == Side::demand ? m.demand : m.supply;
        Grid g(grid_size);
        for (std::size_t k = 0; k < grid_size; ++k) g[k] = c(std::min(v.quantity_grid[k], c.extent()));
        grids.push_back(std::move(g));
    }
    v.pointwise_mean = grid_mean(grids);
    v.point_index = closest_to_mean(grids, v.pointwise_mean).first;
    std::tie(v.band_lower, v.band_upper) = credible_bands_from_grids(grids, coverage);
    return v;
}

struct ServiceOptions {
    double coverage = 0.95;
    std::size_t grid_size = 200;
};

class WhatIfService {
public:
    WhatIfService() = default;  // no artifacts: data endpoints answer 409

    explicit WhatIfService(io::MarketBundle bundle, ServiceOptions options = {})
        : bundle_(std::move(bundle)), options_(options) {
        for (const auto& e : bundle_->ensembles) {
            json demand = view_json(e, Side::demand);
            json supply = view_json(e, Side::supply);
            const auto base = summarize_prices(clearing_prices(e, std::nullopt, bundle_->tie_rule), e.members.size());
            views_[e.horizon] = {{"schema_version", io::kSchemaVersion},
                                 {"horizon", e.horizon},
                                 {"date", e.date},
                                 {"n_members", e.members.size()},
                                 {"coverage", options_.coverage},
                                 {"tie_rule", to_string(bundle_->tie_rule)},
                                 {"baseline", to_json(base)},
                                 {"demand", std::move(demand)},
                                 {"supply", std::move(supply)}};
        }
    }

    [[nodiscard]] bool loaded() const noexcept { return bundle_.has_value(); }

    [[nodiscard]] Response health() const {
        json hs = json::array();
        if (bundle_) {
            for (const auto& e : bundle_->ensembles) hs.push_back(e.horizon);
        }
        return {200,
                {{"schema_version", io::kSchemaVersion}, {"status", "ok"}, {"artifacts_loaded", loaded()},
                 {"horizons", hs}}};
    }

    [[nodiscard]] Response ensemble(const std::optional<std::string>& h_param) const {
        if (!bundle_) return error(409, "no forecast artifacts loaded");
        std::size_t h = bundle_->ensembles.front().horizon;
        if (h_param) {
            const auto parsed = parse_horizon(*h_param);
            if (!parsed) return error(400, "h must be a positive integer", {{"field", "h"}});
            h = *parsed;
        }
        const auto it = views_.find(h);
        if (it == views_.end()) return error(404, "unknown horizon " + std::to_string(h), {{"field", "h"}});
        return {200, it->second};
    }

    /// Body: {"side": "demand"|"supply", "price": p, "quantity": q, "h": optional}.
    [[nodiscard]] Response whatif(const std::string& body) const {
        if (!bundle_) return error(409, "no forecast artifacts loaded");
        json req;
        try {
            req = json::parse(body);
        } catch (const json::exception&) {
            return error(400, "request body is not valid JSON");
        }
        if (!req.is_object()) return error(400, "request body must be a JSON object");
        Bid bid;
        for (const char* f : {"side", "price", "quantity"}) {
            if (!req.contains(f)) return error(400, std::string("missing field '") + f + "'", {{"field", f}});
        }
        if (!req["side"].is_string()) return error(400, "side must be a string", {{"field", "side"}});
        try {
            bid.side = parse_side(req["side"].get<std::string>());
        } catch (const ValidationError& e) {
            return error(400, e.what(), {{"field", "side"}});
        }
        if (!req["price"].is_number()) return error(400, "price must be a number", {{"field", "price"}});
        if (!req["quantity"].is_number()) return error(400, "quantity must be a number", {{"field", "quantity"}});
        bid.price = req["price"].get<double>();
        bid.quantity = req["quantity"].get<double>();
        const double cap = bundle_->ensembles.front().members.front().demand.cap();
        if (!(bid.price >= 0.0 && bid.price <= cap)) {
            return error(400, "price must lie in [0, " + json(cap).dump() + "]", {{"field", "price"}});
        }
        if (!(bid.quantity > 0.0) || !std::isfinite(bid.quantity)) {
            return error(400, "quantity must be > 0", {{"field", "quantity"}});
        }
        std::size_t h = bundle_->ensembles.front().horizon;
        if (req.contains("h")) {
            if (!req["h"].is_number_unsigned() || req["h"].get<std::size_t>() == 0) {
                return error(400, "h must be a positive integer", {{"field", "h"}});
            }
            h = req["h"].get<std::size_t>();
        }
        const io::MarketEnsemble* e = find(h);
        if (!e) return error(404, "unknown horizon " + std::to_string(h), {{"field", "h"}});

        const auto s = summarize_prices(clearing_prices(*e, bid, bundle_->tie_rule), e->members.size(), cap);
        json out = to_json(s);
        out["schema_version"] = io::kSchemaVersion;
        out["horizon"] = h;
        out["tie_rule"] = to_string(bundle_->tie_rule);
        out["bid"] = {{"side", to_string(bid.side)}, {"price", bid.price}, {"quantity", bid.quantity}};
        return {200, std::move(out)};
    }

private:
    static std::optional<std::size_t> parse_horizon(const std::string& s) {
        if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            return std::nullopt;
        }
        const auto h = static_cast<std::size_t>(std::stoul(s));
        if (h == 0) return std::nullopt;
        return h;
    }

    [[nodiscard]] const io::MarketEnsemble* find(std::size_t h) const {
        for (const auto& e : bundle_->ensembles) {
            if (e.horizon == h) return &e;
        }
        return nullptr;
    }

    [[nodiscard]] json view_json(const io::MarketEnsemble& e, Side side) const {
        const SideView v = side_view(e, side, options_.coverage, options_.grid_size);
        const auto& m = e.members[v.point_index];
        return {{"quantity_grid", v.quantity_grid},
                {"band_lower", v.band_lower},
                {"band_upper", v.band_upper},
                {"pointwise_mean", v.pointwise_mean},
                {"point_index", v.point_index},
                {"point_estimate", io::to_json(side == Side::demand ? m.demand : m.supply)}};
    }

    std::optional<io::MarketBundle> bundle_;
    ServiceOptions options_;
    std::map<std::size_t, json> views_;
};

}  // namespace stepcast::service
