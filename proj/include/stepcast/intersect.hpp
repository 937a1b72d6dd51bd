#pragma once

// Piecewise-constant bid curves in the auction plane (cumulative quantity ->
// price) and the clearing rule where demand meets supply.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stepcast/error.hpp"

namespace stepcast {

inline constexpr double kPriceCap = 23.0;

enum class Side { demand, supply };

inline const char* to_string(Side s) { return s == Side::demand ? "demand" : "supply"; }

inline Side parse_side(const std::string& s) {
    if (s == "demand") return Side::demand;
    if (s == "supply") return Side::supply;
    throw ValidationError("side must be 'demand' or 'supply', got '" + s + "'");
}

struct Bid {
    Side side = Side::supply;
    double price = 0.0;     // EUR/GJ
    double quantity = 0.0;  // GJ

    void validate(double cap = kPriceCap) const {
        if (!(price >= 0.0 && price <= cap)) {
            throw ValidationError("bid price " + std::to_string(price) + " outside [0, " + std::to_string(cap) + "]");
        }
        if (!(quantity > 0.0) || !std::isfinite(quantity)) {
            throw ValidationError("bid quantity must be > 0, got " + std::to_string(quantity));
        }
    }
};

/// Right-continuous price step function on [0, extent].
///
/// The curve takes `base_price` before the first jump and prices()[k] from
/// jumps()[k] up to the next jump. Supply curves are non-decreasing with base
/// 0, demand curves non-increasing with base equal to the price cap.
class AuctionCurve {
public:
    AuctionCurve() = default;

    AuctionCurve(Side side, std::vector<double> jumps, std::vector<double> prices, double extent,
                 double cap = kPriceCap)
        : side_(side), extent_(extent), cap_(cap) {
        if (jumps.size() != prices.size()) throw ArgumentError("AuctionCurve: jumps and prices differ in length");
        if (!(extent > 0.0) || !std::isfinite(extent)) throw ArgumentError("AuctionCurve: extent must be > 0");
        double prev = base_price();
        for (std::size_t k = 0; k < jumps.size(); ++k) {
            const double q = jumps[k];
            const double p = prices[k];
            if (!(q >= 0.0 && q < extent)) throw ArgumentError("AuctionCurve: jump outside [0, extent)");
            if (!jumps_.empty() && q <= jumps_.back()) throw ArgumentError("AuctionCurve: jumps must be increasing");
            if (!(p >= 0.0 && p <= cap)) throw ValidationError("AuctionCurve: price outside [0, cap]");
            if (side == Side::supply ? p < prev : p > prev) {
                throw ArgumentError(std::string("AuctionCurve: ") + to_string(side) + " curve is not monotone");
            }
            if (p != prev) {
                jumps_.push_back(q);
                prices_.push_back(p);
            }
            prev = p;
        }
    }

    /// Sort-and-cumulate construction: supply ascending, demand descending by
    /// price; equal prices are merged.
    static AuctionCurve from_bids(Side side, std::span<const Bid> bids, double cap = kPriceCap) {
        if (bids.empty()) throw ValidationError(std::string("no ") + to_string(side) + " bids");
        std::map<double, double> by_price;
        for (const auto& b : bids) {
            b.validate(cap);
            by_price[b.price] += b.quantity;
        }
        std::vector<std::pair<double, double>> rows(by_price.begin(), by_price.end());
        if (side == Side::demand) std::reverse(rows.begin(), rows.end());
        std::vector<double> jumps;
        std::vector<double> prices;
        double q = 0.0;
        for (const auto& [p, qty] : rows) {
            jumps.push_back(q);
            prices.push_back(p);
            q += qty;
        }
        return AuctionCurve(side, std::move(jumps), std::move(prices), q, cap);
    }

    [[nodiscard]] Side side() const noexcept { return side_; }
    [[nodiscard]] double extent() const noexcept { return extent_; }
    [[nodiscard]] double cap() const noexcept { return cap_; }
    [[nodiscard]] double base_price() const noexcept { return side_ == Side::supply ? 0.0 : cap_; }
    [[nodiscard]] const std::vector<double>& jumps() const noexcept { return jumps_; }
    [[nodiscard]] const std::vector<double>& prices() const noexcept { return prices_; }

    /// Price at q (right-continuous).
    [[nodiscard]] double operator()(double q) const noexcept {
        const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), q);
        const auto idx = static_cast<std::size_t>(it - jumps_.begin());
        return idx == 0 ? base_price() : prices_[idx - 1];
    }

    /// Price just left of q.
    [[nodiscard]] double left_limit(double q) const noexcept {
        const auto it = std::lower_bound(jumps_.begin(), jumps_.end(), q);
        const auto idx = static_cast<std::size_t>(it - jumps_.begin());
        return idx == 0 ? base_price() : prices_[idx - 1];
    }

    /// The bid list that rebuilds this curve: one bid per constant segment.
    [[nodiscard]] std::vector<Bid> to_bids() const {
        std::vector<Bid> out;
        double start = 0.0;
        double price = (*this)(0.0);
        for (std::size_t k = 0; k <= jumps_.size(); ++k) {
            const double end = k < jumps_.size() ? jumps_[k] : extent_;
            if (end > start) out.push_back({side_, price, end - start});
            if (k < jumps_.size()) {
                start = std::max(start, jumps_[k]);
                price = prices_[k];
            }
        }
        return out;
    }

    friend bool operator==(const AuctionCurve&, const AuctionCurve&) = default;

private:
    Side side_ = Side::supply;
    std::vector<double> jumps_;
    std::vector<double> prices_;
    double extent_ = 1.0;
    double cap_ = kPriceCap;
};

/// How the clearing price is picked from the admissible interval at q*.
enum class TieRule { midpoint, demand_side, supply_side };

inline const char* to_string(TieRule r) {
    switch (r) {
        case TieRule::midpoint: return "midpoint";
        case TieRule::demand_side: return "demand_side";
        case TieRule::supply_side: return "supply_side";
    }
    return "midpoint";
}

inline TieRule parse_tie_rule(const std::string& s) {
    if (s == "midpoint") return TieRule::midpoint;
    if (s == "demand_side" || s == "demand-side") return TieRule::demand_side;
    if (s == "supply_side" || s == "supply-side") return TieRule::supply_side;
    throw ValidationError("tie rule must be midpoint | demand_side | supply_side, got '" + s + "'");
}

struct Clearing {
    double price = 0.0;
    double quantity = 0.0;
    double price_lo = 0.0;  // admissible price interval at the crossing
    double price_hi = 0.0;
};

/// q* is the smallest breakpoint in [0, min(Qd, Qs)] with S(q) >= D(q). Any
/// price in [max(S(q*-), D(q*)), min(S(q*), D(q*-))] clears; the tie rule picks
/// the midpoint, the upper end (demand side) or the lower end (supply side).
/// At its right end a side is exhausted: demand drops to 0 and supply rises
/// to the cap, so the curves always meet by min(Qd, Qs). Only a supply curve
/// that starts above demand does not cross.
inline Clearing intersect(const AuctionCurve& demand, const AuctionCurve& supply, TieRule rule = TieRule::midpoint) {
    if (demand.side() != Side::demand || supply.side() != Side::supply) {
        throw ArgumentError("intersect: expected (demand, supply) curves");
    }
    const double qmax = std::min(demand.extent(), supply.extent());
    const double s0 = supply(0.0);
    const double d0 = demand(0.0);
    if (s0 > d0) throw NoIntersectionError("intersect: supply starts above demand, no trade");

    Clearing c;
    if (s0 == d0) {
        c = {s0, 0.0, s0, s0};
        return c;
    }
    const auto s_at = [&](double q) { return q >= supply.extent() ? supply.cap() : supply(q); };
    const auto d_at = [&](double q) { return q >= demand.extent() ? 0.0 : demand(q); };
    std::vector<double> breaks;
    breaks.reserve(demand.jumps().size() + supply.jumps().size() + 1);
    std::merge(demand.jumps().begin(), demand.jumps().end(), supply.jumps().begin(), supply.jumps().end(),
               std::back_inserter(breaks));
    breaks.insert(std::upper_bound(breaks.begin(), breaks.end(), qmax), qmax);
    bool found = false;
    for (double q : breaks) {
        if (q <= 0.0) continue;
        if (q > qmax) break;
        if (s_at(q) >= d_at(q)) {
            c.quantity = q;
            c.price_lo = std::max(supply.left_limit(q), d_at(q));
            c.price_hi = std::min(s_at(q), demand.left_limit(q));
            found = true;
            break;
        }
    }
    if (!found) {
        throw NoIntersectionError("intersect: curves do not cross within [0, " + std::to_string(qmax) + "]");
    }
    switch (rule) {
        case TieRule::midpoint: c.price = 0.5 * (c.price_lo + c.price_hi); break;
        case TieRule::demand_side: c.price = c.price_hi; break;
        case TieRule::supply_side: c.price = c.price_lo; break;
    }
    return c;
}

}  // namespace stepcast
