#pragma once

// Bid tables -> daily demand/supply curves, the location/scale normalization
// onto [0,1]x[0,1], its inverse for forecasts, clearing and bid injection.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stepcast/date.hpp"
#include "stepcast/error.hpp"
#include "stepcast/intersect.hpp"
#include "stepcast/rng.hpp"
#include "stepcast/step_curve.hpp"

namespace stepcast::market {

struct BidRow {
    std::string date;
    Bid bid;
    std::string actor;
};

struct BidTable {
    std::vector<BidRow> rows;

    void validate(double cap = kPriceCap) const {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            try {
                rows[i].bid.validate(cap);
            } catch (const ValidationError& e) {
                throw ValidationError("bid row " + std::to_string(i + 1) + ": " + e.what());
            }
        }
    }

    /// Distinct dates in ascending order.
    [[nodiscard]] std::vector<std::string> dates() const {
        std::vector<std::string> out;
        for (const auto& r : rows) out.push_back(r.date);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    [[nodiscard]] std::vector<Bid> bids(const std::string& date, Side side) const {
        std::vector<Bid> out;
        for (const auto& r : rows) {
            if (r.date == date && r.bid.side == side) out.push_back(r.bid);
        }
        return out;
    }
};

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline double parse_number(const std::string& s, const char* what, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    }
}
}  // namespace detail

/// Reads `date,side,price_eur_gj,quantity_gj[,actor]`; the header is required.
inline BidTable read_bids(std::istream& in, double cap = kPriceCap) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("bid csv: empty input");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
    const auto header = detail::split_csv(line);
    if (header.size() < 4 || header[0] != "date" || header[1] != "side" || header[2] != "price_eur_gj" ||
        header[3] != "quantity_gj") {
        throw ValidationError("bid csv: header must start with date,side,price_eur_gj,quantity_gj");
    }
    BidTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = detail::split_csv(line);
        if (cells.size() < 4) throw ValidationError("line " + std::to_string(line_no) + ": expected 4 columns");
        BidRow row;
        row.date = cells[0];
        if (!is_iso_date(row.date)) {
            throw ValidationError("line " + std::to_string(line_no) + ": bad date '" + row.date + "'");
        }
        try {
            row.bid.side = parse_side(cells[1]);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        row.bid.price = detail::parse_number(cells[2], "price", line_no);
        row.bid.quantity = detail::parse_number(cells[3], "quantity", line_no);
        if (cells.size() > 4) row.actor = cells[4];
        try {
            row.bid.validate(cap);
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline BidTable read_bids_file(const std::string& path, double cap = kPriceCap) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_bids(in, cap);
}

/// First and last jump of an auction curve (the segment starts).
struct Endpoints {
    double L = 0.0;
    double R = 0.0;
};

inline Endpoints endpoints(const AuctionCurve& c) {
    if (c.jumps().empty()) throw ValidationError(std::string(to_string(c.side())) + " curve has no jumps");
    return {c.jumps().front(), c.jumps().back()};
}

struct MarketDay {
    std::string date;
    AuctionCurve demand;
    AuctionCurve supply;
    Endpoints demand_ends;
    Endpoints supply_ends;

    [[nodiscard]] const AuctionCurve& curve(Side s) const { return s == Side::demand ? demand : supply; }
    [[nodiscard]] const Endpoints& ends(Side s) const { return s == Side::demand ? demand_ends : supply_ends; }
};

inline MarketDay make_day(std::string date, AuctionCurve demand, AuctionCurve supply) {
    MarketDay day{std::move(date), std::move(demand), std::move(supply), {}, {}};
    for (Side s : {Side::demand, Side::supply}) {
        const Endpoints e = endpoints(day.curve(s));
        if (!(e.L < e.R)) {
            throw ValidationError(day.date + ": " + to_string(s) +
                                  " curve has a single jump (L = R); degenerate day");
        }
        (s == Side::demand ? day.demand_ends : day.supply_ends) = e;
    }
    return day;
}

inline MarketDay build_curves(const BidTable& table, const std::string& date, double cap = kPriceCap) {
    std::vector<AuctionCurve> curves;
    for (Side s : {Side::demand, Side::supply}) {
        const auto bids = table.bids(date, s);
        if (bids.empty()) throw ValidationError(date + ": missing " + to_string(s) + " side");
        curves.push_back(AuctionCurve::from_bids(s, bids, cap));
    }
    return make_day(date, std::move(curves[0]), std::move(curves[1]));
}

/// Curves on [0,1] -> [0,1] plus what it takes to map them back.
struct NormalizedSide {
    StepCurve curve;
    Endpoints ends;
    double extent = 1.0;  // total quantity
    double cap = kPriceCap;

    /// (Q - R) / (R - L): width of the last segment relative to [L, R].
    [[nodiscard]] double tail_ratio() const { return (extent - ends.R) / (ends.R - ends.L); }
};

/// Affine quantity map x -> (x - L)/(R - L); level p/cap for supply and
/// 1 - p/cap for demand, which turns demand into a non-decreasing curve.
inline NormalizedSide normalize(const AuctionCurve& c) {
    const Endpoints e = endpoints(c);
    if (!(e.L < e.R)) throw ValidationError("normalize: needs L < R");
    const double w = e.R - e.L;
    std::vector<double> xs;
    std::vector<double> levels;
    for (std::size_t k = 0; k < c.jumps().size(); ++k) {
        xs.push_back(std::clamp((c.jumps()[k] - e.L) / w, 0.0, 1.0));
        const double p = c.prices()[k] / c.cap();
        levels.push_back(c.side() == Side::supply ? p : 1.0 - p);
    }
    xs.front() = 0.0;
    xs.back() = 1.0;
    return {StepCurve(std::move(xs), std::move(levels), kUnitDomain, 0.0), e, c.extent(), c.cap()};
}

/// Inverse of normalize for given endpoints; the last segment gets width
/// tail_ratio * (R - L).
inline AuctionCurve denormalize(const StepCurve& f, Side side, double L, double R, double tail_ratio,
                                double cap = kPriceCap) {
    if (!(R > L)) throw ArgumentError("denormalize: needs R > L");
    if (f.domain() != kUnitDomain) throw ArgumentError("denormalize: curve must live on [0,1]");
    const double w = R - L;
    std::vector<double> qs;
    std::vector<double> prices;
    for (std::size_t k = 0; k < f.jumps().size(); ++k) {
        qs.push_back(L + w * f.jumps()[k]);
        const double lvl = f.levels()[k];
        prices.push_back(cap * (side == Side::supply ? lvl : 1.0 - lvl));
    }
    const double last = qs.empty() ? L : qs.back();
    const double extent = std::max(R, last) + std::max(tail_ratio, 0.0) * w;
    return AuctionCurve(side, std::move(qs), std::move(prices), extent > last ? extent : last + w, cap);
}

inline AuctionCurve denormalize(const NormalizedSide& n, Side side) {
    return denormalize(n.curve, side, n.ends.L, n.ends.R, n.tail_ratio(), n.cap);
}

struct DenormalizedEnsemble {
    std::vector<AuctionCurve> members;
    std::vector<double> r_used;
    std::size_t resampled = 0;  // R draws <= L that were replaced
};

/// Pairs member i with R_draws[i mod size]; a draw not above L is replaced by
/// a uniformly resampled one and counted.
inline DenormalizedEnsemble denormalize_forecast(std::span<const StepCurve> members, Side side, double L_known,
                                                 std::span<const double> R_draws, double tail_ratio, Rng& rng,
                                                 double cap = kPriceCap) {
    if (R_draws.empty()) throw ArgumentError("denormalize_forecast: no R draws");
    if (std::none_of(R_draws.begin(), R_draws.end(), [&](double r) { return r > L_known; })) {
        throw ArgumentError("denormalize_forecast: every R draw is <= L");
    }
    DenormalizedEnsemble out;
    out.members.reserve(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        double r = R_draws[i % R_draws.size()];
        while (!(r > L_known)) {
            ++out.resampled;
            r = R_draws[rng.below(R_draws.size())];
        }
        out.r_used.push_back(r);
        out.members.push_back(denormalize(members[i], side, L_known, r, tail_ratio, cap));
    }
    return out;
}

/// Demand/supply pair for one day or one ensemble member.
struct CurvePair {
    AuctionCurve demand;
    AuctionCurve supply;
};

inline Clearing clearing_price(const CurvePair& pair, TieRule rule = TieRule::midpoint) {
    return intersect(pair.demand, pair.supply, rule);
}

inline Clearing clearing_price(const MarketDay& day, TieRule rule = TieRule::midpoint) {
    return intersect(day.demand, day.supply, rule);
}

/// Adds the bid to its side's bid list and rebuilds that curve.
inline CurvePair inject_bid(const CurvePair& pair, const Bid& bid) {
    bid.validate(pair.demand.cap());
    CurvePair out = pair;
    AuctionCurve& target = bid.side == Side::demand ? out.demand : out.supply;
    auto bids = target.to_bids();
    bids.push_back(bid);
    target = AuctionCurve::from_bids(bid.side, bids, target.cap());
    return out;
}

/// Daily normalized series for one side, with the endpoint series.
struct SideSeries {
    CurveSeries curves;
    std::vector<double> L;
    std::vector<double> R;
    std::vector<double> tail_ratio;
};

inline SideSeries normalized_series(std::span<const MarketDay> days, Side side) {
    SideSeries out;
    for (const auto& d : days) {
        const NormalizedSide n = normalize(d.curve(side));
        out.curves.curves.push_back(n.curve);
        out.curves.dates.push_back(d.date);
        out.L.push_back(n.ends.L);
        out.R.push_back(n.ends.R);
        out.tail_ratio.push_back(n.tail_ratio());
    }
    return out;
}

inline std::vector<MarketDay> build_all_days(const BidTable& table, double cap = kPriceCap) {
    std::vector<MarketDay> days;
    for (const auto& d : table.dates()) days.push_back(build_curves(table, d, cap));
    return days;
}

}  // namespace stepcast::market
