#pragma once

// Scoring a forecast against what actually happened.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stepcast/forecast.hpp"
#include "stepcast/intersect.hpp"
#include "stepcast/step_curve.hpp"

namespace stepcast {

struct CurveScore {
    double l2 = 0.0;        // point estimate vs truth, normalized plane
    double coverage = 1.0;  // share of grid points inside the band
    double band_width = 0.0;
};

inline CurveScore score_curve(const ForecastEnsemble& e, const StepCurve& truth) {
    const std::size_t g = e.pointwise_mean_grid.size();
    if (g == 0) throw ArgumentError("score_curve: ensemble has no grid");
    const Grid t = to_grid(truth, g);
    return {l2_grid(to_grid(e.point_estimate, g), t), band_coverage(t, e.band_lower, e.band_upper),
            mean_band_width(e)};
}

/// Recomputes the argmin over members; true when it matches the stored index
/// and curve. Ensembles saved without members pass trivially.
inline bool point_estimate_consistent(const ForecastEnsemble& e) {
    if (e.members.empty()) return true;
    const std::size_t g = e.pointwise_mean_grid.size();
    std::vector<Grid> grids;
    grids.reserve(e.members.size());
    for (const auto& m : e.members) grids.push_back(to_grid(m, g));
    const Grid mean = grid_mean(grids);
    const auto idx = closest_to_mean(grids, mean).first;
    return idx == e.point_index && e.members[idx] == e.point_estimate;
}

/// Price L2 between two auction curves on `grid_size` quantities spanning
/// [lo, hi]; past its extent a curve keeps its last price.
inline double auction_l2(const AuctionCurve& a, const AuctionCurve& b, double lo, double hi,
                         std::size_t grid_size = kDefaultGridSize) {
    if (!(hi > lo)) throw ArgumentError("auction_l2: needs hi > lo");
    const auto xs = grid_points(Domain{lo, hi}, grid_size);
    double acc = 0.0;
    for (double x : xs) {
        const double d = a(std::min(x, a.extent())) - b(std::min(x, b.extent()));
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

inline double rmse(const std::vector<double>& errors) {
    if (errors.empty()) return std::nan("");
    double acc = 0.0;
    for (double e : errors) acc += e * e;
    return std::sqrt(acc / static_cast<double>(errors.size()));
}

struct MetricRow {
    std::size_t horizon = 0;
    std::string side;  // "curve" for a plain series
    std::string target_date;
    double l2_normalized = 0.0;
    double l2_original = 0.0;
    double coverage = 1.0;
    double band_width = 0.0;
    std::optional<double> price_forecast;
    std::optional<double> price_truth;
};

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "horizon,side,target_date,l2_normalized,l2_original,coverage,band_width,price_forecast,price_truth,"
           "price_error\n";
    const auto old = out.precision(10);
    for (const auto& r : rows) {
        out << r.horizon << ',' << r.side << ',' << r.target_date << ',' << r.l2_normalized << ',' << r.l2_original
            << ',' << r.coverage << ',' << r.band_width << ',';
        if (r.price_forecast && r.price_truth) {
            out << *r.price_forecast << ',' << *r.price_truth << ',' << (*r.price_forecast - *r.price_truth);
        } else {
            out << ",,";
        }
        out << '\n';
    }
    out.precision(old);
}

}  // namespace stepcast
