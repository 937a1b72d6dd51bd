#pragma once

// Summary statistics of a curve series, the three ABC distances built on
// them, and data-driven threshold calibration.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "stepcast/error.hpp"
#include "stepcast/step_curve.hpp"

namespace stepcast {

struct SeriesSummary {
    double mean_jump_count = 0.0;    // mean over t of K_t
    Grid pointwise_mean_grid;        // pointwise mean curve on the grid
    double mean_consecutive_l2 = 0;  // mean of L2(F_t, F_{t-1})
    double envelope_l2 = 0;          // L2(pointwise max, pointwise min)
};

/// Streams curves (as grid levels plus jump count) into a SeriesSummary.
/// Used both on observed series and inside the simulator, which never
/// materializes StepCurve objects.
class SummaryAccumulator {
public:
    explicit SummaryAccumulator(std::size_t grid_size = kDefaultGridSize)
        : sum_(grid_size, 0.0), prev_(grid_size, 0.0), upper_(grid_size, 0.0), lower_(grid_size, 0.0) {}

    void add(std::span<const double> grid, std::size_t jump_count) {
        if (grid.size() != sum_.size()) throw ArgumentError("SummaryAccumulator: grid size mismatch");
        if (count_ == 0) {
            std::copy(grid.begin(), grid.end(), upper_.begin());
            std::copy(grid.begin(), grid.end(), lower_.begin());
        } else {
            l2_sum_ += l2_grid(grid, prev_);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                upper_[k] = std::max(upper_[k], grid[k]);
                lower_[k] = std::min(lower_[k], grid[k]);
            }
        }
        for (std::size_t k = 0; k < grid.size(); ++k) sum_[k] += grid[k];
        std::copy(grid.begin(), grid.end(), prev_.begin());
        jumps_sum_ += static_cast<double>(jump_count);
        ++count_;
    }

    [[nodiscard]] std::size_t count() const noexcept { return count_; }

    [[nodiscard]] SeriesSummary finish() const {
        if (count_ < 2) throw ArgumentError("summarize: series needs at least 2 curves");
        SeriesSummary s;
        const double inv = 1.0 / static_cast<double>(count_);
        s.mean_jump_count = jumps_sum_ * inv;
        s.pointwise_mean_grid.resize(sum_.size());
        for (std::size_t k = 0; k < sum_.size(); ++k) s.pointwise_mean_grid[k] = sum_[k] * inv;
        s.mean_consecutive_l2 = l2_sum_ / static_cast<double>(count_ - 1);
        s.envelope_l2 = l2_grid(upper_, lower_);
        return s;
    }

private:
    Grid sum_;
    Grid prev_;
    Grid upper_;
    Grid lower_;
    double jumps_sum_ = 0.0;
    double l2_sum_ = 0.0;
    std::size_t count_ = 0;
};

inline SeriesSummary summarize(const CurveSeries& series, std::size_t grid_size = kDefaultGridSize) {
    if (series.size() < 2) throw ArgumentError("summarize: series needs at least 2 curves");
    SummaryAccumulator acc(grid_size);
    for (const auto& c : series.curves) acc.add(to_grid(c, grid_size), c.jump_count());
    return acc.finish();
}

/// d1 = |K* - K|, d2 = L2(mean*, mean), d3 = |Lbar* - Lbar|.
struct Distances {
    double jumps = 0.0;
    double mean_curve = 0.0;
    double volatility = 0.0;

    [[nodiscard]] std::array<double, 3> as_array() const { return {jumps, mean_curve, volatility}; }
};

inline Distances distances(const SeriesSummary& candidate, const SeriesSummary& data) {
    return {std::abs(candidate.mean_jump_count - data.mean_jump_count),
            l2_grid(candidate.pointwise_mean_grid, data.pointwise_mean_grid),
            std::abs(candidate.mean_consecutive_l2 - data.mean_consecutive_l2)};
}

struct Thresholds {
    double eps1 = std::numeric_limits<double>::infinity();
    double eps2 = std::numeric_limits<double>::infinity();
    double eps3 = std::numeric_limits<double>::infinity();
    // Calibration fractions that produced the eps values; zero when given directly.
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;

    [[nodiscard]] std::array<double, 3> eps() const { return {eps1, eps2, eps3}; }

    static Thresholds infinite() { return {}; }
};

struct GateResult {
    bool accepted = false;
    std::array<bool, 3> passed{};
    Distances distances;

    /// Index of the first failing criterion, or -1 when all pass.
    [[nodiscard]] int first_failure() const {
        for (int j = 0; j < 3; ++j) {
            if (!passed[static_cast<std::size_t>(j)]) return j;
        }
        return -1;
    }
};

inline GateResult gate(const Distances& d, const Thresholds& eps) {
    GateResult r;
    r.distances = d;
    r.passed = {d.jumps <= eps.eps1, d.mean_curve <= eps.eps2, d.volatility <= eps.eps3};
    r.accepted = r.passed[0] && r.passed[1] && r.passed[2];
    return r;
}

inline GateResult accept(const SeriesSummary& candidate, const SeriesSummary& data, const Thresholds& eps) {
    return gate(distances(candidate, data), eps);
}

/// eps1 = c1 * K, eps2 = c2 * L2(F_max, F_min), eps3 = c3 * Lbar.
inline Thresholds calibrate_thresholds(const SeriesSummary& data, double c1, double c2, double c3) {
    if (c1 < 0.0 || c2 < 0.0 || c3 < 0.0) throw ArgumentError("calibrate_thresholds: fractions must be >= 0");
    Thresholds t;
    t.eps1 = c1 * data.mean_jump_count;
    t.eps2 = c2 * data.envelope_l2;
    t.eps3 = c3 * data.mean_consecutive_l2;
    t.c1 = c1;
    t.c2 = c2;
    t.c3 = c3;
    return t;
}

/// Thresholds as a function of the number of acceptances so far.
using ThresholdSchedule = std::function<Thresholds(std::size_t accepted)>;

inline ThresholdSchedule constant_schedule(Thresholds t) {
    return [t](std::size_t) { return t; };
}

/// Linear interpolation from `start` to `target` over the first `steps` acceptances.
inline ThresholdSchedule linear_decay(Thresholds start, Thresholds target, std::size_t steps) {
    return [=](std::size_t accepted) {
        if (steps == 0 || accepted >= steps) return target;
        const double w = static_cast<double>(accepted) / static_cast<double>(steps);
        Thresholds t = target;
        t.eps1 = start.eps1 + w * (target.eps1 - start.eps1);
        t.eps2 = start.eps2 + w * (target.eps2 - start.eps2);
        t.eps3 = start.eps3 + w * (target.eps3 - start.eps3);
        return t;
    };
}

}  // namespace stepcast
