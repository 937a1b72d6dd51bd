#pragma once

// Monotone bounded step functions (sub-cdfs on a closed interval) and the
// grid algebra used by every distance in the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stepcast/error.hpp"

namespace stepcast {

/// Default number of grid points used for curve distances.
inline constexpr std::size_t kDefaultGridSize = 500;

/// Level values sampled on an equally spaced grid.
using Grid = std::vector<double>;

struct Domain {
    double lo = 0.0;
    double hi = 1.0;

    friend bool operator==(const Domain&, const Domain&) = default;

    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
};

inline constexpr Domain kUnitDomain{0.0, 1.0};

/// Right-continuous, non-decreasing step function with levels in [0, 1].
///
/// Jump locations are strictly increasing; repeated locations are merged at
/// construction keeping the final level, and steps that do not change the
/// level are dropped so that jump_count() is the number of actual jumps.
class StepCurve {
public:
    StepCurve() = default;

    StepCurve(std::vector<double> jumps, std::vector<double> levels, Domain domain = kUnitDomain,
              double base_level = 0.0)
        : domain_(domain), base_level_(base_level) {
        if (!(domain.lo <= domain.hi) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
            throw ArgumentError("StepCurve: invalid domain bounds");
        }
        if (jumps.size() != levels.size()) {
            throw ArgumentError("StepCurve: jump_locations and post_jump_levels differ in length");
        }
        base_level_ = clamp_level(base_level, "base_level");
        jumps_.reserve(jumps.size());
        levels_.reserve(levels.size());
        double prev_level = base_level_;
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            const double x = jumps[i];
            if (!domain.contains(x)) {
                throw ArgumentError("StepCurve: jump location " + std::to_string(x) + " outside domain");
            }
            if (!jumps_.empty() && x < jumps_.back()) {
                throw ArgumentError("StepCurve: jump locations must be sorted");
            }
            const double level = clamp_level(levels[i], "level");
            if (level < prev_level) {
                throw ArgumentError("StepCurve: levels must be non-decreasing");
            }
            if (!jumps_.empty() && x == jumps_.back()) {
                levels_.back() = level;
            } else if (level > prev_level) {
                jumps_.push_back(x);
                levels_.push_back(level);
            }
            prev_level = level;
        }
    }

    /// Constant curve (no jumps).
    static StepCurve flat(double level, Domain domain = kUnitDomain) {
        return StepCurve({}, {}, domain, level);
    }

    [[nodiscard]] const std::vector<double>& jumps() const noexcept { return jumps_; }
    [[nodiscard]] const std::vector<double>& levels() const noexcept { return levels_; }
    [[nodiscard]] Domain domain() const noexcept { return domain_; }
    [[nodiscard]] double base_level() const noexcept { return base_level_; }
    [[nodiscard]] std::size_t jump_count() const noexcept { return jumps_.size(); }
    [[nodiscard]] double final_level() const noexcept {
        return levels_.empty() ? base_level_ : levels_.back();
    }

    /// Right-continuous evaluation; throws DomainError outside the bounds.
    [[nodiscard]] double operator()(double x) const {
        if (!domain_.contains(x)) {
            throw DomainError("StepCurve: x=" + std::to_string(x) + " outside domain");
        }
        return unchecked(x);
    }

    [[nodiscard]] double unchecked(double x) const noexcept {
        const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), x);
        const auto idx = static_cast<std::size_t>(it - jumps_.begin());
        return idx == 0 ? base_level_ : levels_[idx - 1];
    }

    /// Jump sizes in order, the first measured from base_level.
    [[nodiscard]] std::vector<double> jump_sizes() const {
        std::vector<double> sizes(levels_.size());
        double prev = base_level_;
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            sizes[i] = levels_[i] - prev;
            prev = levels_[i];
        }
        return sizes;
    }

    friend bool operator==(const StepCurve&, const StepCurve&) = default;

private:
    static double clamp_level(double v, const char* what) {
        constexpr double kSlack = 1e-12;
        if (!(v >= -kSlack && v <= 1.0 + kSlack)) {
            throw ArgumentError(std::string("StepCurve: ") + what + " outside [0,1]");
        }
        return std::clamp(v, 0.0, 1.0);
    }

    std::vector<double> jumps_;
    std::vector<double> levels_;
    Domain domain_{};
    double base_level_ = 0.0;
};

/// Time-ordered curves sharing one domain; dates are optional ISO-8601 labels.
struct CurveSeries {
    std::vector<StepCurve> curves;
    std::vector<std::string> dates;

    [[nodiscard]] std::size_t size() const noexcept { return curves.size(); }
    [[nodiscard]] bool empty() const noexcept { return curves.empty(); }
    [[nodiscard]] Domain domain() const { return curves.at(0).domain(); }
    [[nodiscard]] const StepCurve& operator[](std::size_t t) const { return curves[t]; }
    [[nodiscard]] const StepCurve& back() const { return curves.back(); }

    /// Throws unless non-empty with a common domain and consistent dates.
    void validate() const {
        if (curves.empty()) throw ArgumentError("CurveSeries: empty");
        const Domain d = curves.front().domain();
        for (const auto& c : curves) {
            if (c.domain() != d) throw ArgumentError("CurveSeries: curves do not share domain bounds");
        }
        if (!dates.empty() && dates.size() != curves.size()) {
            throw ArgumentError("CurveSeries: dates and curves differ in length");
        }
    }

    /// First `count` curves (and their dates).
    [[nodiscard]] CurveSeries head(std::size_t count) const {
        count = std::min(count, curves.size());
        CurveSeries out;
        out.curves.assign(curves.begin(), curves.begin() + static_cast<std::ptrdiff_t>(count));
        if (!dates.empty()) out.dates.assign(dates.begin(), dates.begin() + static_cast<std::ptrdiff_t>(count));
        return out;
    }
};

/// `grid_size` equally spaced points spanning `domain`, both endpoints included.
inline std::vector<double> grid_points(Domain domain, std::size_t grid_size) {
    if (grid_size < 2) throw ArgumentError("grid_size must be at least 2");
    std::vector<double> xs(grid_size);
    const double step = domain.width() / static_cast<double>(grid_size - 1);
    for (std::size_t k = 0; k < grid_size; ++k) xs[k] = domain.lo + step * static_cast<double>(k);
    xs.back() = domain.hi;
    return xs;
}

/// Empirical cdf of the particles: F(x) = #{i : X_i <= x} / n.
inline StepCurve from_particles(std::span<const double> particles, Domain domain = kUnitDomain) {
    if (particles.empty()) throw ArgumentError("from_particles: empty particle vector");
    std::vector<double> sorted(particles.begin(), particles.end());
    std::sort(sorted.begin(), sorted.end());
    if (!domain.contains(sorted.front()) || !domain.contains(sorted.back())) {
        throw ArgumentError("from_particles: particle outside domain bounds");
    }
    const double n = static_cast<double>(sorted.size());
    std::vector<double> jumps;
    std::vector<double> levels;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
        jumps.push_back(sorted[i]);
        levels.push_back(static_cast<double>(i + 1) / n);
    }
    levels.back() = 1.0;
    return StepCurve(std::move(jumps), std::move(levels), domain, 0.0);
}

/// Evaluate the curve on `grid_size` equally spaced points of its domain.
inline Grid to_grid(const StepCurve& curve, std::size_t grid_size = kDefaultGridSize) {
    const auto xs = grid_points(curve.domain(), grid_size);
    Grid out(grid_size);
    const auto& jumps = curve.jumps();
    const auto& levels = curve.levels();
    std::size_t j = 0;
    double level = curve.base_level();
    for (std::size_t k = 0; k < grid_size; ++k) {
        while (j < jumps.size() && jumps[j] <= xs[k]) level = levels[j++];
        out[k] = level;
    }
    return out;
}

/// Grid levels of an empirical cdf given sorted particles, without building the curve.
inline void sorted_particles_to_grid(std::span<const double> sorted, std::span<const double> xs,
                                     std::span<double> out) {
    const double inv_n = 1.0 / static_cast<double>(sorted.size());
    std::size_t i = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        while (i < sorted.size() && sorted[i] <= xs[k]) ++i;
        out[k] = static_cast<double>(i) * inv_n;
    }
}

/// sqrt(mean_k (a_k - b_k)^2).
inline double l2_grid(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw ArgumentError("l2_grid: grids differ in size");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

/// Discrete L2 distance on a shared grid.
inline double l2_distance(const StepCurve& a, const StepCurve& b, std::size_t grid_size = kDefaultGridSize) {
    if (a.domain() != b.domain()) throw ArgumentError("l2_distance: curves have different domain bounds");
    return l2_grid(to_grid(a, grid_size), to_grid(b, grid_size));
}

inline Grid pointwise_mean(const CurveSeries& series, std::size_t grid_size = kDefaultGridSize) {
    if (series.empty()) throw ArgumentError("pointwise_mean: empty series");
    Grid acc(grid_size, 0.0);
    for (const auto& c : series.curves) {
        const auto g = to_grid(c, grid_size);
        for (std::size_t k = 0; k < grid_size; ++k) acc[k] += g[k];
    }
    const double inv = 1.0 / static_cast<double>(series.size());
    for (auto& v : acc) v *= inv;
    return acc;
}

/// Pointwise maximum and minimum of the series on the grid.
inline std::pair<Grid, Grid> pointwise_envelope(const CurveSeries& series,
                                                std::size_t grid_size = kDefaultGridSize) {
    if (series.empty()) throw ArgumentError("pointwise_envelope: empty series");
    Grid upper = to_grid(series.curves.front(), grid_size);
    Grid lower = upper;
    for (std::size_t t = 1; t < series.size(); ++t) {
        const auto g = to_grid(series.curves[t], grid_size);
        for (std::size_t k = 0; k < grid_size; ++k) {
            upper[k] = std::max(upper[k], g[k]);
            lower[k] = std::min(lower[k], g[k]);
        }
    }
    return {std::move(upper), std::move(lower)};
}

}  // namespace stepcast
