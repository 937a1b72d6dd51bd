#pragma once

// h-step-ahead predictive ensembles conditional on the last observed curve,
// reduced to a representative point estimate (the member closest in L2 to
// the pointwise mean) and pointwise credible bands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "stepcast/abc.hpp"
#include "stepcast/error.hpp"
#include "stepcast/particles.hpp"
#include "stepcast/rng.hpp"
#include "stepcast/step_curve.hpp"

namespace stepcast {

/// How F_T is turned back into n particles.
enum class Reconstruction {
    exact,     // every jump must be a multiple of 1/n
    quantile,  // lattice approximation (quantile_particles)
};

struct ForecastOptions {
    std::vector<std::size_t> horizons{1};
    std::size_t members = 1000;
    std::size_t n = 500;
    std::size_t grid_size = kDefaultGridSize;
    double coverage = 0.99;
    std::uint64_t seed = 0;
    Reconstruction reconstruction = Reconstruction::exact;

    void validate() const {
        if (horizons.empty()) throw ArgumentError("forecast: no horizons requested");
        for (auto h : horizons) {
            if (h == 0) throw ArgumentError("forecast: horizon must be >= 1");
        }
        if (members == 0) throw ArgumentError("forecast: members must be >= 1");
        if (n == 0) throw ArgumentError("forecast: n must be >= 1");
        if (!(coverage > 0.0 && coverage < 1.0)) throw ArgumentError("forecast: coverage must lie in (0,1)");
    }
};

struct ForecastEnsemble {
    std::size_t horizon = 1;
    std::vector<StepCurve> members;
    Grid pointwise_mean_grid;
    std::size_t point_index = 0;
    StepCurve point_estimate;
    double coverage = 0.99;
    Grid band_lower;
    Grid band_upper;
};

/// Nearest-rank empirical quantile of an unsorted sample (reorders `values`).
inline double nearest_rank_quantile(std::span<double> values, double q) {
    if (values.empty()) throw ArgumentError("nearest_rank_quantile: empty sample");
    const double n = static_cast<double>(values.size());
    const double rank = std::ceil(q * n - 1e-9);
    const auto idx = static_cast<std::size_t>(std::clamp(rank - 1.0, 0.0, n - 1.0));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
    return values[idx];
}

/// Argmin over members of L2(member, mean); ties go to the lowest index.
inline std::pair<std::size_t, double> closest_to_mean(std::span<const Grid> member_grids,
                                                      std::span<const double> mean) {
    if (member_grids.empty()) throw ArgumentError("point_estimate: no members");
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < member_grids.size(); ++i) {
        const double d = l2_grid(member_grids[i], mean);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return {best, best_d};
}

inline std::pair<std::size_t, StepCurve> point_estimate(std::span<const StepCurve> members,
                                                        std::span<const double> mean,
                                                        std::size_t grid_size = kDefaultGridSize) {
    std::vector<Grid> grids;
    grids.reserve(members.size());
    for (const auto& m : members) grids.push_back(to_grid(m, grid_size));
    const auto [idx, d] = closest_to_mean(grids, mean);
    return {idx, members[idx]};
}

inline Grid grid_mean(std::span<const Grid> grids) {
    if (grids.empty()) throw ArgumentError("grid_mean: no members");
    Grid mean(grids.front().size(), 0.0);
    for (const auto& g : grids) {
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += g[k];
    }
    for (auto& v : mean) v /= static_cast<double>(grids.size());
    return mean;
}

/// Pointwise nearest-rank quantiles (1-coverage)/2 and (1+coverage)/2.
inline std::pair<Grid, Grid> credible_bands_from_grids(std::span<const Grid> grids, double coverage) {
    if (grids.empty()) throw ArgumentError("credible_bands: no members");
    if (!(coverage > 0.0 && coverage < 1.0)) throw ArgumentError("credible_bands: coverage must lie in (0,1)");
    const std::size_t g = grids.front().size();
    Grid lower(g);
    Grid upper(g);
    std::vector<double> column(grids.size());
    for (std::size_t k = 0; k < g; ++k) {
        for (std::size_t i = 0; i < grids.size(); ++i) column[i] = grids[i][k];
        lower[k] = nearest_rank_quantile(column, 0.5 * (1.0 - coverage));
        upper[k] = nearest_rank_quantile(column, 0.5 * (1.0 + coverage));
    }
    return {std::move(lower), std::move(upper)};
}

inline std::pair<Grid, Grid> credible_bands(std::span<const StepCurve> members, std::size_t grid_size,
                                            double coverage) {
    std::vector<Grid> grids;
    grids.reserve(members.size());
    for (const auto& m : members) grids.push_back(to_grid(m, grid_size));
    return credible_bands_from_grids(grids, coverage);
}

/// Reduce a set of member curves to mean, point estimate and bands.
inline ForecastEnsemble reduce_ensemble(std::size_t horizon, std::vector<StepCurve> members,
                                        std::size_t grid_size, double coverage) {
    ForecastEnsemble e;
    e.horizon = horizon;
    e.coverage = coverage;
    std::vector<Grid> grids;
    grids.reserve(members.size());
    for (const auto& m : members) grids.push_back(to_grid(m, grid_size));
    e.pointwise_mean_grid = grid_mean(grids);
    e.point_index = closest_to_mean(grids, e.pointwise_mean_grid).first;
    e.point_estimate = members[e.point_index];
    std::tie(e.band_lower, e.band_upper) = credible_bands_from_grids(grids, coverage);
    e.members = std::move(members);
    return e;
}

inline std::vector<double> particles_for_forecast(const StepCurve& last, std::size_t n, Reconstruction mode) {
    return mode == Reconstruction::exact ? reconstruct_particles(last, n) : quantile_particles(last, n);
}

/// Ensembles for every requested horizon. Member i draws its parameter
/// uniformly from `draws`, starts from the particles of `last` and runs
/// max(horizons) transitions on its own substream, recording each horizon
/// along the way.
inline std::vector<ForecastEnsemble> forecast(const StepCurve& last, std::span<const ParamVector> draws,
                                              const ForecastOptions& options) {
    options.validate();
    if (draws.empty()) throw ArgumentError("forecast: no posterior draws");
    if (last.domain() != kUnitDomain) {
        throw ArgumentError("forecast: last curve must live on the normalized domain [0,1]");
    }
    const std::vector<double> start = particles_for_forecast(last, options.n, options.reconstruction);
    const std::size_t max_h = *std::max_element(options.horizons.begin(), options.horizons.end());

    std::map<std::size_t, std::vector<StepCurve>> by_h;
    for (auto h : options.horizons) by_h[h].reserve(options.members);

    TransitionWorkspace ws;
    std::vector<double> x;
    for (std::size_t i = 0; i < options.members; ++i) {
        Rng rng = Rng::substream(options.seed, i);
        const ParamVector& eta = draws[rng.below(draws.size())];
        x = start;
        for (std::size_t h = 1; h <= max_h; ++h) {
            transition_inplace(x, eta, rng, ws);
            if (auto it = by_h.find(h); it != by_h.end()) it->second.push_back(from_particles(x));
        }
    }

    std::vector<ForecastEnsemble> out;
    for (auto h : options.horizons) {
        out.push_back(reduce_ensemble(h, by_h.at(h), options.grid_size, options.coverage));
    }
    return out;
}

inline std::vector<ForecastEnsemble> forecast(const StepCurve& last, const ChainRecord& chain,
                                              const ForecastOptions& options) {
    if (chain.samples.empty()) throw ArgumentError("forecast: empty chain");
    const auto draws = chain.draws();
    return forecast(last, draws, options);
}

/// Fraction of grid points where `truth` lies inside [lower, upper].
inline double band_coverage(std::span<const double> truth, std::span<const double> lower,
                            std::span<const double> upper) {
    std::size_t inside = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) inside += truth[k] >= lower[k] && truth[k] <= upper[k];
    return static_cast<double>(inside) / static_cast<double>(truth.size());
}

inline double mean_band_width(const ForecastEnsemble& e) {
    double acc = 0.0;
    for (std::size_t k = 0; k < e.band_lower.size(); ++k) acc += e.band_upper[k] - e.band_lower[k];
    return acc / static_cast<double>(e.band_lower.size());
}

}  // namespace stepcast
