#pragma once

// Latent interacting particle system: at each step M ~ Binomial(n, p)
// particles are chosen without replacement and resampled sequentially from a
// Blackwell-MacQueen Polya urn conditioned on the remaining particles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stepcast/error.hpp"
#include "stepcast/rng.hpp"
#include "stepcast/step_curve.hpp"

namespace stepcast {

/// Model parameters: urn total mass, renewal probability, Beta base measure.
struct ParamVector {
    double theta = 1.0;
    double p = 0.5;
    double alpha = 1.0;
    double beta = 1.0;

    ParamVector() = default;
    ParamVector(double theta_, double p_, double alpha_, double beta_)
        : theta(theta_), p(p_), alpha(alpha_), beta(beta_) {
        validate();
    }

    void validate() const {
        if (!(theta > 0.0) || !std::isfinite(theta)) throw ArgumentError("ParamVector: theta must be > 0");
        if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("ParamVector: p must lie in [0,1]");
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("ParamVector: alpha must be > 0");
        if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("ParamVector: beta must be > 0");
    }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct ParticleState {
    std::vector<double> particles;
    std::uint64_t time_index = 0;
};

struct EngineConfig {
    std::size_t n = 500;
    std::size_t horizon = 110;  // T: the trajectory has T + 1 states
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1) throw ArgumentError("EngineConfig: n must be >= 1");
        if (horizon < 1) throw ArgumentError("EngineConfig: horizon must be >= 1");
    }
};

/// What one transition did, for diagnostics.
struct TransitionStats {
    std::size_t replaced = 0;  // M
    std::size_t fresh = 0;     // replacements drawn from the base measure
};

/// Reusable index permutation for selection without replacement.
class TransitionWorkspace {
public:
    // Reset on every call so a transition depends only on its own draws.
    std::span<std::uint32_t> permutation(std::size_t n) {
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), 0U);
        return perm_;
    }

private:
    std::vector<std::uint32_t> perm_;
};

/// One n-sized Polya urn sample with total mass theta and Beta(alpha, beta) base.
inline std::vector<double> polya_urn_sample(std::size_t n, const ParamVector& params, Rng& rng) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k);
        if (rng.uniform() * (params.theta + kd) < params.theta) {
            out.push_back(rng.beta(params.alpha, params.beta));
        } else {
            out.push_back(out[rng.below(k)]);
        }
    }
    return out;
}

/// Advance the particles one step in place.
///
/// The selected indices sit at perm[n-m, n) after a partial Fisher-Yates
/// shuffle. The conditioning pool for the h-th draw is particles[perm[0, n-m+h)]:
/// the survivors followed by the replacements already drawn.
inline TransitionStats transition_inplace(std::span<double> particles, const ParamVector& params, Rng& rng,
                                          TransitionWorkspace& ws) {
    const std::size_t n = particles.size();
    TransitionStats stats;
    const std::size_t m = rng.binomial(n, params.p);
    stats.replaced = m;
    if (m == 0) return stats;

    auto perm = ws.permutation(n);
    for (std::size_t k = n - 1; k + m >= n; --k) {
        const auto j = static_cast<std::size_t>(rng.below(k + 1));
        std::swap(perm[k], perm[j]);
        if (k == 0) break;
    }

    const std::size_t survivors = n - m;
    for (std::size_t h = 0; h < m; ++h) {
        const std::size_t pool = survivors + h;
        double draw;
        if (rng.uniform() * (params.theta + static_cast<double>(pool)) < params.theta) {
            draw = rng.beta(params.alpha, params.beta);
            ++stats.fresh;
        } else {
            draw = particles[perm[rng.below(pool)]];
        }
        particles[perm[pool]] = draw;
    }
    return stats;
}

inline ParticleState transition(const ParticleState& state, const ParamVector& params, Rng& rng) {
    TransitionWorkspace ws;
    ParticleState next{state.particles, state.time_index + 1};
    transition_inplace(next.particles, params, rng, ws);
    return next;
}

/// Particle states X(0), ..., X(T). Starts from `initial` or, if absent, one
/// stationary Polya urn sample.
inline std::vector<ParticleState> simulate_states(const ParamVector& params, const EngineConfig& config,
                                                  std::optional<std::vector<double>> initial = std::nullopt) {
    params.validate();
    config.validate();
    Rng rng(config.seed);
    std::vector<ParticleState> states;
    states.reserve(config.horizon + 1);
    std::vector<double> x = initial ? std::move(*initial) : polya_urn_sample(config.n, params, rng);
    if (x.size() != config.n) throw ArgumentError("simulate: initial state has wrong particle count");
    TransitionWorkspace ws;
    states.push_back({x, 0});
    for (std::size_t t = 1; t <= config.horizon; ++t) {
        transition_inplace(x, params, rng, ws);
        states.push_back({x, t});
    }
    return states;
}

/// Curve series F_0, ..., F_T induced by the particle trajectory.
inline CurveSeries simulate(const ParamVector& params, const EngineConfig& config,
                            std::optional<std::vector<double>> initial = std::nullopt) {
    CurveSeries series;
    for (const auto& s : simulate_states(params, config, std::move(initial))) {
        series.curves.push_back(from_particles(s.particles));
    }
    return series;
}

/// Smallest jump (including the first, measured from the base level) over the series.
inline double min_jump_size(const CurveSeries& series) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : series.curves) {
        for (double s : c.jump_sizes()) m = std::min(m, s);
    }
    return m;
}

/// floor(1 / max(min observed jump size, tol)).
inline std::size_t calibrate_n(const CurveSeries& series, double tol) {
    if (series.empty()) throw ArgumentError("calibrate_n: empty series");
    if (!(tol > 0.0)) throw ArgumentError("calibrate_n: tol must be > 0");
    const double m = min_jump_size(series);
    if (!std::isfinite(m)) throw ArgumentError("calibrate_n: series has no jumps");
    const double inv = 1.0 / std::max(m, tol);
    // Jump sizes are differences of levels and carry rounding noise.
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(inv * (1.0 + 1e-9))));
}

/// Exact inverse of from_particles: a jump of size k/n at x yields k particles at x.
/// Throws ArgumentError naming the first jump that is not a multiple of 1/n.
inline std::vector<double> reconstruct_particles(const StepCurve& curve, std::size_t n, double tol = 1e-6) {
    if (n == 0) throw ArgumentError("reconstruct_particles: n must be >= 1");
    const double nd = static_cast<double>(n);
    if (std::abs(curve.base_level() * nd) > tol) {
        throw ArgumentError("reconstruct_particles: base level " + std::to_string(curve.base_level()) +
                            " is not zero");
    }
    std::vector<double> out;
    out.reserve(n);
    const auto sizes = curve.jump_sizes();
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        const double k = sizes[j] * nd;
        const double rounded = std::round(k);
        if (std::abs(k - rounded) > tol || rounded < 1.0) {
            throw ArgumentError("reconstruct_particles: jump " + std::to_string(j) + " at x=" +
                                std::to_string(curve.jumps()[j]) + " has size " + std::to_string(sizes[j]) +
                                ", not a multiple of 1/" + std::to_string(n));
        }
        out.insert(out.end(), static_cast<std::size_t>(rounded), curve.jumps()[j]);
    }
    if (out.size() != n) {
        throw ArgumentError("reconstruct_particles: curve carries " + std::to_string(out.size()) +
                            " particles, expected " + std::to_string(n));
    }
    return out;
}

/// Lattice approximation for curves whose jumps are not multiples of 1/n:
/// particle i sits at the smallest x with F(x) >= (i - 1/2) / n. Mass below
/// the base level maps to the lower bound, missing mass to the upper bound.
/// Agrees with reconstruct_particles on exactly reconstructible curves.
inline std::vector<double> quantile_particles(const StepCurve& curve, std::size_t n) {
    if (n == 0) throw ArgumentError("quantile_particles: n must be >= 1");
    std::vector<double> out(n);
    const auto& jumps = curve.jumps();
    const auto& levels = curve.levels();
    const Domain d = curve.domain();
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        if (u <= curve.base_level()) {
            out[i] = d.lo;
            continue;
        }
        while (j < levels.size() && levels[j] < u) ++j;
        out[i] = j < levels.size() ? jumps[j] : d.hi;
    }
    return out;
}

/// Round a curve onto the 1/n lattice through quantile_particles.
inline StepCurve quantize(const StepCurve& curve, std::size_t n) {
    return from_particles(quantile_particles(curve, n), curve.domain());
}

/// Every curve of the series on the 1/n lattice. Off-lattice data (many tiny
/// jumps) otherwise carries more jumps than n particles can ever show.
inline CurveSeries quantize(const CurveSeries& series, std::size_t n) {
    CurveSeries out;
    out.dates = series.dates;
    out.curves.reserve(series.size());
    for (const auto& c : series.curves) out.curves.push_back(quantize(c, n));
    return out;
}

}  // namespace stepcast
