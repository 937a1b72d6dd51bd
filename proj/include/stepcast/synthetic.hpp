#pragma once

// Generators for the two simulation studies: the particle model itself and a
// misspecified functional autoregression F_t = a F_{t-1} + (1 - a) F_eps.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "stepcast/error.hpp"
#include "stepcast/particles.hpp"
#include "stepcast/rng.hpp"
#include "stepcast/step_curve.hpp"

namespace stepcast::synthetic {

struct MisspecConfig {
    double a = 0.9;  // not given for the original study; see README
    std::size_t noise_sample_size = 20;
    double noise_alpha = 5.0;
    double noise_beta = 3.0;
    std::size_t horizon = 110;  // T
    std::uint64_t seed = 0;

    void validate() const {
        if (!(a > 0.0 && a < 1.0)) throw ArgumentError("MisspecConfig: a must lie strictly inside (0,1)");
        if (noise_sample_size == 0) throw ArgumentError("MisspecConfig: noise_sample_size must be >= 1");
        if (!(noise_alpha > 0.0 && noise_beta > 0.0)) throw ArgumentError("MisspecConfig: Beta parameters must be > 0");
        if (horizon < 1) throw ArgumentError("MisspecConfig: horizon must be >= 1");
    }
};

/// Pointwise a*F + (1-a)*G, exact on the union of jump locations.
inline StepCurve convex_combination(double a, const StepCurve& f, const StepCurve& g) {
    if (f.domain() != g.domain()) throw ArgumentError("convex_combination: domains differ");
    const auto& fj = f.jumps();
    const auto& gj = g.jumps();
    std::vector<double> xs;
    std::vector<double> levels;
    xs.reserve(fj.size() + gj.size());
    levels.reserve(fj.size() + gj.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double fl = f.base_level();
    double gl = g.base_level();
    while (i < fj.size() || j < gj.size()) {
        const double x = (j >= gj.size() || (i < fj.size() && fj[i] <= gj[j])) ? fj[i] : gj[j];
        while (i < fj.size() && fj[i] == x) fl = f.levels()[i++];
        while (j < gj.size() && gj[j] == x) gl = g.levels()[j++];
        xs.push_back(x);
        levels.push_back(a * fl + (1.0 - a) * gl);
    }
    // Rounding in the weighted sum can undo monotonicity by one ulp.
    for (std::size_t k = 1; k < levels.size(); ++k) levels[k] = std::max(levels[k], levels[k - 1]);
    return StepCurve(std::move(xs), std::move(levels), f.domain(), a * f.base_level() + (1.0 - a) * g.base_level());
}

inline StepCurve noise_curve(const MisspecConfig& config, Rng& rng) {
    std::vector<double> xs(config.noise_sample_size);
    for (auto& x : xs) x = rng.beta(config.noise_alpha, config.noise_beta);
    return from_particles(xs);
}

/// F_0 = F_eps, then F_t = a F_{t-1} + (1 - a) F_eps with fresh noise each step.
inline CurveSeries generate_misspecified(const MisspecConfig& config) {
    config.validate();
    Rng rng(config.seed);
    CurveSeries out;
    out.curves.reserve(config.horizon + 1);
    out.curves.push_back(noise_curve(config, rng));
    for (std::size_t t = 1; t <= config.horizon; ++t) {
        out.curves.push_back(convex_combination(config.a, out.curves.back(), noise_curve(config, rng)));
    }
    return out;
}

/// The particle model from its stationary start.
inline CurveSeries generate_wellspecified(const ParamVector& params, const EngineConfig& config) {
    return simulate(params, config);
}

}  // namespace stepcast::synthetic
