#pragma once

// Zero-mean Bayesian AR(1) with Gaussian innovations, fitted by a two-block
// conjugate Gibbs sampler. Used on log-differenced right endpoints and on
// differenced clearing prices.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stepcast/error.hpp"
#include "stepcast/rng.hpp"

namespace stepcast::ar {

enum class Transform {
    log_diff,  // r_t = log s_{t+1} - log s_t
    diff,      // r_t = s_{t+1} - s_t
};

inline const char* to_string(Transform t) { return t == Transform::log_diff ? "log_diff" : "diff"; }

inline std::vector<double> transform(std::span<const double> series, Transform mode) {
    if (series.size() < 2) throw ArgumentError("ar::transform: series needs at least 2 values");
    std::vector<double> out(series.size() - 1);
    for (std::size_t t = 0; t + 1 < series.size(); ++t) {
        if (mode == Transform::log_diff) {
            if (!(series[t] > 0.0) || !(series[t + 1] > 0.0)) {
                throw ArgumentError("ar::transform: log_diff needs strictly positive values (index " +
                                    std::to_string(series[t] > 0.0 ? t + 1 : t) + ")");
            }
            out[t] = std::log(series[t + 1]) - std::log(series[t]);
        } else {
            out[t] = series[t + 1] - series[t];
        }
    }
    return out;
}

/// Levels after `last_level` implied by the transformed increments.
inline std::vector<double> invert_transform(double last_level, std::span<const double> increments, Transform mode) {
    std::vector<double> out(increments.size());
    double level = last_level;
    double log_level = mode == Transform::log_diff ? std::log(last_level) : 0.0;
    for (std::size_t k = 0; k < increments.size(); ++k) {
        if (mode == Transform::log_diff) {
            log_level += increments[k];
            level = std::exp(log_level);
        } else {
            level += increments[k];
        }
        out[k] = level;
    }
    return out;
}

/// How the second hyperparameter of the coefficient's Normal prior is read.
enum class NormalScale { variance, precision };

struct ARModelSpec {
    double coef_prior = 1000.0;  // N(0, 1000)
    NormalScale coef_prior_scale = NormalScale::variance;
    double var_shape = 0.01;  // I-Ga(0.01, 0.01)
    double var_scale = 0.01;
    std::size_t chain_length = 11000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 0;

    [[nodiscard]] double coef_prior_variance() const {
        return coef_prior_scale == NormalScale::variance ? coef_prior : 1.0 / coef_prior;
    }

    void validate() const {
        if (!(coef_prior > 0.0)) throw ArgumentError("ARModelSpec: coefficient prior scale must be > 0");
        if (!(var_shape > 0.0 && var_scale > 0.0)) throw ArgumentError("ARModelSpec: I-Ga parameters must be > 0");
        if (chain_length == 0) throw ArgumentError("ARModelSpec: chain_length must be > 0");
        if (burn_in >= chain_length) throw ArgumentError("ARModelSpec: burn_in must be < chain_length");
    }
};

struct ARFit {
    std::vector<double> coef_samples;
    std::vector<double> var_samples;
    Transform transform = Transform::log_diff;
    double last_level = 1.0;        // last observed untransformed value
    double last_transformed = 0.0;  // last r_t, the AR state for forecasting
};

struct NormalPosterior {
    double mean = 0.0;
    double variance = 1.0;
};

/// Full conditional of the coefficient given sigma^2:
/// precision = 1/tau^2 + sum r_{t-1}^2 / sigma^2, mean = (sum r_t r_{t-1} / sigma^2) / precision.
/// An all-zero regressor leaves the prior unchanged.
inline NormalPosterior coef_conditional(std::span<const double> r, double sigma2, double prior_variance) {
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t t = 1; t < r.size(); ++t) {
        sxx += r[t - 1] * r[t - 1];
        sxy += r[t] * r[t - 1];
    }
    const double precision = 1.0 / prior_variance + sxx / sigma2;
    return {(sxy / sigma2) / precision, 1.0 / precision};
}

/// Full conditional of sigma^2 given the coefficient: I-Ga(a + (N-1)/2, b + SSR/2).
inline std::pair<double, double> var_conditional(std::span<const double> r, double coef, const ARModelSpec& spec) {
    double ssr = 0.0;
    for (std::size_t t = 1; t < r.size(); ++t) {
        const double e = r[t] - coef * r[t - 1];
        ssr += e * e;
    }
    return {spec.var_shape + 0.5 * static_cast<double>(r.size() - 1), spec.var_scale + 0.5 * ssr};
}

inline ARFit gibbs_fit(std::span<const double> r, const ARModelSpec& spec) {
    spec.validate();
    if (r.size() < 3) throw ArgumentError("ar::gibbs_fit: need at least 3 transformed values");
    Rng rng(spec.seed);
    const double tau2 = spec.coef_prior_variance();

    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    double sigma2 = 0.0;
    for (double v : r) sigma2 += (v - mean) * (v - mean);
    sigma2 = sigma2 > 0.0 ? sigma2 / static_cast<double>(r.size()) : 1.0;

    ARFit fit;
    const std::size_t keep = spec.chain_length - spec.burn_in;
    fit.coef_samples.reserve(keep);
    fit.var_samples.reserve(keep);
    for (std::size_t it = 0; it < spec.chain_length; ++it) {
        const NormalPosterior c = coef_conditional(r, sigma2, tau2);
        const double coef = c.mean + std::sqrt(c.variance) * rng.normal();
        const auto [shape, scale] = var_conditional(r, coef, spec);
        sigma2 = 1.0 / rng.gamma(shape, scale);
        if (it >= spec.burn_in) {
            fit.coef_samples.push_back(coef);
            fit.var_samples.push_back(sigma2);
        }
    }
    fit.last_transformed = r.back();
    return fit;
}

/// Transform a raw level series and fit the AR(1) on it.
inline ARFit fit_levels(std::span<const double> levels, Transform mode, const ARModelSpec& spec) {
    const auto r = transform(levels, mode);
    ARFit fit = gibbs_fit(r, spec);
    fit.transform = mode;
    fit.last_level = levels.back();
    return fit;
}

/// `n_draws` level paths of length h: each picks a posterior draw uniformly,
/// simulates h AR steps from the last transformed value and inverts the transform.
inline std::vector<std::vector<double>> forecast_levels(const ARFit& fit, std::size_t h, std::size_t n_draws,
                                                        Rng& rng) {
    if (fit.coef_samples.empty() || fit.coef_samples.size() != fit.var_samples.size()) {
        throw ArgumentError("ar::forecast_levels: fit has no posterior samples");
    }
    std::vector<std::vector<double>> paths;
    paths.reserve(n_draws);
    std::vector<double> increments(h);
    for (std::size_t d = 0; d < n_draws; ++d) {
        const std::size_t j = rng.below(fit.coef_samples.size());
        const double coef = fit.coef_samples[j];
        const double sd = std::sqrt(fit.var_samples[j]);
        double prev = fit.last_transformed;
        for (std::size_t k = 0; k < h; ++k) {
            prev = coef * prev + sd * rng.normal();
            increments[k] = prev;
        }
        paths.push_back(invert_transform(fit.last_level, increments, fit.transform));
    }
    return paths;
}

}  // namespace stepcast::ar
