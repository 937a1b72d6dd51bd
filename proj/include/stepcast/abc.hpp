#pragma once

// MCMC-ABC: a rejection-ABC bootstrap for the first accepted parameter, then
// a Metropolis-Hastings chain with truncated-normal random-walk proposals
// where a move is kept only if the MH condition holds AND a freshly
// simulated series passes all three distance gates.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stepcast/error.hpp"
#include "stepcast/particles.hpp"
#include "stepcast/rng.hpp"
#include "stepcast/step_curve.hpp"
#include "stepcast/summaries.hpp"

namespace stepcast {

struct GammaPrior {
    double shape = 1.0;
    double rate = 1.0;
};

struct UniformPrior {
    double lo = 0.0;
    double hi = 1.0;
};

/// One coordinate's prior: Gamma(shape, rate) or Uniform(lo, hi).
class Prior1D {
public:
    Prior1D(GammaPrior g) : dist_(g) {  // NOLINT(google-explicit-constructor)
        if (!(g.shape > 0.0 && g.rate > 0.0)) throw ArgumentError("Gamma prior needs shape, rate > 0");
    }
    Prior1D(UniformPrior u) : dist_(u) {  // NOLINT(google-explicit-constructor)
        if (!(u.lo < u.hi)) throw ArgumentError("Uniform prior needs lo < hi");
    }

    [[nodiscard]] bool is_uniform() const noexcept { return std::holds_alternative<UniformPrior>(dist_); }
    [[nodiscard]] const std::variant<GammaPrior, UniformPrior>& dist() const noexcept { return dist_; }

    /// Open support interval.
    [[nodiscard]] std::pair<double, double> support() const {
        if (const auto* u = std::get_if<UniformPrior>(&dist_)) return {u->lo, u->hi};
        return {0.0, std::numeric_limits<double>::infinity()};
    }

    [[nodiscard]] bool in_support(double x) const {
        const auto [lo, hi] = support();
        return x > lo && x < hi;
    }

    [[nodiscard]] double sample(Rng& rng) const {
        if (const auto* u = std::get_if<UniformPrior>(&dist_)) return u->lo + (u->hi - u->lo) * rng.uniform_open();
        const auto& g = std::get<GammaPrior>(dist_);
        double x;
        do {
            x = rng.gamma(g.shape, g.rate);
        } while (!(x > 0.0));
        return x;
    }

    [[nodiscard]] double log_density(double x) const {
        if (!in_support(x)) return -std::numeric_limits<double>::infinity();
        if (const auto* u = std::get_if<UniformPrior>(&dist_)) return -std::log(u->hi - u->lo);
        const auto& g = std::get<GammaPrior>(dist_);
        return g.shape * std::log(g.rate) - std::lgamma(g.shape) + (g.shape - 1.0) * std::log(x) - g.rate * x;
    }

private:
    std::variant<GammaPrior, UniformPrior> dist_;
};

/// Independent priors on (theta, p, alpha, beta). Defaults are the
/// correctly specified simulation study: Ga(2, .04), U(0,1), U(0,1), U(0,1).
struct PriorSpec {
    Prior1D theta = GammaPrior{2.0, 0.04};
    Prior1D p = UniformPrior{0.0, 1.0};
    Prior1D alpha = UniformPrior{0.0, 1.0};
    Prior1D beta = UniformPrior{0.0, 1.0};

    [[nodiscard]] std::array<const Prior1D*, 4> coords() const { return {&theta, &p, &alpha, &beta}; }

    [[nodiscard]] ParamVector sample(Rng& rng) const {
        return ParamVector(theta.sample(rng), p.sample(rng), alpha.sample(rng), beta.sample(rng));
    }

    [[nodiscard]] double log_density(const ParamVector& x) const {
        return theta.log_density(x.theta) + p.log_density(x.p) + alpha.log_density(x.alpha) +
               beta.log_density(x.beta);
    }

    [[nodiscard]] bool in_support(const ParamVector& x) const {
        return theta.in_support(x.theta) && p.in_support(x.p) && alpha.in_support(x.alpha) &&
               beta.in_support(x.beta);
    }

    [[nodiscard]] bool all_uniform() const {
        return theta.is_uniform() && p.is_uniform() && alpha.is_uniform() && beta.is_uniform();
    }
};

inline std::array<double, 4> as_array(const ParamVector& x) { return {x.theta, x.p, x.alpha, x.beta}; }

inline ParamVector from_array(const std::array<double, 4>& a) { return ParamVector(a[0], a[1], a[2], a[3]); }

/// How the Hastings correction of the truncated-normal kernel is handled.
enum class HastingsMode {
    symmetric,  // treat the kernel as symmetric: ratio of priors only
    exact,      // include the truncation normalizers
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Four independent truncated normals centred on the current value; each is
/// truncated to its prior's support.
struct ProposalSpec {
    std::array<double, 4> step_sd{3.0, 0.15, 0.15, 0.15};
    HastingsMode mode = HastingsMode::symmetric;

    void validate() const {
        for (double s : step_sd) {
            if (!(s > 0.0)) throw ArgumentError("ProposalSpec: step sizes must be > 0");
        }
    }

    [[nodiscard]] ParamVector propose(const ParamVector& current, const PriorSpec& prior, Rng& rng) const {
        const auto x = as_array(current);
        const auto priors = prior.coords();
        std::array<double, 4> y{};
        for (std::size_t i = 0; i < 4; ++i) {
            const auto [lo, hi] = priors[i]->support();
            double v;
            do {
                v = x[i] + step_sd[i] * rng.normal();
            } while (!(v > lo && v < hi));
            y[i] = v;
        }
        return from_array(y);
    }

    /// log q(to | from), up to the Gaussian kernel that cancels in the ratio.
    [[nodiscard]] double log_normalizer(const ParamVector& from, const PriorSpec& prior) const {
        const auto x = as_array(from);
        const auto priors = prior.coords();
        double acc = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const auto [lo, hi] = priors[i]->support();
            const double upper = std::isfinite(hi) ? normal_cdf((hi - x[i]) / step_sd[i]) : 1.0;
            const double lower = normal_cdf((lo - x[i]) / step_sd[i]);
            acc += std::log(upper - lower);
        }
        return acc;
    }

    /// log of q(current | proposed) / q(proposed | current).
    [[nodiscard]] double log_hastings(const ParamVector& current, const ParamVector& proposed,
                                      const PriorSpec& prior) const {
        if (mode == HastingsMode::symmetric) return 0.0;
        // q(y|x) = phi((y-x)/s) / (s Z(x)); the phi terms cancel.
        return log_normalizer(current, prior) - log_normalizer(proposed, prior);
    }
};

/// Anything that maps a parameter vector to the summary of a simulated series.
template <class S>
concept Simulator = requires(S& sim, const ParamVector& eta, Rng& rng) {
    { sim(eta, rng) } -> std::convertible_to<SeriesSummary>;
};

/// Forward-simulates T+1 curves from a stationary start and summarizes them
/// on the grid without building StepCurve objects.
class ParticleSimulator {
public:
    ParticleSimulator(std::size_t n, std::size_t horizon, std::size_t grid_size = kDefaultGridSize)
        : n_(n), horizon_(horizon), grid_size_(grid_size), xs_(grid_points(kUnitDomain, grid_size)),
          grid_(grid_size), sorted_(n) {
        if (n == 0 || horizon == 0) throw ArgumentError("ParticleSimulator: n and horizon must be >= 1");
    }

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t horizon() const noexcept { return horizon_; }

    SeriesSummary operator()(const ParamVector& eta, Rng& rng) {
        SummaryAccumulator acc(grid_size_);
        std::vector<double> x = polya_urn_sample(n_, eta, rng);
        record(x, acc);
        for (std::size_t t = 1; t <= horizon_; ++t) {
            transition_inplace(x, eta, rng, ws_);
            record(x, acc);
        }
        return acc.finish();
    }

private:
    void record(const std::vector<double>& x, SummaryAccumulator& acc) {
        std::copy(x.begin(), x.end(), sorted_.begin());
        std::sort(sorted_.begin(), sorted_.end());
        std::size_t distinct = sorted_.empty() ? 0 : 1;
        for (std::size_t i = 1; i < sorted_.size(); ++i) distinct += sorted_[i] != sorted_[i - 1];
        sorted_particles_to_grid(sorted_, xs_, grid_);
        acc.add(grid_, distinct);
    }

    std::size_t n_;
    std::size_t horizon_;
    std::size_t grid_size_;
    std::vector<double> xs_;
    Grid grid_;
    std::vector<double> sorted_;
    TransitionWorkspace ws_;
};

/// Why an MCMC iteration ended the way it did. Every iteration after the
/// first falls in exactly one category.
enum class StepOutcome : std::uint8_t {
    bootstrap,
    accepted,
    mh_rejected,
    gate1_rejected,  // first failing gate: mean jump count
    gate2_rejected,  // first failing gate: mean curve
    gate3_rejected,  // first failing gate: volatility
};

inline const char* to_string(StepOutcome o) {
    switch (o) {
        case StepOutcome::bootstrap: return "bootstrap";
        case StepOutcome::accepted: return "accepted";
        case StepOutcome::mh_rejected: return "mh_rejected";
        case StepOutcome::gate1_rejected: return "gate1_rejected";
        case StepOutcome::gate2_rejected: return "gate2_rejected";
        case StepOutcome::gate3_rejected: return "gate3_rejected";
    }
    return "unknown";
}

struct ChainSample {
    ParamVector params;
    bool accepted = false;
    StepOutcome outcome = StepOutcome::bootstrap;
    Distances distances;    // of the proposal's simulated series
    double mh_ratio = 1.0;  // prior times Hastings ratio of the proposal
    ParamVector proposal;   // the candidate evaluated at this iteration
};

struct ChainDiagnostics {
    std::size_t accepted = 0;
    std::size_t mh_rejected = 0;
    std::array<std::size_t, 3> gate_rejected{};
    std::size_t bootstrap_attempts = 0;

    [[nodiscard]] std::size_t total_moves() const {
        return accepted + mh_rejected + gate_rejected[0] + gate_rejected[1] + gate_rejected[2];
    }
};

struct ChainRecord {
    std::vector<ChainSample> samples;
    ChainDiagnostics diagnostics;
    double acceptance_rate = 0.0;  // accepted moves / (I - 1)
    std::uint64_t seed = 0;
    Thresholds thresholds;  // final thresholds of the schedule
    ProposalSpec proposal;
    PriorSpec prior;

    [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }

    /// Parameter draws after dropping `burn_in` and keeping every `thin`-th.
    [[nodiscard]] std::vector<ParamVector> draws(std::size_t burn_in = 0, std::size_t thin = 1) const {
        std::vector<ParamVector> out;
        if (thin == 0) thin = 1;
        for (std::size_t i = burn_in; i < samples.size(); i += thin) out.push_back(samples[i].params);
        return out;
    }
};

/// Bootstrap exhausted its attempts. Carries the best distances seen, where
/// "best" minimizes the largest distance-to-threshold ratio.
class BootstrapFailure : public std::runtime_error {
public:
    BootstrapFailure(std::size_t attempts, Distances best)
        : std::runtime_error("ABC bootstrap failed after " + std::to_string(attempts) +
                             " attempts; best distances (" + std::to_string(best.jumps) + ", " +
                             std::to_string(best.mean_curve) + ", " + std::to_string(best.volatility) + ")"),
          attempts_(attempts), best_(best) {}

    [[nodiscard]] std::size_t attempts() const noexcept { return attempts_; }
    [[nodiscard]] const Distances& best() const noexcept { return best_; }

private:
    std::size_t attempts_;
    Distances best_;
};

struct BootstrapResult {
    ParamVector params;
    std::size_t attempts = 0;
    Distances distances;
};

namespace detail {
inline double worst_ratio(const Distances& d, const Thresholds& eps) {
    const auto dv = d.as_array();
    const auto ev = eps.eps();
    double r = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        const double q = ev[j] > 0.0 ? dv[j] / ev[j] : (dv[j] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        r = std::max(r, q);
    }
    return r;
}
}  // namespace detail

/// Rejection ABC: draw from the prior until a simulated series passes all gates.
template <Simulator Sim>
BootstrapResult bootstrap_first_accept(const PriorSpec& prior, const SeriesSummary& data, const Thresholds& eps,
                                       Sim& simulate, Rng& rng, std::size_t max_attempts) {
    if (max_attempts < 1) throw ArgumentError("bootstrap_first_accept: max_attempts must be >= 1");
    Distances best{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        const ParamVector eta = prior.sample(rng);
        const SeriesSummary sim = simulate(eta, rng);
        const GateResult g = accept(sim, data, eps);
        if (g.accepted) return {eta, attempt, g.distances};
        const double r = detail::worst_ratio(g.distances, eps);
        if (attempt == 1 || r < best_ratio) {
            best_ratio = r;
            best = g.distances;
        }
    }
    throw BootstrapFailure(max_attempts, best);
}

struct MhStepResult {
    ParamVector next;
    bool accepted = false;
    StepOutcome outcome = StepOutcome::mh_rejected;
    Distances distances;
    double ratio = 1.0;
    ParamVector proposal;
};

/// One MCMC-ABC iteration: propose, simulate, draw u, keep the proposal iff
/// u <= prior/Hastings ratio and all three gates pass.
template <Simulator Sim>
MhStepResult mh_step(const ParamVector& current, const PriorSpec& prior, const ProposalSpec& proposal,
                     const SeriesSummary& data, const Thresholds& eps, Sim& simulate, Rng& rng) {
    MhStepResult r;
    r.proposal = proposal.propose(current, prior, rng);
    const SeriesSummary sim = simulate(r.proposal, rng);
    const double u = rng.uniform();
    const double log_ratio =
        prior.log_density(r.proposal) - prior.log_density(current) + proposal.log_hastings(current, r.proposal, prior);
    r.ratio = std::exp(log_ratio);
    const GateResult g = accept(sim, data, eps);
    r.distances = g.distances;
    if (!(u <= r.ratio)) {
        r.outcome = StepOutcome::mh_rejected;
    } else if (!g.accepted) {
        r.outcome = static_cast<StepOutcome>(static_cast<int>(StepOutcome::gate1_rejected) + g.first_failure());
    } else {
        r.outcome = StepOutcome::accepted;
        r.accepted = true;
    }
    r.next = r.accepted ? r.proposal : current;
    return r;
}

struct ChainOptions {
    std::size_t iterations = 50000;  // I
    std::size_t max_bootstrap_attempts = 100000;
    std::uint64_t seed = 0;
};

/// Algorithm driver: bootstrap, then I - 1 MCMC-ABC moves.
template <Simulator Sim>
ChainRecord run_chain(const ChainOptions& options, const PriorSpec& prior, const ProposalSpec& proposal,
                      const SeriesSummary& data, const ThresholdSchedule& schedule, Sim& simulate) {
    if (options.iterations < 1) throw ArgumentError("run_chain: iterations must be >= 1");
    proposal.validate();
    Rng rng(options.seed);
    ChainRecord rec;
    rec.seed = options.seed;
    rec.proposal = proposal;
    rec.prior = prior;
    rec.samples.reserve(options.iterations);

    const Thresholds first = schedule(0);
    const BootstrapResult boot =
        bootstrap_first_accept(prior, data, first, simulate, rng, options.max_bootstrap_attempts);
    rec.diagnostics.bootstrap_attempts = boot.attempts;
    rec.samples.push_back({boot.params, true, StepOutcome::bootstrap, boot.distances, 1.0, boot.params});
    rec.thresholds = first;

    ParamVector current = boot.params;
    std::size_t accepted = 1;
    for (std::size_t i = 1; i < options.iterations; ++i) {
        const Thresholds eps = schedule(accepted);
        rec.thresholds = eps;
        const MhStepResult r = mh_step(current, prior, proposal, data, eps, simulate, rng);
        switch (r.outcome) {
            case StepOutcome::accepted: ++rec.diagnostics.accepted; break;
            case StepOutcome::mh_rejected: ++rec.diagnostics.mh_rejected; break;
            case StepOutcome::gate1_rejected: ++rec.diagnostics.gate_rejected[0]; break;
            case StepOutcome::gate2_rejected: ++rec.diagnostics.gate_rejected[1]; break;
            case StepOutcome::gate3_rejected: ++rec.diagnostics.gate_rejected[2]; break;
            case StepOutcome::bootstrap: break;
        }
        if (r.accepted) ++accepted;
        current = r.next;
        rec.samples.push_back({r.next, r.accepted, r.outcome, r.distances, r.ratio, r.proposal});
    }
    rec.acceptance_rate = options.iterations > 1
                              ? static_cast<double>(rec.diagnostics.accepted) /
                                    static_cast<double>(options.iterations - 1)
                              : 1.0;
    return rec;
}

template <Simulator Sim>
ChainRecord run_chain(const ChainOptions& options, const PriorSpec& prior, const ProposalSpec& proposal,
                      const SeriesSummary& data, const Thresholds& eps, Sim& simulate) {
    return run_chain(options, prior, proposal, data, constant_schedule(eps), simulate);
}

/// Convenience entry point on raw data: summarizes the series, calibrates
/// thresholds from c-fractions when `eps` is absent, and simulates series of
/// the same horizon with n particles.
inline ChainRecord run_chain(const ChainOptions& options, const PriorSpec& prior, const ProposalSpec& proposal,
                             const CurveSeries& data, std::size_t n, std::optional<Thresholds> eps,
                             std::array<double, 3> c_fractions, std::size_t grid_size = kDefaultGridSize) {
    data.validate();
    if (data.size() < 2) throw ArgumentError("run_chain: data needs at least 2 curves");
    const SeriesSummary summary = summarize(data, grid_size);
    const Thresholds t =
        eps ? *eps : calibrate_thresholds(summary, c_fractions[0], c_fractions[1], c_fractions[2]);
    ParticleSimulator sim(n, data.size() - 1, grid_size);
    return run_chain(options, prior, proposal, summary, t, sim);
}

}  // namespace stepcast
