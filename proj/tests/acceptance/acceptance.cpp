// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails. STEPCAST_REPLICATES overrides the replicate count of
// the simulation pipelines (default 10) for quick local runs.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "../auction_oracle.hpp"
#include "stepcast/stepcast.hpp"

using namespace stepcast;
using namespace stepcast::market;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Plain sort-based quantile, independent of the library's nearest-rank code.
double empirical_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::size_t distinct_count(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    return static_cast<std::size_t>(std::unique(x.begin(), x.end()) - x.begin());
}

const ParamVector kSim1Truth(10.0, 0.7, 0.25, 0.3);

// ---------------------------------------------------------------- 1, 2

void stationarity() {
    double oracle = 0.0;
    for (int i = 0; i < 500; ++i) oracle += 10.0 / (10.0 + i);
    std::vector<double> per_traj;
    for (std::uint64_t r = 0; r < 200; ++r) {
        const auto states = simulate_states(kSim1Truth, EngineConfig{500, 110, 1000 + r});
        double s = 0.0;
        for (const auto& st : states) s += static_cast<double>(distinct_count(st.particles));
        per_traj.push_back(s / static_cast<double>(states.size()));
    }
    const double m = mean_of(per_traj);
    const double se = sd_of(per_traj) / std::sqrt(200.0);
    report(1, "polya-urn stationarity", std::abs(m - oracle) <= 3.0 * se,
           fmt("mean K %.3f, exact %.3f, 3 SE %.3f", m, oracle, 3.0 * se));
}

void degenerate_dynamics() {
    bool frozen = true;
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto s = simulate(ParamVector(10.0, 0.0, 0.25, 0.3), EngineConfig{200, 50, r});
        for (const auto& c : s.curves) frozen = frozen && c == s.curves.front();
    }

    // p = 1 replaces all n; draw h is fresh with probability theta/(theta + h).
    const double theta = 1e6;
    const std::size_t n = 500;
    double expected = 0.0;
    double var_step = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        const double q = theta / (theta + static_cast<double>(h));
        expected += q;
        var_step += q * (1.0 - q);
    }
    expected /= static_cast<double>(n);
    var_step /= static_cast<double>(n * n);
    const ParamVector eta(theta, 1.0, 0.25, 0.3);
    Rng rng(77);
    auto x = polya_urn_sample(n, eta, rng);
    TransitionWorkspace ws;
    const int steps = 2000;
    double acc = 0.0;
    for (int t = 0; t < steps; ++t) {
        const auto st = transition_inplace(x, eta, rng, ws);
        acc += static_cast<double>(st.fresh) / static_cast<double>(n);
    }
    const double frac = acc / steps;
    const double se = std::sqrt(var_step / steps);
    const bool ok = frozen && std::abs(frac - expected) <= 3.0 * se + 1e-12 && expected > 0.999;
    report(2, "degenerate dynamics", ok,
           fmt("p=0 constant %s; p=1 innovation fraction %.6f vs %.6f (3 SE %.1e)", frozen ? "yes" : "no", frac,
               expected, 3.0 * se));
}

// ---------------------------------------------------------------- 3, 4, 10

struct PipelineRun {
    bool ok = false;
    std::string error;
    std::array<double, 3> l2{};  // h = 1, 3, 10
    std::vector<ParamVector> draws;
    std::vector<ForecastEnsemble> ensembles;
    std::vector<StepCurve> truth;  // aligned with ensembles
};

constexpr std::size_t kTrain = 60;  // training curves F_0..F_60
constexpr std::size_t kIterations = 5000;
constexpr std::size_t kBurnIn = 1000;
constexpr std::size_t kMembers = 500;
const std::vector<std::size_t> kHorizons{1, 3, 10};

using ThresholdRule = std::function<Thresholds(const SeriesSummary&)>;

PipelineRun run_pipeline(const CurveSeries& full, const PriorSpec& prior, std::size_t n, Reconstruction recon,
                         bool lattice, const ThresholdRule& rule, std::uint64_t seed) {
    PipelineRun out;
    try {
        CurveSeries train = full.head(kTrain + 1);
        const CurveSeries fitted = lattice ? quantize(train, n) : train;
        ChainOptions opt;
        opt.iterations = kIterations;
        opt.seed = seed;
        const SeriesSummary summary = summarize(fitted);
        ParticleSimulator sim(n, kTrain);
        const auto chain = run_chain(opt, prior, ProposalSpec{}, summary, rule(summary), sim);
        out.draws = chain.draws(kBurnIn);
        ForecastOptions fo;
        fo.horizons = kHorizons;
        fo.members = kMembers;
        fo.n = n;
        fo.seed = seed + 1;
        fo.reconstruction = recon;
        out.ensembles = forecast(train.curves.back(), out.draws, fo);
        for (std::size_t k = 0; k < kHorizons.size(); ++k) {
            out.truth.push_back(full.curves[kTrain + kHorizons[k]]);
            out.l2[k] = l2_distance(out.ensembles[k].point_estimate, out.truth.back());
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::size_t replicates() {
    if (const char* s = std::getenv("STEPCAST_REPLICATES")) return std::max(1, std::atoi(s));
    return 10;
}

void simulation_studies() {
    const std::size_t reps = replicates();
    const std::array<double, 3> table{0.0101, 0.0137, 0.0453};
    std::vector<PipelineRun> sim1;
    std::vector<PipelineRun> sim2;

    PriorSpec prior2;
    prior2.alpha = GammaPrior{2.0, 0.25};
    prior2.beta = GammaPrior{2.0, 0.25};
    const ThresholdRule calibrated = [](const SeriesSummary& s) { return calibrate_thresholds(s, 0.35, 0.5, 0.02); };
    // eps2, eps3 live on the [0,1] curve scale and carry over as given for
    // this study; the jump count does not, so eps1 keeps its fraction.
    const ThresholdRule sim2_eps = [](const SeriesSummary& s) {
        Thresholds t = calibrate_thresholds(s, 0.35, 0.0, 0.0);
        t.eps2 = 0.095;
        t.eps3 = 0.008;
        return t;
    };

    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto data1 = simulate(kSim1Truth, EngineConfig{500, kTrain + 10, 500 + r});
        sim1.push_back(run_pipeline(data1, PriorSpec{}, 500, Reconstruction::exact, false, calibrated, 900 + r));

        synthetic::MisspecConfig mc;
        mc.horizon = kTrain + 10;
        mc.seed = 700 + r;
        const auto data2 = synthetic::generate_misspecified(mc);
        // Hundreds of tiny jumps pile up; 500 particles only see them rounded.
        sim2.push_back(run_pipeline(data2, prior2, 500, Reconstruction::quantile, true, sim2_eps, 1900 + r));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "replicate %llu: sim1 %s %.4f %.4f %.4f | sim2 %s %.4f %.4f %.4f (%.0fs)\n",
                     static_cast<unsigned long long>(r), sim1.back().ok ? "ok" : sim1.back().error.c_str(),
                     sim1.back().l2[0], sim1.back().l2[1], sim1.back().l2[2],
                     sim2.back().ok ? "ok" : sim2.back().error.c_str(), sim2.back().l2[0], sim2.back().l2[1],
                     sim2.back().l2[2], secs);
    }

    // 3(a): central 90% of each marginal, judged on the first replicate;
    // the other replicates are only counted for context.
    {
        const std::array<double, 4> truth = as_array(kSim1Truth);
        const char* names[] = {"theta", "p", "alpha", "beta"};
        auto covers = [&](const PipelineRun& run, std::string* detail) {
            bool all = true;
            for (std::size_t j = 0; j < 4; ++j) {
                std::vector<double> v;
                for (const auto& d : run.draws) v.push_back(as_array(d)[j]);
                const double lo = empirical_quantile(v, 0.05);
                const double hi = empirical_quantile(v, 0.95);
                const bool in = truth[j] >= lo && truth[j] <= hi;
                all = all && in;
                if (detail) *detail += fmt("%s %g in [%.3g, %.3g]%s; ", names[j], truth[j], lo, hi, in ? "" : " NO");
            }
            return all;
        };
        std::string detail;
        const bool ok = sim1[0].ok && covers(sim1[0], &detail);
        if (!sim1[0].ok) detail = sim1[0].error + "; ";
        std::size_t all_reps = 0;
        for (const auto& run : sim1) all_reps += run.ok && covers(run, nullptr);
        detail += fmt("all four covered in %zu/%zu replicates", all_reps, reps);
        report(3, "sim-1 posterior covers true parameters", ok, detail);
    }

    // 3(b): per replicate, every h within a factor of 3 of the table and
    // errors strictly increasing in h.
    {
        std::size_t within = 0;
        std::size_t increasing = 0;
        std::array<double, 3> mean{};
        for (const auto& run : sim1) {
            if (!run.ok) continue;
            bool w = true;
            for (std::size_t k = 0; k < 3; ++k) {
                w = w && run.l2[k] <= 3.0 * table[k] && run.l2[k] >= table[k] / 3.0;
                mean[k] += run.l2[k] / static_cast<double>(reps);
            }
            within += w;
            increasing += run.l2[0] < run.l2[1] && run.l2[1] < run.l2[2];
        }
        const std::size_t need = (reps * 8 + 9) / 10;
        report(3, "sim-1 forecast errors vs table", within >= need && increasing >= need,
               fmt("mean L2 h=1/3/10 %.4f/%.4f/%.4f vs %.4f/%.4f/%.4f; within x3 in %zu/%zu, increasing in %zu/%zu",
                   mean[0], mean[1], mean[2], table[0], table[1], table[2], within, reps, increasing, reps));
    }

    {
        std::size_t produced = 0;
        std::size_t smaller = 0;
        std::array<double, 3> mean{};
        std::string first_error;
        for (std::size_t r = 0; r < reps; ++r) {
            if (!sim2[r].ok) {
                if (first_error.empty()) first_error = sim2[r].error;
                continue;
            }
            ++produced;
            bool s = sim1[r].ok;
            for (std::size_t k = 0; k < 3; ++k) {
                s = s && sim2[r].l2[k] < sim1[r].l2[k];
                mean[k] += sim2[r].l2[k] / static_cast<double>(reps);
            }
            smaller += s;
        }
        const std::size_t need = (reps * 8 + 9) / 10;
        report(4, "sim-2 misspecified pipeline", produced == reps && smaller >= need,
               fmt("forecasts in %zu/%zu; mean L2 h=1/3/10 %.4f/%.4f/%.4f; below sim-1 at every h in %zu/%zu%s%s",
                   produced, reps, mean[0], mean[1], mean[2], smaller, reps, first_error.empty() ? "" : "; ",
                   first_error.c_str()));
    }

    // 10: point-estimate contract on every sim-1 ensemble.
    {
        bool argmin_ok = true;
        bool monotone = true;
        std::size_t wider = 0;
        std::size_t checked = 0;
        const std::vector<double> gammas{0.5, 0.8, 0.9, 0.95, 0.99};
        for (const auto& run : sim1) {
            if (!run.ok) continue;
            ++checked;
            for (std::size_t k = 0; k < run.ensembles.size(); ++k) {
                const auto& e = run.ensembles[k];
                const std::size_t g = e.pointwise_mean_grid.size();
                // Exhaustive scan from scratch.
                std::vector<Grid> grids;
                for (const auto& m : e.members) grids.push_back(to_grid(m, g));
                Grid mean(g, 0.0);
                for (const auto& gr : grids) {
                    for (std::size_t i = 0; i < g; ++i) mean[i] += gr[i];
                }
                for (auto& v : mean) v /= static_cast<double>(grids.size());
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < grids.size(); ++i) {
                    double s = 0.0;
                    for (std::size_t q = 0; q < g; ++q) s += (grids[i][q] - mean[q]) * (grids[i][q] - mean[q]);
                    if (s < best_d) {
                        best_d = s;
                        best = i;
                    }
                }
                argmin_ok = argmin_ok && best == e.point_index && e.members[best] == e.point_estimate;

                const Grid truth = to_grid(run.truth[k], g);
                double prev = -1.0;
                for (double gamma : gammas) {
                    const auto [lo, hi] = credible_bands_from_grids(grids, gamma);
                    const double cov = band_coverage(truth, lo, hi);
                    monotone = monotone && cov >= prev;
                    prev = cov;
                }
            }
            wider += mean_band_width(run.ensembles.back()) > mean_band_width(run.ensembles.front());
        }
        report(10, "point estimate contract", checked > 0 && argmin_ok && monotone && wider == checked,
               fmt("argmin exact %s; coverage monotone in gamma %s; h=10 band wider than h=1 in %zu/%zu",
                   argmin_ok ? "yes" : "no", monotone ? "yes" : "no", wider, checked));
    }
}

// ---------------------------------------------------------------- 5

void calibration() {
    // Regenerated sim-1 data: 111 curves from the stationary start.
    const auto data = simulate(kSim1Truth, EngineConfig{500, 110, 2024});
    const auto s = summarize(data);
    const auto t = calibrate_thresholds(s, 0.35, 0.5, 0.02);
    const std::array<double, 3> reported{20.0, 0.1, 0.0003};
    const auto got = t.eps();
    bool ok = true;
    for (std::size_t j = 0; j < 3; ++j) ok = ok && std::abs(got[j] - reported[j]) <= 0.2 * reported[j];

    // The second pair fixes the summaries it implies; calibrating those
    // summaries with the same fractions must give the pair back.
    SeriesSummary implied;
    implied.mean_jump_count = 25.0 / 0.78;
    implied.envelope_l2 = 0.07 / 0.2;
    implied.mean_consecutive_l2 = 0.01 / 0.4;
    const auto back = calibrate_thresholds(implied, 0.78, 0.2, 0.4).eps();
    const std::array<double, 3> pair2{25.0, 0.07, 0.01};
    bool ok2 = true;
    for (std::size_t j = 0; j < 3; ++j) ok2 = ok2 && std::abs(back[j] - pair2[j]) <= 0.2 * pair2[j];

    report(5, "threshold calibration", ok && ok2,
           fmt("sim-1 c=(.35,.5,.02) gives (%.3g, %.3g, %.3g) vs (20, .1, .0003)%s; second pair %s", got[0], got[1],
               got[2], ok ? "" : " outside 20%", ok2 ? "consistent" : "inconsistent"));
}

// ---------------------------------------------------------------- 6

// Returns a summary whose distances to kGateData pass or fail each gate as
// told by the pattern it was armed with.
struct StubSimulator {
    std::array<bool, 3> pass{};
    std::size_t calls = 0;
    std::function<std::array<bool, 3>()> next;

    SeriesSummary operator()(const ParamVector&, Rng&) {
        ++calls;
        pass = next();
        SeriesSummary s;
        s.mean_jump_count = 10.0 + (pass[0] ? 0.5 : 2.0);
        s.pointwise_mean_grid = Grid(4, pass[1] ? 0.05 : 0.5);
        s.mean_consecutive_l2 = 0.1 + (pass[2] ? 0.001 : 0.05);
        return s;
    }
};

void gate_logic() {
    SeriesSummary data;
    data.mean_jump_count = 10.0;
    data.pointwise_mean_grid = Grid(4, 0.0);
    data.mean_consecutive_l2 = 0.1;
    Thresholds eps;
    eps.eps1 = 1.0;
    eps.eps2 = 0.1;
    eps.eps3 = 0.01;

    PriorSpec prior;
    prior.theta = UniformPrior{0.0, 100.0};
    const ProposalSpec proposal;

    // Exhaustive over the eight pass/fail patterns, many draws each.
    bool ok = true;
    std::size_t steps = 0;
    for (int pattern = 0; pattern < 8; ++pattern) {
        const std::array<bool, 3> want{(pattern & 1) != 0, (pattern & 2) != 0, (pattern & 4) != 0};
        StubSimulator sim;
        sim.next = [want] { return want; };
        Rng rng(static_cast<std::uint64_t>(pattern));
        ParamVector cur(50.0, 0.5, 0.5, 0.5);
        for (int i = 0; i < 2000; ++i) {
            const auto r = mh_step(cur, prior, proposal, data, eps, sim, rng);
            ++steps;
            const bool all = want[0] && want[1] && want[2];
            int first = -1;
            for (int j = 0; j < 3 && first < 0; ++j) {
                if (!want[static_cast<std::size_t>(j)]) first = j;
            }
            const StepOutcome expect =
                all ? StepOutcome::accepted : static_cast<StepOutcome>(static_cast<int>(StepOutcome::gate1_rejected) + first);
            ok = ok && r.ratio == 1.0 && r.accepted == all && r.outcome == expect &&
                 (all ? r.next == r.proposal : r.next == cur);
            cur = r.next;
        }
    }

    // Random patterns through the full driver; outcome counts must add up.
    Rng pick(99);
    StubSimulator sim;
    sim.next = [&pick] { return std::array<bool, 3>{pick.uniform() < 0.7, pick.uniform() < 0.7, pick.uniform() < 0.7}; };
    // The bootstrap needs one all-pass draw; the stub provides one eventually.
    ChainOptions opt;
    opt.iterations = 20000;
    opt.seed = 5;
    const auto rec = run_chain(opt, prior, proposal, data, eps, sim);
    const auto& d = rec.diagnostics;
    std::size_t accepted = 0;
    for (std::size_t i = 1; i < rec.samples.size(); ++i) accepted += rec.samples[i].accepted;
    const bool sums = d.total_moves() == opt.iterations - 1 && d.mh_rejected == 0 && accepted == d.accepted;

    report(6, "MH gate logic", ok && sums,
           fmt("%zu stubbed steps decided by the gates alone %s; counts %zu+%zu+%zu+%zu+%zu = %zu (I-1 = %zu)", steps,
               ok ? "yes" : "no", d.accepted, d.mh_rejected, d.gate_rejected[0], d.gate_rejected[1],
               d.gate_rejected[2], d.total_moves(), opt.iterations - 1));
}

// ---------------------------------------------------------------- 7, 8

std::vector<oracle::RawBid> random_bids(Rng& rng, std::size_t max_bids) {
    std::vector<oracle::RawBid> out(1 + rng.below(max_bids));
    for (auto& b : out) {
        b.price = static_cast<double>(rng.below(47)) * 0.5;
        b.quantity = 0.25 * static_cast<double>(1 + rng.below(40));
    }
    return out;
}

AuctionCurve curve_of(Side side, const std::vector<oracle::RawBid>& raw) {
    return AuctionCurve::from_bids(side, oracle::to_bids(raw, side));
}

void clearing() {
    Rng rng(2718);
    std::size_t agree = 0;
    std::size_t crossed = 0;
    const std::size_t pairs = 10000;
    for (std::size_t i = 0; i < pairs; ++i) {
        const auto db = random_bids(rng, 8);
        const auto sb = random_bids(rng, 8);
        const auto want = oracle::clear(db, sb);
        try {
            const auto c = intersect(curve_of(Side::demand, db), curve_of(Side::supply, sb));
            agree += want && c.quantity == want->quantity && c.price_lo == want->lo && c.price_hi == want->hi;
            ++crossed;
        } catch (const NoIntersectionError&) {
            agree += !want;
        }
    }

    const std::vector<oracle::RawBid> supply{{2, 2}, {5, 3}, {10, 5}, {15, 5}};
    const std::vector<oracle::RawBid> demand{{20, 3}, {8, 1}, {4, 2}};
    const CurvePair toy{curve_of(Side::demand, demand), curve_of(Side::supply, supply)};
    const double base = clearing_price(toy).price;
    const double at10 = clearing_price(inject_bid(toy, Bid{Side::demand, 10.0, 3.5})).price;
    const double at7 = clearing_price(inject_bid(toy, Bid{Side::demand, 7.0, 3.5})).price;
    const bool toy_ok = base == 5.0 && at10 == 10.0 && at7 > 5.0 && at7 <= 7.0;
    report(7, "auction clearing", agree == pairs && toy_ok,
           fmt("%zu/%zu random pairs match the scan oracle (%zu cross); toy %g, bid at 10 -> %g, bid at 7 -> %g", agree,
               pairs, crossed, base, at10, at7));
}

void whatif_monotonicity() {
    Rng rng(31415);
    std::size_t draws = 0;
    std::size_t violations = 0;
    std::size_t skipped = 0;
    while (draws < 10000) {
        const CurvePair pair{curve_of(Side::demand, random_bids(rng, 8)), curve_of(Side::supply, random_bids(rng, 8))};
        const Side side = rng.below(2) == 0 ? Side::demand : Side::supply;
        const Bid bid{side, static_cast<double>(rng.below(47)) * 0.5, 0.25 * static_cast<double>(1 + rng.below(40))};
        double before;
        double after;
        try {
            before = clearing_price(pair).price;
            after = clearing_price(inject_bid(pair, bid)).price;
        } catch (const NoIntersectionError&) {
            ++skipped;
            continue;
        }
        ++draws;
        if (side == Side::demand ? after < before : after > before) ++violations;
    }
    report(8, "what-if monotonicity", violations == 0,
           fmt("%zu violations over %zu draws (%zu draws without a crossing skipped)", violations, draws, skipped));
}

// ---------------------------------------------------------------- 9

void ar_recovery() {
    std::size_t covered = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        Rng rng(5000 + rep);
        std::vector<double> r(500);
        double prev = 0.0;
        for (auto& v : r) {
            prev = 0.5 * prev + 0.1 * rng.normal();
            v = prev;
        }
        ar::ARModelSpec spec;
        spec.chain_length = 3000;
        spec.burn_in = 500;
        spec.seed = rep;
        const auto fit = ar::gibbs_fit(r, spec);
        const double lo = empirical_quantile(fit.coef_samples, 0.025);
        const double hi = empirical_quantile(fit.coef_samples, 0.975);
        covered += lo <= 0.5 && 0.5 <= hi;
    }

    // With sigma^2 fixed the log posterior of the coefficient is quadratic:
    // read mean and variance off three evaluations.
    Rng rng(1);
    std::vector<double> r(500);
    double prev = 0.0;
    for (auto& v : r) {
        prev = 0.5 * prev + 0.1 * rng.normal();
        v = prev;
    }
    const double tau2 = 1000.0;
    double worst = 0.0;
    for (double sigma2 : {0.005, 0.01, 0.04}) {
        auto lp = [&](double rho) {
            double acc = -rho * rho / (2.0 * tau2);
            for (std::size_t t = 1; t < r.size(); ++t) {
                const double e = r[t] - rho * r[t - 1];
                acc -= e * e / (2.0 * sigma2);
            }
            return acc;
        };
        const double f0 = lp(0.0);
        const double fp = lp(1.0);
        const double fm = lp(-1.0);
        const double var = -0.5 / (0.5 * (fp + fm) - f0);
        const double mean = 0.5 * (fp - fm) * var;
        const auto c = ar::coef_conditional(r, sigma2, tau2);
        worst = std::max({worst, std::abs(c.mean - mean) / std::abs(mean), std::abs(c.variance - var) / var});
    }
    report(9, "AR-Gibbs recovery", covered >= 90 && worst <= 1e-10,
           fmt("95%% interval covers 0.5 in %zu/100; conditional max relative error %.1e", covered, worst));
}

}  // namespace

int main() {
    stationarity();
    degenerate_dynamics();
    simulation_studies();
    calibration();
    gate_logic();
    clearing();
    whatif_monotonicity();
    ar_recovery();
    return failures == 0 ? 0 : 1;
}
