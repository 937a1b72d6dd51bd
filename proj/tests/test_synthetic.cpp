#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stepcast/summaries.hpp"
#include "stepcast/synthetic.hpp"

using namespace stepcast;
using namespace stepcast::synthetic;

namespace {

// Regularized incomplete beta for integer parameters (5, 3).
double beta53_cdf(double x) {
    double s = 0.0;
    const double c[] = {21.0, 7.0, 1.0};  // C(7,5), C(7,6), C(7,7)
    for (int j = 5; j <= 7; ++j) s += c[j - 5] * std::pow(x, j) * std::pow(1.0 - x, 7 - j);
    return s;
}

StepCurve random_curve(Rng& rng, std::size_t k) {
    std::vector<double> xs(k);
    for (auto& x : xs) x = rng.uniform();
    return from_particles(xs);
}

}  // namespace

TEST(Synthetic, ConvexCombinationExamples) {
    const auto h = convex_combination(0.5, StepCurve::flat(0.0), StepCurve::flat(1.0));
    EXPECT_TRUE(h.jumps().empty());
    EXPECT_EQ(h(0.3), 0.5);

    const StepCurve f({0.2}, {1.0});
    const StepCurve g({0.6}, {1.0});
    const auto m = convex_combination(0.5, f, g);
    EXPECT_EQ(m(0.1), 0.0);
    EXPECT_EQ(m(0.3), 0.5);
    EXPECT_EQ(m(0.7), 1.0);
}

TEST(Synthetic, ConvexCombinationMatchesPointwiseOracle) {
    Rng rng(4);
    const auto xs = grid_points(kUnitDomain, 997);
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = random_curve(rng, 1 + rng.below(30));
        const auto g = random_curve(rng, 1 + rng.below(30));
        const double a = rng.uniform();
        const auto h = convex_combination(a, f, g);
        for (double x : xs) EXPECT_NEAR(h(x), a * f(x) + (1.0 - a) * g(x), 1e-15);
    }
}

TEST(Synthetic, CombinationPreservesOrder) {
    Rng rng(5);
    const auto xs = grid_points(kUnitDomain, 301);
    for (int trial = 0; trial < 200; ++trial) {
        // g dominates f: shift every particle left.
        std::vector<double> p(10);
        for (auto& v : p) v = 0.2 + 0.8 * rng.uniform();
        std::vector<double> q = p;
        for (auto& v : q) v -= 0.2 * rng.uniform();
        const auto f = from_particles(p);
        const auto g = from_particles(q);
        const auto n = random_curve(rng, 10);
        const auto hf = convex_combination(0.7, f, n);
        const auto hg = convex_combination(0.7, g, n);
        for (double x : xs) EXPECT_LE(hf(x), hg(x));
    }
}

TEST(Synthetic, SeriesIsValidAndReproducible) {
    MisspecConfig c;
    c.horizon = 50;
    c.seed = 8;
    const auto s = generate_misspecified(c);
    ASSERT_EQ(s.size(), 51u);
    EXPECT_NO_THROW(s.validate());
    for (const auto& f : s.curves) {
        EXPECT_EQ(f.base_level(), 0.0);
        EXPECT_DOUBLE_EQ(f.final_level(), 1.0);
        for (std::size_t k = 1; k < f.levels().size(); ++k) EXPECT_GE(f.levels()[k], f.levels()[k - 1]);
    }
    EXPECT_EQ(generate_misspecified(c).curves, s.curves);
}

TEST(Synthetic, PersistenceShrinksConsecutiveDistance) {
    MisspecConfig c;
    c.horizon = 100;
    c.seed = 2;
    c.a = 0.5;
    const double loose = summarize(generate_misspecified(c)).mean_consecutive_l2;
    c.a = 0.999;
    const double tight = summarize(generate_misspecified(c)).mean_consecutive_l2;
    EXPECT_LT(tight, 0.01);
    EXPECT_LT(tight, loose / 50.0);
}

TEST(Synthetic, LongRunMeanIsTheNoiseCdf) {
    MisspecConfig c;
    c.horizon = 2000;
    c.seed = 3;
    const auto mean = pointwise_mean(generate_misspecified(c));
    const auto xs = grid_points(kUnitDomain, kDefaultGridSize);
    double sup = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) sup = std::max(sup, std::abs(mean[k] - beta53_cdf(xs[k])));
    EXPECT_LT(sup, 0.05);
}

TEST(Synthetic, ConfigValidation) {
    MisspecConfig c;
    c.a = 1.0;
    EXPECT_THROW(c.validate(), ArgumentError);
    c.a = 0.5;
    c.noise_sample_size = 0;
    EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Synthetic, WellSpecifiedWrapsTheEngine) {
    const ParamVector p(10, 0.7, 0.25, 0.3);
    const EngineConfig e{50, 5, 1};
    EXPECT_EQ(generate_wellspecified(p, e).curves, simulate(p, e).curves);
}
