#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <vector>

#include "stepcast/market.hpp"

using namespace stepcast;
using namespace stepcast::market;

namespace {

const char* kToyCsv =
    "date,side,price_eur_gj,quantity_gj\n"
    "2012-01-02,supply,2,2\n"
    "2012-01-02,supply,5,3\n"
    "2012-01-02,supply,10,5\n"
    "2012-01-02,supply,15,5\n"
    "2012-01-02,demand,20,3\n"
    "2012-01-02,demand,8,1\n"
    "2012-01-02,demand,4,2\n";

MarketDay toy_day() {
    std::istringstream in(kToyCsv);
    return build_curves(read_bids(in), "2012-01-02");
}

}  // namespace

TEST(BidCsv, ParsesToyTable) {
    std::istringstream in(kToyCsv);
    const auto t = read_bids(in);
    EXPECT_EQ(t.rows.size(), 7u);
    EXPECT_EQ(t.dates(), (std::vector<std::string>{"2012-01-02"}));
    EXPECT_EQ(t.bids("2012-01-02", Side::demand).size(), 3u);
}

TEST(BidCsv, Rejections) {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_bids(in);
    };
    EXPECT_THROW(parse("day,side,price,qty\n"), ValidationError);
    EXPECT_THROW(parse("date,side,price_eur_gj,quantity_gj\n2012-01-02,supply,24,1\n"), ValidationError);
    EXPECT_THROW(parse("date,side,price_eur_gj,quantity_gj\n2012-01-02,supply,5,0\n"), ValidationError);
    EXPECT_THROW(parse("date,side,price_eur_gj,quantity_gj\n2012-13-02,supply,5,1\n"), ValidationError);
    EXPECT_THROW(parse("date,side,price_eur_gj,quantity_gj\n2012-01-02,offer,5,1\n"), ValidationError);
    EXPECT_THROW(parse("date,side,price_eur_gj,quantity_gj\n2012-01-02,supply,abc,1\n"), ValidationError);
    try {
        parse("date,side,price_eur_gj,quantity_gj\n2012-01-02,supply,5,1\n2012-01-02,supply,30,1\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(BuildCurves, TwoBidSupply) {
    const std::vector<Bid> bids{{Side::supply, 5, 2}, {Side::supply, 3, 1}};
    const auto s = AuctionCurve::from_bids(Side::supply, bids);
    EXPECT_EQ(s(0.5), 3.0);
    EXPECT_EQ(s(2.0), 5.0);
    EXPECT_EQ(s.extent(), 3.0);
}

TEST(BuildCurves, EndpointsAndConservation) {
    const auto day = toy_day();
    EXPECT_EQ(day.supply_ends.L, 0.0);
    EXPECT_EQ(day.supply_ends.R, 10.0);
    EXPECT_EQ(day.demand_ends.L, 0.0);
    EXPECT_EQ(day.demand_ends.R, 4.0);
    EXPECT_EQ(day.supply.extent(), 15.0);
    EXPECT_EQ(day.demand.extent(), 6.0);
    EXPECT_EQ(clearing_price(day).price, 5.0);
}

TEST(BuildCurves, DegenerateAndMissingSides) {
    BidTable t;
    t.rows.push_back({"2012-01-02", {Side::supply, 5, 2}, ""});
    t.rows.push_back({"2012-01-02", {Side::demand, 9, 2}, ""});
    EXPECT_THROW(build_curves(t, "2012-01-02"), ValidationError);  // L = R
    BidTable one;
    one.rows.push_back({"2012-01-02", {Side::supply, 5, 2}, ""});
    EXPECT_THROW(build_curves(one, "2012-01-02"), ValidationError);
}

TEST(Normalize, AffineMapAndLevels) {
    // Supply with jumps at 100, 200, 300.
    const AuctionCurve s(Side::supply, {100, 200, 300}, {4.6, 11.5, 23}, 400);
    const auto n = normalize(s);
    EXPECT_EQ(n.ends.L, 100.0);
    EXPECT_EQ(n.ends.R, 300.0);
    EXPECT_EQ(n.curve.jumps(), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_NEAR(n.curve.levels()[0], 0.2, 1e-15);
    EXPECT_NEAR(n.curve.levels()[1], 0.5, 1e-15);
    EXPECT_EQ(n.tail_ratio(), 0.5);
}

TEST(Normalize, DemandIsReversedToNonDecreasing) {
    const auto day = toy_day();
    const auto n = normalize(day.demand);
    const auto& lv = n.curve.levels();
    for (std::size_t i = 1; i < lv.size(); ++i) EXPECT_GT(lv[i], lv[i - 1]);
    EXPECT_NEAR(lv.front(), 1.0 - 20.0 / 23.0, 1e-15);
}

TEST(Normalize, RoundTripIsIdentity) {
    const auto day = toy_day();
    for (Side s : {Side::demand, Side::supply}) {
        const auto& c = day.curve(s);
        const auto back = denormalize(normalize(c), s);
        ASSERT_EQ(back.jumps().size(), c.jumps().size());
        for (std::size_t k = 0; k < c.jumps().size(); ++k) {
            EXPECT_NEAR(back.jumps()[k], c.jumps()[k], 1e-12);
            EXPECT_NEAR(back.prices()[k], c.prices()[k], 1e-12);
        }
        EXPECT_NEAR(back.extent(), c.extent(), 1e-12);
    }
}

TEST(Denormalize, UnitEndpointsAreIdentityOnQuantities) {
    StepCurve f({0.0, 0.4, 1.0}, {0.2, 0.6, 1.0});
    const auto c = denormalize(f, Side::supply, 0.0, 1.0, 0.0);
    EXPECT_EQ(c.jumps(), (std::vector<double>{0.0, 0.4, 1.0}));
    EXPECT_NEAR(c.prices()[1], 0.6 * 23, 1e-12);
}

TEST(Denormalize, ForecastResamplesBadDraws) {
    const std::vector<StepCurve> members(10, StepCurve({0.0, 0.5, 1.0}, {0.3, 0.6, 1.0}));
    const std::vector<double> R{5.0, 0.5, 6.0, 1.0};
    Rng rng(1);
    const auto out = denormalize_forecast(members, Side::supply, 2.0, R, 0.1, rng);
    EXPECT_EQ(out.members.size(), 10u);
    EXPECT_GT(out.resampled, 0u);
    for (double r : out.r_used) EXPECT_GT(r, 2.0);
    const std::vector<double> bad{1.0, 2.0};
    EXPECT_THROW(denormalize_forecast(members, Side::supply, 2.0, bad, 0.1, rng), ArgumentError);
}

TEST(Denormalize, BandWidthGrowsWithEndpointSpread) {
    const std::vector<StepCurve> members(200, StepCurve({0.0, 0.5, 1.0}, {0.3, 0.6, 1.0}));
    Rng rng(2);
    std::vector<double> tight;
    std::vector<double> wide;
    for (int i = 0; i < 200; ++i) {
        const double z = rng.normal();
        tight.push_back(100.0 + 2.0 * z);
        wide.push_back(100.0 + 20.0 * z);
    }
    auto spread = [&](const std::vector<double>& R) {
        const auto e = denormalize_forecast(members, Side::supply, 10.0, R, 0.1, rng);
        // The middle jump sits at L + (R - L) / 2.
        double lo = 1e9;
        double hi = -1e9;
        for (const auto& m : e.members) {
            lo = std::min(lo, m.jumps()[1]);
            hi = std::max(hi, m.jumps()[1]);
        }
        return hi - lo;
    };
    EXPECT_GT(spread(wide), spread(tight));
}

TEST(InjectBid, ToyScenariosAndPurity) {
    const auto day = toy_day();
    const CurvePair base{day.demand, day.supply};
    const auto p10 = inject_bid(base, {Side::demand, 10, 3.5});
    EXPECT_EQ(clearing_price(p10).price, 10.0);
    const double p7 = clearing_price(inject_bid(base, {Side::demand, 7, 3.5})).price;
    EXPECT_GT(p7, 5.0);
    EXPECT_LE(p7, 7.0);
    EXPECT_EQ(clearing_price(inject_bid(base, {Side::demand, 1, 1})).price, 5.0);
    // The input pair is untouched.
    EXPECT_EQ(base.demand, day.demand);
    EXPECT_EQ(clearing_price(base).price, 5.0);
    // Conservation on the injected side.
    EXPECT_EQ(p10.demand.extent(), day.demand.extent() + 3.5);
    EXPECT_THROW(inject_bid(base, {Side::demand, 30, 1}), ValidationError);
    EXPECT_THROW(inject_bid(base, {Side::demand, 5, 0}), ValidationError);
}

TEST(NormalizedSeries, CollectsEndpoints) {
    std::istringstream in(std::string(kToyCsv) +
                          "2012-01-03,supply,3,4\n2012-01-03,supply,6,4\n"
                          "2012-01-03,demand,12,2\n2012-01-03,demand,2,5\n");
    const auto days = build_all_days(read_bids(in));
    ASSERT_EQ(days.size(), 2u);
    const auto s = normalized_series(days, Side::supply);
    EXPECT_EQ(s.curves.size(), 2u);
    EXPECT_EQ(s.R, (std::vector<double>{10.0, 4.0}));
    EXPECT_EQ(s.curves.dates[1], "2012-01-03");
}
