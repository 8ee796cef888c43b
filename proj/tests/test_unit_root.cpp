#include <gtest/gtest.h>

#include <numeric>

#include "pairs/market_data.hpp"
#include "pairs/unit_root.hpp"
#include "test_helpers.hpp"

using namespace pairs;
namespace pt = pairs::testing;

namespace {

std::vector<double> fixture_prices(const std::string& id) {
    return load_price_csv(pt::fixture_dir() / "prices" / (id + ".csv")).values;
}

}  // namespace

TEST(SchwertMaxLag, Examples) {
    EXPECT_EQ(schwert_max_lag(100), 12u);
    EXPECT_EQ(schwert_max_lag(1600), 24u);
    EXPECT_EQ(schwert_max_lag(50), 10u);
}

TEST(DfCriticalValues, TableAndInterpolation) {
    EXPECT_DOUBLE_EQ(df_critical_values(100).pct5, -2.89);
    EXPECT_DOUBLE_EQ(df_critical_values(250).pct5, -2.88);
    EXPECT_DOUBLE_EQ(df_critical_values(10).pct5, -3.00);
    EXPECT_NEAR(df_critical_values(1'000'000'000).pct5, -2.86, 1e-6);
    const auto mid = df_critical_values(150);
    EXPECT_LT(mid.pct5, -2.88);
    EXPECT_GT(mid.pct5, -2.89);
    EXPECT_LT(mid.pct1, mid.pct5);
    EXPECT_LT(mid.pct5, mid.pct10);
}

// Frozen from tests/oracles/freeze_values.py (numpy least squares).
TEST(AdfTest, MatchesOracleOnFixtureRandomWalk) {
    const auto y = fixture_prices("RW1");
    const auto out = adf_test(y);
    EXPECT_EQ(out.chosen_lag, 0u);
    EXPECT_NEAR(out.statistic, -1.7566965355037556, 1e-8);
    EXPECT_FALSE(out.reject_unit_root);
    const auto d = adf_test(difference(y));
    EXPECT_EQ(d.chosen_lag, 0u);
    EXPECT_NEAR(d.statistic, -40.562673249416214, 1e-7);
    EXPECT_TRUE(d.reject_unit_root);
}

TEST(AdfTest, MatchesOracleOnMonthlyIndicator) {
    const auto m = load_monthly_csv(pt::fixture_dir() / "macro" / "MACRO1.csv");
    const auto out = adf_test(m.values);
    EXPECT_EQ(out.chosen_lag, 1u);
    EXPECT_NEAR(out.statistic, -3.0152590329256026, 1e-8);
    ASSERT_EQ(out.lag_coefficients.size(), 1u);
}

TEST(AdfTest, ConstantSeriesIsDegenerate) {
    const std::vector<double> flat(200, 3.5);
    try {
        adf_test(flat);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Degenerate);
    }
}

TEST(AdfTest, ShortSeriesIsDegenerate) {
    const auto y = pt::white_noise(1, 15);
    EXPECT_THROW(adf_test(y), Error);
}

TEST(AdfTest, InvariantToConstantShift) {
    const auto y = pt::random_walk(5, 800);
    auto shifted = y;
    for (auto& v : shifted) v += 1000.0;
    const auto a = adf_test(y);
    const auto b = adf_test(shifted);
    EXPECT_EQ(a.chosen_lag, b.chosen_lag);
    EXPECT_NEAR(a.statistic, b.statistic, 1e-8);
}

TEST(AdfTest, BicPicksTrueOrderOfStrongAr2Differences) {
    // dy_t = 0.6 dy_{t-1} - 0.3 dy_{t-2} + e_t integrated once.
    std::mt19937_64 rng(21);
    std::normal_distribution<double> normal;
    std::vector<double> y(3000);
    double d1 = 0, d2 = 0, level = 0;
    for (auto& v : y) {
        const double d = 0.6 * d1 - 0.3 * d2 + normal(rng);
        d2 = d1;
        d1 = d;
        level += d;
        v = level;
    }
    const auto out = adf_test(y);
    EXPECT_EQ(out.chosen_lag, 2u);
    ASSERT_EQ(out.lag_coefficients.size(), 2u);
    EXPECT_NEAR(out.lag_coefficients[0], 0.6, 0.06);
    EXPECT_NEAR(out.lag_coefficients[1], -0.3, 0.06);
}

TEST(AdfTest, ExplicitMaxLagIsHonoured) {
    const auto y = pt::random_walk(2, 500);
    const auto out = adf_test(y, 0);
    EXPECT_EQ(out.max_lag, 0u);
    EXPECT_EQ(out.chosen_lag, 0u);
    EXPECT_EQ(out.observations, 499u);
}

TEST(IntegrationOrder, ClassifiesCanonicalProcesses) {
    EXPECT_EQ(classify_integration_order(pt::white_noise(3, 1000)), IntegrationOrder::I0);
    EXPECT_EQ(classify_integration_order(pt::random_walk(3, 1000)), IntegrationOrder::I1);
    auto twice = pt::random_walk(3, 1000);
    std::partial_sum(twice.begin(), twice.end(), twice.begin());
    EXPECT_EQ(classify_integration_order(twice), IntegrationOrder::I2plus);
}

TEST(IntegrationOrder, FixturePricesAreI1) {
    for (const char* id : {"RW1", "RW2", "RW3", "RW4", "RW5", "CI1", "CI2"})
        EXPECT_EQ(classify_integration_order(fixture_prices(id)), IntegrationOrder::I1) << id;
}
