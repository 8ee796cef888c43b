#include <gtest/gtest.h>

#include "pairs/backtest.hpp"
#include "test_helpers.hpp"

using namespace pairs;
namespace pt = pairs::testing;

namespace {

PricePanel panel_of(const Eigen::MatrixXd& m) {
    std::vector<std::string> ids;
    for (Eigen::Index j = 0; j < m.cols(); ++j) ids.push_back("P" + std::to_string(j));
    return PricePanel(business_days(Date{std::chrono::year{2010} / 1 / 4}, static_cast<std::size_t>(m.rows())), m, ids);
}

double brute_force_drawdown(const std::vector<double>& equity) {
    double worst = 0.0;
    for (std::size_t i = 0; i < equity.size(); ++i)
        for (std::size_t j = i; j < equity.size(); ++j) worst = std::min(worst, equity[j] / equity[i] - 1.0);
    return worst;
}

PricePanel random_pair(std::uint64_t seed, std::size_t n) {
    const auto a = pt::random_walk(seed, n, 100.0);
    const auto b = pt::random_walk(seed + 1000, n, 100.0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), 2);
    for (std::size_t t = 0; t < n; ++t) {
        m(static_cast<Eigen::Index>(t), 0) = a[t];
        m(static_cast<Eigen::Index>(t), 1) = b[t];
    }
    return panel_of(m);
}

}  // namespace

TEST(MrPositions, HandTrace) {
    const std::vector<double> z{0, -1.2, -0.5, 0.3, 1.5, 0.2, -0.1};
    EXPECT_EQ(generate_mr_positions(z, 1.0, 0.0), (std::vector<int>{0, 1, 1, 0, -1, -1, 0}));
}

TEST(MrPositions, NoTriggerStaysFlat) {
    const std::vector<double> z{0.9, -0.9, 0.5, -0.99, 0.0};
    EXPECT_EQ(generate_mr_positions(z, 1.0, 0.0), std::vector<int>(5, 0));
}

TEST(MrPositions, ExitThenEntrySameDay) {
    const std::vector<double> z{-2, 2};
    EXPECT_EQ(generate_mr_positions(z, 1.0, 0.0), (std::vector<int>{1, -1}));
}

TEST(MrPositions, RejectsBadThresholds) {
    const std::vector<double> z{0.0};
    EXPECT_THROW(generate_mr_positions(z, 1.0, 1.0), Error);
    EXPECT_THROW(generate_mr_positions(z, 0.0, -1.0), Error);
}

TEST(MrPositions, NegatingZNegatesPositions) {
    const auto z = pt::ar1(5, 2000, 0.95);
    std::vector<double> neg(z.size());
    for (std::size_t t = 0; t < z.size(); ++t) neg[t] = -z[t];
    const auto a = generate_mr_positions(z, 1.5, 0.25);
    const auto b = generate_mr_positions(neg, 1.5, 0.25);
    for (std::size_t t = 0; t < z.size(); ++t) EXPECT_EQ(a[t], -b[t]);
}

TEST(ComputePnl, ZeroPositionsZeroReturns) {
    const auto panel = random_pair(1, 50);
    const std::vector<int> pos(50, 0);
    const auto r = compute_pnl(panel, Eigen::Vector2d(1, -1), pos, CostModel{{{"P0", 0.1}, {"P1", 0.1}}});
    for (double x : r.daily_returns) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(r.total_transaction_cost, 0.0);
    EXPECT_EQ(r.apr, 0.0);
    EXPECT_FALSE(r.sharpe.has_value());
    EXPECT_EQ(r.max_drawdown, 0.0);
}

TEST(ComputePnl, SingleInstrumentArithmetic) {
    Eigen::MatrixXd m(2, 1);
    m << 100.0, 101.0;
    const auto panel = PricePanel(business_days(Date{std::chrono::year{2010} / 1 / 4}, 2), m, {"A"});
    const Eigen::VectorXd h = Eigen::VectorXd::Ones(1);
    const std::vector<int> pos{1, 1};
    const auto free = compute_pnl(panel, h, pos, CostModel{});
    EXPECT_DOUBLE_EQ(free.daily_returns[1], 0.01);
    const auto costly = compute_pnl(panel, h, pos, CostModel{{{"A", 0.5}}});
    EXPECT_DOUBLE_EQ(costly.transaction_costs[0], 0.5);
    EXPECT_DOUBLE_EQ(costly.daily_returns[0], -0.005);
    EXPECT_DOUBLE_EQ(costly.daily_returns[1], 0.01);
    EXPECT_DOUBLE_EQ(costly.total_transaction_cost, 0.5);
    EXPECT_NEAR(costly.cumulative_returns[1], 0.995 * 1.01 - 1.0, 1e-15);
}

TEST(ComputePnl, FlipChargesTwoUnits) {
    Eigen::MatrixXd m(4, 1);
    m << 100, 100, 100, 100;
    const auto panel = PricePanel(business_days(Date{std::chrono::year{2010} / 1 / 4}, 4), m, {"A"});
    const std::vector<int> pos{1, -1, 1, -1};
    const auto r = compute_pnl(panel, Eigen::VectorXd::Ones(1), pos, CostModel{{{"A", 0.1}}});
    EXPECT_DOUBLE_EQ(r.transaction_costs[0], 0.1);
    for (std::size_t t = 1; t < 4; ++t) EXPECT_DOUBLE_EQ(r.transaction_costs[t], 0.2);
}

TEST(ComputePnl, Errors) {
    const auto panel = random_pair(2, 30);
    const std::vector<int> short_pos(10, 0);
    EXPECT_THROW(compute_pnl(panel, Eigen::Vector2d(1, -1), short_pos, CostModel{}), Error);
    const std::vector<int> bad(30, 2);
    EXPECT_THROW(compute_pnl(panel, Eigen::Vector2d(1, -1), bad, CostModel{}), Error);
    const std::vector<int> ok(30, 0);
    EXPECT_THROW(compute_pnl(panel, Eigen::Vector3d(1, -1, 0), ok, CostModel{}), Error);
    EXPECT_THROW(compute_pnl(panel, Eigen::Vector2d(1, -1), ok, CostModel{{{"P0", -1.0}}}), Error);
    try {
        compute_pnl(panel, Eigen::Vector2d(0, 0), ok, CostModel{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Degenerate);
    }
}

TEST(ComputePnl, CostsNeverIncreaseReturns) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto panel = random_pair(seed, 300);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(-1, 1);
        std::vector<int> pos(300);
        for (auto& p : pos) p = pick(rng);
        const Eigen::Vector2d h(1.0, -0.7);
        const auto lo = compute_pnl(panel, h, pos, CostModel{{{"P0", 0.01}, {"P1", 0.01}}});
        const auto hi = compute_pnl(panel, h, pos, CostModel{{{"P0", 0.05}, {"P1", 0.02}}});
        EXPECT_LE(hi.apr, lo.apr);
        for (std::size_t t = 0; t < 300; ++t) EXPECT_LE(hi.daily_returns[t], lo.daily_returns[t]);
    }
}

TEST(ComputePnl, NegatedPositionsNegateGrossPnl) {
    const auto panel = random_pair(4, 200);
    std::vector<int> pos(200), neg(200);
    for (std::size_t t = 0; t < 200; ++t) {
        pos[t] = static_cast<int>(t / 7 % 3) - 1;
        neg[t] = -pos[t];
    }
    const auto a = compute_pnl(panel, Eigen::Vector2d(1, -0.5), pos, CostModel{});
    const auto b = compute_pnl(panel, Eigen::Vector2d(1, -0.5), neg, CostModel{});
    for (std::size_t t = 0; t < 200; ++t) {
        EXPECT_EQ(a.gross_pnl[t], -b.gross_pnl[t]);
        EXPECT_EQ(a.daily_returns[t], -b.daily_returns[t]);
    }
}

TEST(Metrics, ConstantReturnApr) {
    const std::vector<double> r(252, 0.0001);
    const auto m = compute_metrics(r);
    EXPECT_NEAR(m.apr, std::pow(1.0001, 252) - 1.0, 1e-12);
    EXPECT_NEAR(m.apr, 0.0255, 1e-4);
    EXPECT_FALSE(m.sharpe.has_value());
    EXPECT_EQ(m.max_drawdown, 0.0);
    EXPECT_THROW(sharpe_ratio(r), Error);
}

TEST(Metrics, DrawdownExample) {
    const std::vector<double> equity{1.0, 1.1, 0.99, 1.05, 1.2, 0.9};
    EXPECT_NEAR(max_drawdown(equity), -0.25, 1e-15);
    EXPECT_EQ(max_drawdown(std::vector<double>{1, 1, 2, 3, 3}), 0.0);
    std::vector<double> r;
    for (std::size_t i = 1; i < equity.size(); ++i) r.push_back(equity[i] / equity[i - 1] - 1.0);
    EXPECT_NEAR(compute_metrics(r).max_drawdown, -0.25, 1e-12);
}

TEST(Metrics, FirstDayLossCountsAsDrawdown) {
    const std::vector<double> r{-0.1, 0.05, 0.05};
    EXPECT_NEAR(compute_metrics(r).max_drawdown, -0.1, 1e-15);
}

TEST(Metrics, DrawdownMatchesBruteForceOnFuzz) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal(0.0, 0.02);
    std::uniform_int_distribution<int> len(2, 120);
    for (int k = 0; k < 300; ++k) {
        std::vector<double> r(static_cast<std::size_t>(len(rng)));
        for (auto& x : r) x = normal(rng);
        std::vector<double> path{1.0};
        const auto eq = equity_curve(r);
        path.insert(path.end(), eq.begin(), eq.end());
        EXPECT_EQ(compute_metrics(r).max_drawdown, brute_force_drawdown(path));
    }
}

TEST(Metrics, SharpeFormula) {
    const std::vector<double> r{0.01, -0.005, 0.002, 0.003};
    const auto [mean, sd] = sample_mean_std(r);
    EXPECT_NEAR(sharpe_ratio(r), std::sqrt(252.0) * mean / sd, 1e-12);
    EXPECT_NEAR(*compute_metrics(r).sharpe, sharpe_ratio(r), 1e-15);
    EXPECT_THROW(compute_metrics(std::vector<double>{0.1}), Error);
}
