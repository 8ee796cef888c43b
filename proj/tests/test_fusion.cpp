#include <gtest/gtest.h>

#include "pairs/fusion.hpp"
#include "pairs/spread.hpp"
#include "test_helpers.hpp"

using namespace pairs;
namespace pt = pairs::testing;
using enum pairs::Signal;

namespace {

SignalSeries series_of(const std::vector<Signal>& s) {
    return {business_days(Date{std::chrono::year{2010} / 1 / 4}, s.size()), s};
}

struct Setup {
    PricePanel panel;
    Eigen::VectorXd hedge;
    std::vector<SignalSeries> sources;
};

/// Mean-reverting pair, one source that trades the future spread move, two noise sources, and MR last.
Setup make_setup(std::uint64_t seed) {
    SyntheticConfig c;
    c.length = 600;
    c.random_walks = 1;
    c.recipes = {{{2.0}, 1.0, ou_speed_for_half_life(10)}};
    auto panel = generate_synthetic_panel(seed, c);
    Eigen::VectorXd hedge = Eigen::Vector2d(1.0, -0.5);
    const auto spread = compute_spread(panel, hedge);
    const auto mr = generate_mr_positions(spread.zscores, 1.0, 0.0);

    std::vector<int> oracle(spread.values.size(), 0);
    for (std::size_t t = 0; t + 1 < oracle.size(); ++t)
        oracle[t] = spread.values[t + 1] > spread.values[t] ? 1 : -1;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(-1, 1);
    std::vector<int> noise1(oracle.size()), noise2(oracle.size());
    for (std::size_t t = 0; t < oracle.size(); ++t) {
        noise1[t] = pick(rng);
        noise2[t] = pick(rng);
    }
    const auto& d = panel.dates();
    return {panel, hedge,
            {positions_to_signals(d, oracle), positions_to_signals(d, noise1), positions_to_signals(d, noise2),
             positions_to_signals(d, mr)}};
}

}  // namespace

TEST(OneHot, Encoding) {
    EXPECT_EQ(one_hot_encode(Long), (OneHotSignal{1, 0, 0}));
    EXPECT_EQ(one_hot_encode(Short), (OneHotSignal{0, 1, 0}));
    EXPECT_EQ(one_hot_encode(Flat), (OneHotSignal{0, 0, 1}));
}

TEST(WeightVector, RejectsOutOfBox) {
    EXPECT_THROW(WeightVector({0.5, 1.5}), Error);
    EXPECT_THROW(WeightVector({-0.1}), Error);
    EXPECT_NO_THROW(WeightVector({0.0, 1.0}));
}

TEST(CombineSignals, Examples) {
    const std::vector<SignalSeries> a{series_of({Long}), series_of({Long}), series_of({Short}), series_of({Flat})};
    EXPECT_EQ(combine_signals(a, WeightVector({1, 1, 1, 1})).signals, std::vector<Signal>{Long});
    const std::vector<SignalSeries> b{series_of({Long}), series_of({Short}), series_of({Flat}), series_of({Flat})};
    EXPECT_EQ(combine_signals(b, WeightVector({1, 1, 0, 0})).signals, std::vector<Signal>{Flat});
    EXPECT_EQ(combine_signals(b, WeightVector({0, 0, 0, 0})).signals, std::vector<Signal>{Flat});
}

TEST(CombineSignals, IdentityWeightsReproduceLastSource) {
    const auto s = make_setup(1);
    const auto combined = combine_signals(s.sources, WeightVector({0, 0, 0, 1}));
    EXPECT_EQ(combined.signals, s.sources.back().signals);
    EXPECT_EQ(combined.dates, s.sources.back().dates);
}

TEST(CombineSignals, CalendarMismatchIsAlignmentError) {
    std::vector<SignalSeries> s{series_of({Long, Short}), series_of({Long, Short})};
    s[1].dates[1] += std::chrono::days{7};
    try {
        combine_signals(s, WeightVector({1, 1}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Alignment);
    }
    EXPECT_THROW(combine_signals(s, WeightVector({1})), Error);
}

TEST(CombineSignals, ScaleInvariance) {
    const auto s = make_setup(2);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        // Dyadic weights and scale keep the vote scores exact.
        std::vector<double> w(4), half(4);
        for (std::size_t i = 0; i < 4; ++i) {
            w[i] = std::floor(u(rng) * 8.0) / 8.0;
            half[i] = w[i] * 0.5;
        }
        EXPECT_EQ(combine_signals(s.sources, WeightVector(w)).signals,
                  combine_signals(s.sources, WeightVector(half)).signals);
    }
}

TEST(CombineSignals, PermutationEquivariance) {
    const auto s = make_setup(3);
    const std::vector<double> w{0.75, 0.25, 0.5, 1.0};
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    std::vector<SignalSeries> ps;
    std::vector<double> pw;
    for (std::size_t i : perm) {
        ps.push_back(s.sources[i]);
        pw.push_back(w[i]);
    }
    EXPECT_EQ(combine_signals(s.sources, WeightVector(w)).signals, combine_signals(ps, WeightVector(pw)).signals);
}

TEST(SignalToPosition, Mapping) {
    EXPECT_EQ(signal_to_position(series_of({Long, Flat, Short})), (std::vector<int>{1, 0, -1}));
    EXPECT_EQ(signal_to_position(series_of({Flat, Flat})), (std::vector<int>{0, 0}));
    EXPECT_EQ(signal_to_position(series_of({Long, Short, Long})), (std::vector<int>{1, -1, 1}));
}

TEST(WeightGrid, SizeAndFloor) {
    EXPECT_EQ(detail::weight_grid(4, 0.25, 0.0).size(), 625u);
    const auto floored = detail::weight_grid(4, 0.25, 0.5);
    EXPECT_EQ(floored.size(), 375u);
    for (const auto& w : floored) EXPECT_GE(w.back(), 0.5);
    EXPECT_THROW(detail::weight_grid(2, 0.3, 0.0), Error);
}

TEST(OptimizeWeights, DominatesBaselineAndGrid) {
    const auto s = make_setup(4);
    OptimizerConfig cfg;
    cfg.seed = 4;
    const auto r = optimize_weights(s.sources, s.panel, s.hedge, cfg);
    const double baseline = fused_apr(s.sources, WeightVector({0, 0, 0, 1}), s.panel, s.hedge);
    EXPECT_DOUBLE_EQ(r.baseline_apr, baseline);
    EXPECT_GE(r.apr, r.best_grid_apr);
    EXPECT_GT(r.apr, baseline + 0.001);
    EXPECT_GT(r.weights[0], 0.0);
    EXPECT_EQ(r.grid_size, 625u);
    double grid_best = -1.0;
    for (const auto& w : detail::weight_grid(4, 0.25, 0.0))
        grid_best = std::max(grid_best, fused_apr(s.sources, WeightVector(w), s.panel, s.hedge));
    EXPECT_DOUBLE_EQ(r.best_grid_apr, grid_best);
    EXPECT_DOUBLE_EQ(fused_apr(s.sources, r.weights, s.panel, s.hedge), r.apr);
    for (const auto& p : r.trace) {
        for (double w : p.weights) {
            EXPECT_GE(w, 0.0);
            EXPECT_LE(w, 1.0);
        }
        EXPECT_LE(p.apr, r.apr);
    }
}

TEST(OptimizeWeights, DeterministicTrace) {
    const auto s = make_setup(5);
    OptimizerConfig cfg;
    cfg.seed = 11;
    const auto a = optimize_weights(s.sources, s.panel, s.hedge, cfg);
    const auto b = optimize_weights(s.sources, s.panel, s.hedge, cfg);
    EXPECT_EQ(format_trace_csv(a), format_trace_csv(b));
    const std::string csv = format_trace_csv(a);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "probe_index,w1,w2,w3,w4,apr");
}

TEST(OptimizeWeights, AllFlatSourcesAreDegenerate) {
    const auto s = make_setup(6);
    const std::vector<int> flat(s.panel.length(), 0);
    const std::vector<SignalSeries> sources(2, positions_to_signals(s.panel.dates(), flat));
    try {
        optimize_weights(sources, s.panel, s.hedge);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OptimizationDegenerate);
    }
}
