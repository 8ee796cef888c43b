#include <gtest/gtest.h>

#include "pairs/macro_signals.hpp"
#include "test_helpers.hpp"

using namespace pairs;
namespace pt = pairs::testing;
using enum pairs::Direction;

namespace {

/// Three well-separated Gaussian blobs in 2-D, one per class.
void separable_blobs(std::uint64_t seed, std::size_t per_class, Eigen::MatrixXd& x, std::vector<Direction>& y) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.3);
    const std::array<std::array<double, 2>, 3> centre{{{4.0, 0.0}, {-4.0, 0.0}, {0.0, 5.0}}};
    x.resize(static_cast<Eigen::Index>(3 * per_class), 2);
    y.clear();
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < per_class; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            x(r, 0) = centre[c][0] + noise(rng);
            x(r, 1) = centre[c][1] + noise(rng);
            y.push_back(kDirectionOrder[c]);
            ++r;
        }
    }
}

std::vector<YearMonth> months_from(YearMonth start, std::size_t n) {
    std::vector<YearMonth> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(start + std::chrono::months{static_cast<int>(i)});
    return out;
}

}  // namespace

TEST(LabelDirections, Examples) {
    EXPECT_EQ(label_directions(std::vector<double>{2, 3, 3, 1}), (std::vector<Direction>{Up, Flat, Down}));
    EXPECT_EQ(label_directions(std::vector<double>{4, 4, 4}), (std::vector<Direction>{Flat, Flat}));
    EXPECT_EQ(label_directions(std::vector<double>{0.0, 0.4, -0.2}, 0.5), (std::vector<Direction>{Flat, Down}));
    EXPECT_TRUE(label_directions(std::vector<double>{1.0}).empty());
    EXPECT_THROW(label_directions(std::vector<double>{1, 2}, -0.1), Error);
}

TEST(DirectionToSignal, Mapping) {
    EXPECT_EQ(direction_to_signal(Up), Signal::Short);
    EXPECT_EQ(direction_to_signal(Down), Signal::Long);
    EXPECT_EQ(direction_to_signal(Flat), Signal::Flat);
}

TEST(DirectionFeatures, UseOnlyPastValues) {
    const std::vector<double> v{1, 2, 4, 7, 11};
    const auto f = build_direction_features(v);
    ASSERT_EQ(f.rows.rows(), 2);
    EXPECT_EQ(f.target, (std::vector<std::size_t>{4, 5}));
    // Row for target month 4 sees months 0..3 only.
    Eigen::VectorXd expected(7);
    expected << 7, 4, 2, 3, 2, 1, 2;
    EXPECT_EQ(Eigen::VectorXd(f.rows.row(0).transpose()), expected);
    EXPECT_DOUBLE_EQ(f.rows(1, 0), 11.0);
}

TEST(Classifier, SeparableDataIsFitExactly) {
    Eigen::MatrixXd x;
    std::vector<Direction> y;
    separable_blobs(1, 30, x, y);
    const auto model = train_direction_classifier(x, y);
    EXPECT_DOUBLE_EQ(model.training_accuracy, 1.0);
    EXPECT_EQ(predict_directions(model, x), y);
}

TEST(Classifier, GeneralizesOnHeldOutBlobs) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Eigen::MatrixXd x, xt;
        std::vector<Direction> y, yt;
        separable_blobs(seed, 30, x, y);
        separable_blobs(seed + 500, 50, xt, yt);
        ClassifierParams p;
        p.seed = seed;
        const auto pred = predict_directions(train_direction_classifier(x, y, p), xt);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < yt.size(); ++i) hits += pred[i] == yt[i];
        EXPECT_GE(static_cast<double>(hits) / static_cast<double>(yt.size()), 0.95) << "seed " << seed;
    }
}

TEST(Classifier, SingleClassIsDegenerate) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(30, 2);
    const std::vector<Direction> y(30, Up);
    try {
        train_direction_classifier(x, y);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Degenerate);
    }
}

TEST(Classifier, InputValidation) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(30, 2);
    std::vector<Direction> y(29, Up);
    EXPECT_THROW(train_direction_classifier(x, y), Error);
    Eigen::MatrixXd small = Eigen::MatrixXd::Random(10, 2);
    std::vector<Direction> ys(10, Up);
    ys[0] = Down;
    EXPECT_THROW(train_direction_classifier(small, ys), Error);
}

TEST(Classifier, TieBreaksToUp) {
    DirectionModel m;
    m.feature_mean = Eigen::VectorXd::Zero(2);
    m.feature_scale = Eigen::VectorXd::Ones(2);
    m.weights = Eigen::Matrix<double, 3, Eigen::Dynamic>::Random(3, 2);
    const auto pred = predict_directions(m, Eigen::MatrixXd::Zero(1, 2));
    EXPECT_EQ(pred, std::vector<Direction>{Up});
}

TEST(Classifier, DuplicateRowsGiveIdenticalPredictions) {
    Eigen::MatrixXd x;
    std::vector<Direction> y;
    separable_blobs(3, 20, x, y);
    const auto model = train_direction_classifier(x, y);
    Eigen::MatrixXd rows = x.row(7).replicate(5, 1);
    const auto pred = predict_directions(model, rows);
    EXPECT_EQ(pred, std::vector<Direction>(5, pred[0]));
}

TEST(Classifier, WidthMismatchIsValidationError) {
    Eigen::MatrixXd x;
    std::vector<Direction> y;
    separable_blobs(3, 20, x, y);
    const auto model = train_direction_classifier(x, y);
    try {
        predict_directions(model, Eigen::MatrixXd::Zero(2, 3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Validation);
    }
}

TEST(Classifier, TrainingIsBitwiseDeterministic) {
    Eigen::MatrixXd x;
    std::vector<Direction> y;
    separable_blobs(5, 20, x, y);
    x.col(0).array() += Eigen::ArrayXd::LinSpaced(60, -1.0, 1.0);  // make the problem less trivial
    ClassifierParams p;
    p.seed = 42;
    const auto a = train_direction_classifier(x, y, p);
    const auto b = train_direction_classifier(x, y, p);
    EXPECT_EQ(serialize_model(a), serialize_model(b));
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.biases, b.biases);
}

TEST(Classifier, SerializationRoundTripsBitwise) {
    Eigen::MatrixXd x;
    std::vector<Direction> y;
    separable_blobs(6, 20, x, y);
    const auto model = train_direction_classifier(x, y);
    const auto text = serialize_model(model);
    const auto back = deserialize_model(text);
    EXPECT_EQ(back.weights, model.weights);
    EXPECT_EQ(back.biases, model.biases);
    EXPECT_EQ(back.feature_mean, model.feature_mean);
    EXPECT_EQ(back.feature_scale, model.feature_scale);
    EXPECT_EQ(serialize_model(back), text);
    EXPECT_EQ(predict_directions(back, x), predict_directions(model, x));
    EXPECT_THROW(deserialize_model("not a model"), Error);
}

TEST(ExpandMonthly, BroadcastsToTradingDays) {
    const YearMonth march{std::chrono::year{2010}, std::chrono::March};
    const auto days = business_days(Date{std::chrono::year{2010} / 3 / 1}, 23);
    ASSERT_EQ(month_of(days.back()), march);
    const auto s = expand_monthly_to_daily({{march, Signal::Long}}, days);
    EXPECT_EQ(s.signals, std::vector<Signal>(23, Signal::Long));
}

TEST(ExpandMonthly, SwitchesAtMonthBoundary) {
    const YearMonth jan{std::chrono::year{2010}, std::chrono::January};
    const auto days = business_days(Date{std::chrono::year{2010} / 1 / 25}, 10);
    const auto s = expand_monthly_to_daily({{jan, Signal::Long}, {jan + std::chrono::months{1}, Signal::Short}}, days);
    for (std::size_t i = 0; i < days.size(); ++i)
        EXPECT_EQ(s.signals[i], month_of(days[i]) == jan ? Signal::Long : Signal::Short);
    EXPECT_EQ(s.signals.front(), Signal::Long);
    EXPECT_EQ(s.signals.back(), Signal::Short);
}

TEST(ExpandMonthly, MissingMonthIsCoverageError) {
    const YearMonth jan{std::chrono::year{2010}, std::chrono::January};
    const auto days = business_days(Date{std::chrono::year{2010} / 1 / 25}, 10);
    try {
        expand_monthly_to_daily({{jan, Signal::Long}}, days);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Coverage);
        EXPECT_NE(std::string(e.what()).find("2010-02"), std::string::npos);
    }
}

TEST(DirectionCsv, RoundTrip) {
    const auto dir = pt::temp_dir("direction_csv");
    const auto months = months_from(YearMonth{std::chrono::year{2009}, std::chrono::November}, 4);
    const MonthlyDirections d{{months[0], Up}, {months[1], Down}, {months[2], Flat}, {months[3], Up}};
    const auto path = pt::write_text(dir / "d.csv", format_direction_csv(d));
    EXPECT_EQ(load_direction_csv(path), d);
    const auto bad = pt::write_text(dir / "bad.csv", "month,direction\n2009-01,sideways\n");
    EXPECT_THROW(load_direction_csv(bad), Error);
}

TEST(ForecastIndicator, TrainsBeforeCutoffAndForecastsAfter) {
    MonthlySeries s;
    s.months = months_from(YearMonth{std::chrono::year{2000}, std::chrono::January}, 150);
    // A persistent cycle so lagged changes carry information about the next move.
    for (std::size_t t = 0; t < 150; ++t) s.values.push_back(std::sin(static_cast<double>(t) * 0.5));
    const YearMonth cutoff{std::chrono::year{2007}, std::chrono::December};
    const auto f = forecast_indicator(s, cutoff, 0.0, {});
    EXPECT_FALSE(f.predicted.empty());
    EXPECT_GT(f.predicted.begin()->first, cutoff);
    // One forecast per month after the cutoff, through the month after the last observation.
    EXPECT_EQ(f.predicted.rbegin()->first, s.months.back() + std::chrono::months{1});
    EXPECT_EQ(f.evaluated + 1, f.predicted.size());
    EXPECT_GT(f.test_accuracy(), 0.9);
}
