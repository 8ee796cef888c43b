#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pairs/csv.hpp"
#include "pairs/error.hpp"
#include "pairs/series.hpp"

namespace pairs {

/// Month-over-month movement of an indicator. Declaration order is the
/// classifier's tie-break order.
enum class Direction { Up, Down, Flat };

enum class Signal { Long, Short, Flat };

inline constexpr std::array<Direction, 3> kDirectionOrder{Direction::Up, Direction::Down, Direction::Flat};

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::Up: return "up";
        case Direction::Down: return "down";
        case Direction::Flat: return "flat";
    }
    return "?";
}

inline const char* to_string(Signal s) {
    switch (s) {
        case Signal::Long: return "long";
        case Signal::Short: return "short";
        case Signal::Flat: return "flat";
    }
    return "?";
}

inline Direction parse_direction(std::string_view text) {
    if (text == "up") return Direction::Up;
    if (text == "down") return Direction::Down;
    if (text == "flat") return Direction::Flat;
    fail(ErrorCode::Parse, "unknown direction '" + std::string(text) + "'");
}

/// Up for changes above epsilon, Down below -epsilon, Flat otherwise.
inline std::vector<Direction> label_directions(std::span<const double> values, double flat_epsilon = 0.0) {
    if (flat_epsilon < 0.0) fail(ErrorCode::Validation, "flat epsilon must be non-negative");
    std::vector<Direction> out;
    if (values.size() < 2) return out;
    out.reserve(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) {
        const double change = values[t] - values[t - 1];
        out.push_back(change > flat_epsilon ? Direction::Up
                      : change < -flat_epsilon ? Direction::Down
                                               : Direction::Flat);
    }
    return out;
}

inline std::vector<Direction> label_directions(const MonthlySeries& series, double flat_epsilon = 0.0) {
    return label_directions(series.values, flat_epsilon);
}

/// A rising indicator means a stronger dollar, so the major currencies are sold.
inline Signal direction_to_signal(Direction d) {
    switch (d) {
        case Direction::Up: return Signal::Short;
        case Direction::Down: return Signal::Long;
        case Direction::Flat: return Signal::Flat;
    }
    return Signal::Flat;
}

inline constexpr std::size_t kDirectionFeatureCount = 7;

/// Feature rows for forecasting month t from information through t-1:
/// levels at t-1..t-3, changes at t-1..t-3, and the mean of those changes.
/// Row j targets month index target[j]; targets run from 4 to size(), the last
/// one being the month after the final observation.
struct DirectionFeatures {
    Eigen::MatrixXd rows;
    std::vector<std::size_t> target;
};

inline DirectionFeatures build_direction_features(std::span<const double> values) {
    DirectionFeatures out;
    const std::size_t n = values.size();
    if (n < 4) return out;
    const std::size_t count = n - 3;  // targets 4..n
    out.rows.resize(static_cast<Eigen::Index>(count), kDirectionFeatureCount);
    for (std::size_t t = 4; t <= n; ++t) {
        const auto r = static_cast<Eigen::Index>(t - 4);
        const double d1 = values[t - 1] - values[t - 2];
        const double d2 = values[t - 2] - values[t - 3];
        const double d3 = values[t - 3] - values[t - 4];
        out.rows.row(r) << values[t - 1], values[t - 2], values[t - 3], d1, d2, d3, (d1 + d2 + d3) / 3.0;
        out.target.push_back(t);
    }
    return out;
}

struct ClassifierParams {
    std::size_t epochs = 200;
    double regularization = 1e-3;
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
};

/// One-vs-rest linear classifier over standardized features.
struct DirectionModel {
    Eigen::VectorXd feature_mean;
    Eigen::VectorXd feature_scale;
    Eigen::Matrix<double, 3, Eigen::Dynamic> weights;  // row c scores kDirectionOrder[c]
    Eigen::Vector3d biases = Eigen::Vector3d::Zero();
    ClassifierParams params;
    double training_accuracy = 0.0;

    Eigen::Index feature_count() const noexcept { return feature_mean.size(); }
};

/// Argmax over class scores; ties go to the earlier class in (Up, Down, Flat).
inline std::vector<Direction> predict_directions(const DirectionModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.feature_count())
        fail(ErrorCode::Validation, "feature width " + std::to_string(features.cols()) + " does not match model width " +
                                        std::to_string(model.feature_count()));
    std::vector<Direction> out;
    out.reserve(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const Eigen::VectorXd x =
            ((features.row(i).transpose() - model.feature_mean).array() / model.feature_scale.array()).matrix();
        std::size_t best = 0;
        double best_score = model.weights.row(0).dot(x) + model.biases(0);
        for (std::size_t c = 1; c < 3; ++c) {
            const double s = model.weights.row(static_cast<Eigen::Index>(c)).dot(x) + model.biases(static_cast<Eigen::Index>(c));
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        out.push_back(kDirectionOrder[best]);
    }
    return out;
}

/// Regularized hinge loss, one binary problem per class, minimized by
/// stochastic subgradient descent with step lr / (1 + lr * lambda * t).
/// The sample order per epoch comes from a generator seeded with params.seed.
inline DirectionModel train_direction_classifier(const Eigen::MatrixXd& features, std::span<const Direction> labels,
                                                 const ClassifierParams& params = {}) {
    const auto n = features.rows();
    const auto d = features.cols();
    if (static_cast<std::size_t>(n) != labels.size()) fail(ErrorCode::Validation, "feature rows and labels differ in count");
    if (n < 24) fail(ErrorCode::Validation, "classifier training needs at least 24 rows");
    if (d < 1) fail(ErrorCode::Validation, "classifier needs at least one feature");
    if (std::all_of(labels.begin(), labels.end(), [&](Direction l) { return l == labels.front(); }))
        fail(ErrorCode::Degenerate, "training labels contain a single class");
    if (!(params.regularization > 0.0) || !(params.learning_rate > 0.0))
        fail(ErrorCode::Validation, "regularization and learning rate must be positive");

    DirectionModel model;
    model.params = params;
    model.feature_mean = features.colwise().mean().transpose();
    model.feature_scale.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double var = (features.col(j).array() - model.feature_mean(j)).square().sum() / static_cast<double>(n);
        model.feature_scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    Eigen::MatrixXd x = features.rowwise() - model.feature_mean.transpose();
    x = (x.array().rowwise() / model.feature_scale.transpose().array()).matrix();

    model.weights = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, d);
    std::mt19937_64 rng(params.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    for (std::size_t c = 0; c < 3; ++c) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
        double b = 0.0;
        std::size_t step = 0;
        for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (Eigen::Index i : order) {
                const double y = labels[static_cast<std::size_t>(i)] == kDirectionOrder[c] ? 1.0 : -1.0;
                const double eta = params.learning_rate / (1.0 + params.learning_rate * params.regularization * static_cast<double>(step++));
                const double margin = y * (x.row(i).dot(w) + b);
                w *= 1.0 - eta * params.regularization;
                if (margin < 1.0) {
                    w += eta * y * x.row(i).transpose();
                    b += eta * y;
                }
            }
        }
        model.weights.row(static_cast<Eigen::Index>(c)) = w.transpose();
        model.biases(static_cast<Eigen::Index>(c)) = b;
    }

    const auto predicted = predict_directions(model, features);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == labels[i];
    model.training_accuracy = static_cast<double>(hits) / static_cast<double>(n);
    return model;
}

namespace detail {

inline std::string hex_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline double parse_hex_real(const std::string& text) {
    double v = 0.0;
    if (!csv::try_parse_double(text, v)) fail(ErrorCode::Parse, "bad real '" + text + "' in model file");
    return v;
}

}  // namespace detail

/// Versioned text form; reals are written as hex floats so loading is exact.
inline std::string serialize_model(const DirectionModel& model) {
    std::ostringstream os;
    const auto d = model.feature_count();
    os << "pairs-direction-model v1\n";
    os << "classes up down flat\n";
    os << "features " << d << "\n";
    os << "epochs " << model.params.epochs << "\n";
    os << "seed " << model.params.seed << "\n";
    os << "regularization " << detail::hex_real(model.params.regularization) << "\n";
    os << "learning_rate " << detail::hex_real(model.params.learning_rate) << "\n";
    os << "training_accuracy " << detail::hex_real(model.training_accuracy) << "\n";
    os << "scaler_mean";
    for (Eigen::Index j = 0; j < d; ++j) os << ' ' << detail::hex_real(model.feature_mean(j));
    os << "\nscaler_scale";
    for (Eigen::Index j = 0; j < d; ++j) os << ' ' << detail::hex_real(model.feature_scale(j));
    os << "\n";
    for (std::size_t c = 0; c < 3; ++c) {
        os << "class " << to_string(kDirectionOrder[c]) << ' ' << detail::hex_real(model.biases(static_cast<Eigen::Index>(c)));
        for (Eigen::Index j = 0; j < d; ++j) os << ' ' << detail::hex_real(model.weights(static_cast<Eigen::Index>(c), j));
        os << "\n";
    }
    return os.str();
}

inline DirectionModel deserialize_model(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto next = [&](const std::string& key) {
        if (!std::getline(is, line)) fail(ErrorCode::Parse, "model file truncated before '" + key + "'");
        auto fields = csv::split(line, ' ');
        if (fields.empty() || fields[0] != key) fail(ErrorCode::Parse, "model file: expected '" + key + "', got '" + line + "'");
        fields.erase(fields.begin());
        return fields;
    };
    if (!std::getline(is, line) || line != "pairs-direction-model v1") fail(ErrorCode::Parse, "unsupported model file version");
    if (next("classes") != std::vector<std::string>{"up", "down", "flat"}) fail(ErrorCode::Parse, "unexpected class order");

    DirectionModel m;
    const auto d = static_cast<Eigen::Index>(std::stoul(next("features").at(0)));
    m.params.epochs = std::stoul(next("epochs").at(0));
    m.params.seed = std::stoull(next("seed").at(0));
    m.params.regularization = detail::parse_hex_real(next("regularization").at(0));
    m.params.learning_rate = detail::parse_hex_real(next("learning_rate").at(0));
    m.training_accuracy = detail::parse_hex_real(next("training_accuracy").at(0));
    auto read_vec = [&](const std::string& key) {
        const auto f = next(key);
        if (static_cast<Eigen::Index>(f.size()) != d) fail(ErrorCode::Parse, "model file: wrong width for " + key);
        Eigen::VectorXd v(d);
        for (Eigen::Index j = 0; j < d; ++j) v(j) = detail::parse_hex_real(f[static_cast<std::size_t>(j)]);
        return v;
    };
    m.feature_mean = read_vec("scaler_mean");
    m.feature_scale = read_vec("scaler_scale");
    m.weights.resize(3, d);
    for (std::size_t c = 0; c < 3; ++c) {
        const auto f = next("class");
        if (static_cast<Eigen::Index>(f.size()) != d + 2 || f[0] != to_string(kDirectionOrder[c]))
            fail(ErrorCode::Parse, "model file: malformed class row");
        m.biases(static_cast<Eigen::Index>(c)) = detail::parse_hex_real(f[1]);
        for (Eigen::Index j = 0; j < d; ++j)
            m.weights(static_cast<Eigen::Index>(c), j) = detail::parse_hex_real(f[static_cast<std::size_t>(j) + 2]);
    }
    return m;
}

/// Direction per calendar month, as produced by a forecast or an oracle file.
using MonthlyDirections = std::map<YearMonth, Direction>;

/// Reads a `month,direction` CSV with direction in {up, down, flat}.
inline MonthlyDirections load_direction_csv(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    const std::string source = path.string();
    if (lines.empty() || csv::split(lines.front()) != std::vector<std::string>{"month", "direction"})
        fail(ErrorCode::Parse, source + ": line 1: expected header 'month,direction'");
    MonthlyDirections out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const auto f = csv::split(lines[i]);
        YearMonth ym;
        if (f.size() != 2 || !try_parse_month(f[0], ym) || (f[1] != "up" && f[1] != "down" && f[1] != "flat"))
            fail(ErrorCode::Parse, source + ": line " + std::to_string(i + 1) + ": malformed row '" + lines[i] + "'");
        if (!out.emplace(ym, parse_direction(f[1])).second)
            fail(ErrorCode::Validation, source + ": duplicate month " + f[0]);
    }
    return out;
}

inline std::string format_direction_csv(const MonthlyDirections& directions) {
    std::string out = "month,direction\n";
    for (const auto& [ym, d] : directions) out += format_month(ym) + "," + to_string(d) + "\n";
    return out;
}

struct SignalSeries {
    std::vector<Date> dates;
    std::vector<Signal> signals;
};

/// Broadcasts each month's signal to its trading days.
inline SignalSeries expand_monthly_to_daily(const std::map<YearMonth, Signal>& monthly, const std::vector<Date>& daily_dates) {
    SignalSeries out;
    out.dates = daily_dates;
    out.signals.reserve(daily_dates.size());
    for (Date d : daily_dates) {
        const auto it = monthly.find(month_of(d));
        if (it == monthly.end()) fail(ErrorCode::Coverage, "no monthly signal for " + format_month(month_of(d)));
        out.signals.push_back(it->second);
    }
    return out;
}

inline std::map<YearMonth, Signal> directions_to_signals(const MonthlyDirections& directions) {
    std::map<YearMonth, Signal> out;
    for (const auto& [ym, d] : directions) out.emplace(ym, direction_to_signal(d));
    return out;
}

/// Out-of-sample direction forecasts for one indicator.
struct IndicatorForecast {
    DirectionModel model;
    MonthlyDirections predicted;  // every month after train_end that can be forecast
    std::size_t evaluated = 0;    // forecasts whose outcome is observed
    std::size_t correct = 0;

    double test_accuracy() const { return evaluated ? static_cast<double>(correct) / static_cast<double>(evaluated) : 0.0; }
};

/// Trains on target months up to and including `train_end`, then forecasts
/// every later month up to one past the final observation.
inline IndicatorForecast forecast_indicator(const MonthlySeries& series, YearMonth train_end, double flat_epsilon,
                                            const ClassifierParams& params) {
    const auto features = build_direction_features(series.values);
    const auto labels = label_directions(series, flat_epsilon);  // labels[t-1] describes month t
    std::vector<Eigen::Index> train_rows, test_rows;
    for (std::size_t r = 0; r < features.target.size(); ++r) {
        const std::size_t t = features.target[r];
        const YearMonth ym = series.months.front() + std::chrono::months{static_cast<int>(t)};
        (ym <= train_end ? train_rows : test_rows).push_back(static_cast<Eigen::Index>(r));
    }
    for (Eigen::Index r : train_rows) {
        if (features.target[static_cast<std::size_t>(r)] >= series.size())
            fail(ErrorCode::Validation, "training window extends past the observed data");
    }

    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_rows.size()), features.rows.cols());
    std::vector<Direction> y_train;
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
        x_train.row(static_cast<Eigen::Index>(i)) = features.rows.row(train_rows[i]);
        y_train.push_back(labels[features.target[static_cast<std::size_t>(train_rows[i])] - 1]);
    }

    IndicatorForecast out;
    out.model = train_direction_classifier(x_train, y_train, params);

    Eigen::MatrixXd x_test(static_cast<Eigen::Index>(test_rows.size()), features.rows.cols());
    for (std::size_t i = 0; i < test_rows.size(); ++i) x_test.row(static_cast<Eigen::Index>(i)) = features.rows.row(test_rows[i]);
    const auto predicted = predict_directions(out.model, x_test);
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
        const std::size_t t = features.target[static_cast<std::size_t>(test_rows[i])];
        out.predicted.emplace(series.months.front() + std::chrono::months{static_cast<int>(t)}, predicted[i]);
        if (t < series.size()) {
            ++out.evaluated;
            out.correct += predicted[i] == labels[t - 1];
        }
    }
    return out;
}

}  // namespace pairs
