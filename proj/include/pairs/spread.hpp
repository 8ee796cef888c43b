#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/market_data.hpp"
#include "pairs/regression.hpp"

namespace pairs {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

/// Mean and sample standard deviation (n - 1 denominator).
inline MeanStd sample_mean_std(std::span<const double> values) {
    const auto n = values.size();
    if (n < 2) return {n ? values[0] : 0.0, 0.0};
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

/// z_t = (s_t - mean) / std over the full sample.
inline std::vector<double> standardize(std::span<const double> values) {
    const auto [mean, sd] = sample_mean_std(values);
    if (!(sd > 0.0)) fail(ErrorCode::Degenerate, "cannot standardize a series with zero variance");
    std::vector<double> out(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) out[t] = (values[t] - mean) / sd;
    return out;
}

/// Trailing-window z-scores. The first window-1 entries have no history and are 0.
/// Uses only data up to and including t, unlike the full-sample default.
inline std::vector<double> rolling_standardize(std::span<const double> values, std::size_t window) {
    if (window < 2) fail(ErrorCode::Validation, "rolling window must be at least 2");
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t t = window - 1; t < values.size(); ++t) {
        const auto [mean, sd] = sample_mean_std(values.subspan(t + 1 - window, window));
        out[t] = sd > 0.0 ? (values[t] - mean) / sd : 0.0;
    }
    return out;
}

struct SpreadSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    double mean = 0.0;
    double std = 0.0;
    std::vector<double> zscores;
};

/// Spread value per date: sum_i hedge_i * price_{i,t}.
inline std::vector<double> spread_values(const PricePanel& panel, const Eigen::VectorXd& hedge_ratio) {
    if (static_cast<std::size_t>(hedge_ratio.size()) != panel.width())
        fail(ErrorCode::Validation, "hedge ratio length does not match panel width");
    std::vector<double> out(panel.length());
    const auto& p = panel.prices();
    for (Eigen::Index t = 0; t < p.rows(); ++t) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < p.cols(); ++i) s += hedge_ratio(i) * p(t, i);
        out[static_cast<std::size_t>(t)] = s;
    }
    return out;
}

inline SpreadSeries compute_spread(const PricePanel& panel, const Eigen::VectorXd& hedge_ratio) {
    if (panel.length() == 0) fail(ErrorCode::Validation, "empty panel");
    SpreadSeries out;
    out.dates = panel.dates();
    out.values = spread_values(panel, hedge_ratio);
    const auto [mean, sd] = sample_mean_std(out.values);
    if (!(sd > 0.0)) fail(ErrorCode::Degenerate, "spread is constant");
    out.mean = mean;
    out.std = sd;
    out.zscores.resize(out.values.size());
    for (std::size_t t = 0; t < out.values.size(); ++t) out.zscores[t] = (out.values[t] - mean) / sd;
    return out;
}

struct HalfLifeEstimate {
    double lambda = 0.0;
    double intercept = 0.0;
    /// -ln 2 / lambda, or +infinity when the spread does not mean-revert.
    double half_life_days = std::numeric_limits<double>::infinity();

    bool bounded() const noexcept { return std::isfinite(half_life_days); }
};

/// OLS of ds_t on (1, s_{t-1}); lambda is the slope.
inline HalfLifeEstimate estimate_half_life(std::span<const double> spread) {
    if (spread.size() < 30) fail(ErrorCode::Degenerate, "half-life estimation needs at least 30 observations");
    const auto n = static_cast<Eigen::Index>(spread.size() - 1);
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const auto i = static_cast<std::size_t>(t);
        x(t, 0) = 1.0;
        x(t, 1) = spread[i];
        y(t) = spread[i + 1] - spread[i];
    }
    const auto [lo, hi] = std::minmax_element(spread.begin(), spread.end());
    if (*lo == *hi) fail(ErrorCode::Degenerate, "half-life of a constant spread");
    const OlsFit fit = ols(x, y);

    HalfLifeEstimate out;
    out.intercept = fit.coefficients(0);
    out.lambda = fit.coefficients(1);
    if (out.lambda < 0.0) out.half_life_days = -std::log(2.0) / out.lambda;
    return out;
}

inline HalfLifeEstimate estimate_half_life(const SpreadSeries& spread) { return estimate_half_life(spread.values); }

}  // namespace pairs
