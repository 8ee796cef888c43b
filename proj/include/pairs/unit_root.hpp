#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/regression.hpp"

namespace pairs {

/// floor(12 * (T/100)^(1/4)), the customary upper bound on ADF lag length.
inline std::size_t schwert_max_lag(std::size_t sample_size) {
    const double raw = 12.0 * std::pow(static_cast<double>(sample_size) / 100.0, 0.25);
    return static_cast<std::size_t>(std::floor(raw + 1e-9));
}

/// Dickey-Fuller critical values for the constant, no-trend regression.
struct DickeyFullerCriticalValues {
    double pct1;
    double pct5;
    double pct10;
};

namespace detail {

struct DfTableRow {
    double sample_size;  // infinity for the asymptotic row
    DickeyFullerCriticalValues values;
};

// Fuller (1976) tau_mu quantiles.
inline constexpr std::array<DfTableRow, 6> kDfConstantTable{{
    {25.0, {-3.75, -3.00, -2.63}},
    {50.0, {-3.58, -2.93, -2.60}},
    {100.0, {-3.51, -2.89, -2.58}},
    {250.0, {-3.46, -2.88, -2.57}},
    {500.0, {-3.44, -2.87, -2.57}},
    {std::numeric_limits<double>::infinity(), {-3.43, -2.86, -2.57}},
}};

}  // namespace detail

/// Table lookup interpolated linearly in 1/T; sizes below 25 use the T=25 row.
inline DickeyFullerCriticalValues df_critical_values(std::size_t sample_size) {
    const auto& table = detail::kDfConstantTable;
    const double inv = 1.0 / std::max<double>(static_cast<double>(sample_size), table.front().sample_size);
    for (std::size_t i = 1; i < table.size(); ++i) {
        const double inv_hi = 1.0 / table[i - 1].sample_size;
        const double inv_lo = 1.0 / table[i].sample_size;  // 0 for the asymptotic row
        if (inv >= inv_lo) {
            const double w = inv_hi == inv_lo ? 0.0 : (inv - inv_lo) / (inv_hi - inv_lo);
            const auto& a = table[i - 1].values;
            const auto& b = table[i].values;
            return {w * a.pct1 + (1 - w) * b.pct1, w * a.pct5 + (1 - w) * b.pct5,
                    w * a.pct10 + (1 - w) * b.pct10};
        }
    }
    return table.back().values;
}

struct AdfOutcome {
    double statistic = 0.0;
    std::size_t chosen_lag = 0;
    std::size_t max_lag = 0;
    double critical_value_95 = 0.0;
    DickeyFullerCriticalValues critical_values{};
    bool reject_unit_root = false;
    double intercept = 0.0;
    double level_coefficient = 0.0;
    std::vector<double> lag_coefficients;
    double bic = 0.0;
    std::size_t observations = 0;
};

enum class IntegrationOrder { I0, I1, I2plus };

inline const char* to_string(IntegrationOrder order) {
    switch (order) {
        case IntegrationOrder::I0: return "I(0)";
        case IntegrationOrder::I1: return "I(1)";
        case IntegrationOrder::I2plus: return "I(2+)";
    }
    return "?";
}

/// Augmented Dickey-Fuller test with drift and no trend:
///   dy_t = a + b*y_{t-1} + sum_{i=1..p} g_i*dy_{t-i} + e_t
/// Every candidate p in [0, max_lag] is fitted on the same trimmed sample so
/// that BIC = n ln(RSS/n) + (p+2) ln n is comparable across lags.
inline AdfOutcome adf_test(std::span<const double> series, std::optional<std::size_t> max_lag = std::nullopt) {
    const std::size_t T = series.size();
    const std::size_t L = max_lag.value_or(schwert_max_lag(T));
    if (T < L + 10) fail(ErrorCode::Degenerate, "series too short for the requested ADF lag order");

    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (*lo == *hi) fail(ErrorCode::Degenerate, "ADF on a constant series");

    std::vector<double> dy(T - 1);
    for (std::size_t t = 1; t < T; ++t) dy[t - 1] = series[t] - series[t - 1];

    // dy index i runs over [L, T-2]; its lagged level is series[i].
    const auto n = static_cast<Eigen::Index>(T - 1 - L);
    Eigen::VectorXd response(n);
    Eigen::MatrixXd full(n, static_cast<Eigen::Index>(L + 2));
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t i = L + static_cast<std::size_t>(r);
        response(r) = dy[i];
        full(r, 0) = 1.0;
        full(r, 1) = series[i];
        for (std::size_t j = 1; j <= L; ++j) full(r, static_cast<Eigen::Index>(j + 1)) = dy[i - j];
    }

    const double log_n = std::log(static_cast<double>(n));
    std::optional<OlsFit> best;
    std::size_t best_lag = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= L; ++p) {
        OlsFit fit = ols(full.leftCols(static_cast<Eigen::Index>(p + 2)), response);
        if (!(fit.rss > 0.0)) fail(ErrorCode::Degenerate, "ADF regression has a perfect fit");
        const double bic = static_cast<double>(n) * std::log(fit.rss / static_cast<double>(n)) +
                           static_cast<double>(p + 2) * log_n;
        if (bic < best_bic) {
            best_bic = bic;
            best_lag = p;
            best = std::move(fit);
        }
    }

    AdfOutcome out;
    out.chosen_lag = best_lag;
    out.max_lag = L;
    out.bic = best_bic;
    out.observations = static_cast<std::size_t>(n);
    out.intercept = best->coefficients(0);
    out.level_coefficient = best->coefficients(1);
    for (std::size_t j = 0; j < best_lag; ++j)
        out.lag_coefficients.push_back(best->coefficients(static_cast<Eigen::Index>(j + 2)));
    out.statistic = best->coefficients(1) / best->standard_errors(1);
    out.critical_values = df_critical_values(T);
    out.critical_value_95 = out.critical_values.pct5;
    out.reject_unit_root = out.statistic < out.critical_value_95;
    return out;
}

/// I0 when levels reject a unit root, I1 when only the differences do, I2plus otherwise.
inline IntegrationOrder classify_integration_order(std::span<const double> series) {
    if (adf_test(series).reject_unit_root) return IntegrationOrder::I0;
    if (series.size() < 2) fail(ErrorCode::Degenerate, "series too short to difference");
    std::vector<double> diffs(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t) diffs[t - 1] = series[t] - series[t - 1];
    if (adf_test(diffs).reject_unit_root) return IntegrationOrder::I1;
    return IntegrationOrder::I2plus;
}

}  // namespace pairs
