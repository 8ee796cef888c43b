#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/market_data.hpp"
#include "pairs/spread.hpp"

namespace pairs {

inline constexpr double kTradingDaysPerYear = 252.0;

/// Units of the spread portfolio held per date: +1 long, -1 short, 0 flat.
struct PositionSeries {
    std::vector<Date> dates;
    std::vector<int> position;
};

/// Mean-reversion state machine. Starting flat, exits are evaluated before
/// entries on each date, so a long can flip to short within one step.
inline std::vector<int> generate_mr_positions(std::span<const double> zscores, double entry, double exit) {
    if (!(exit < entry)) fail(ErrorCode::Validation, "exit z-score must be below the entry z-score");
    if (!(entry > 0.0)) fail(ErrorCode::Validation, "entry z-score must be positive");
    std::vector<int> out(zscores.size(), 0);
    int state = 0;
    for (std::size_t t = 0; t < zscores.size(); ++t) {
        const double z = zscores[t];
        if (state == 1 && z > -exit) state = 0;
        if (state == -1 && z < exit) state = 0;
        if (state == 0) {
            if (z < -entry) {
                state = 1;
            } else if (z > entry) {
                state = -1;
            }
        }
        out[t] = state;
    }
    return out;
}

/// Per-unit transaction cost by instrument id (quote currency per unit traded).
struct CostModel {
    std::map<std::string, double> per_unit_cost;

    /// Cost vector in panel column order; instruments without an entry cost 0.
    Eigen::VectorXd aligned(const std::vector<std::string>& ids) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ids.size()));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto it = per_unit_cost.find(ids[i]);
            if (it == per_unit_cost.end()) continue;
            if (!(it->second >= 0.0) || !std::isfinite(it->second))
                fail(ErrorCode::Validation, "transaction cost for " + ids[i] + " must be non-negative");
            out(static_cast<Eigen::Index>(i)) = it->second;
        }
        return out;
    }
};

struct PerformanceMetrics {
    double apr = 0.0;
    std::optional<double> sharpe;  // empty when returns have zero variance
    double max_drawdown = 0.0;
};

/// Compounded equity path E_t = prod_{u<=t} (1 + r_u).
inline std::vector<double> equity_curve(std::span<const double> returns) {
    std::vector<double> out(returns.size());
    double e = 1.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        e *= 1.0 + returns[t];
        out[t] = e;
    }
    return out;
}

/// min_t (E_t / max_{u<=t} E_u - 1) over the given path; always <= 0.
inline double max_drawdown(std::span<const double> equity) {
    double peak = -std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (double e : equity) {
        if (e > peak) peak = e;
        if (peak > 0.0) worst = std::min(worst, e / peak - 1.0);
    }
    return worst;
}

inline double annualized_return(std::span<const double> returns) {
    if (returns.empty()) fail(ErrorCode::Degenerate, "APR of an empty return series");
    double growth = 1.0;
    for (double r : returns) growth *= 1.0 + r;
    if (growth <= 0.0) return -1.0;
    return std::pow(growth, kTradingDaysPerYear / static_cast<double>(returns.size())) - 1.0;
}

/// Exact test; a computed std of identical values can be a rounding residue.
inline bool has_return_variance(std::span<const double> returns) {
    if (returns.size() < 2) return false;
    const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
    return *lo != *hi;
}

/// sqrt(252) * mean / sample std, zero risk-free rate.
inline double sharpe_ratio(std::span<const double> returns) {
    const auto [mean, sd] = sample_mean_std(returns);
    if (!has_return_variance(returns) || !(sd > 0.0)) fail(ErrorCode::Degenerate, "Sharpe ratio undefined for zero-variance returns");
    return std::sqrt(kTradingDaysPerYear) * mean / sd;
}

/// APR, Sharpe and max drawdown. The drawdown path starts from the initial
/// unit of capital, so a loss on the first day counts as a drawdown.
inline PerformanceMetrics compute_metrics(std::span<const double> returns) {
    if (returns.size() < 2) fail(ErrorCode::Degenerate, "metrics need at least two returns");
    PerformanceMetrics m;
    m.apr = annualized_return(returns);
    const auto [mean, sd] = sample_mean_std(returns);
    if (has_return_variance(returns) && sd > 0.0) m.sharpe = std::sqrt(kTradingDaysPerYear) * mean / sd;
    std::vector<double> path{1.0};
    const auto eq = equity_curve(returns);
    path.insert(path.end(), eq.begin(), eq.end());
    m.max_drawdown = max_drawdown(path);
    return m;
}

struct BacktestReport {
    std::vector<Date> dates;
    std::vector<int> positions;
    std::vector<double> gross_pnl;
    std::vector<double> transaction_costs;
    std::vector<double> daily_returns;
    std::vector<double> cumulative_returns;
    double apr = 0.0;
    std::optional<double> sharpe;
    double max_drawdown = 0.0;
    double total_transaction_cost = 0.0;
};

/// P&L of holding `positions` units of the hedge-ratio portfolio.
///   pnl_t  = pos_{t-1} * (spread_t - spread_{t-1})
///   cost_t = |pos_t - pos_{t-1}| * sum_i |h_i| cost_i   (pos_{-1} = 0)
///   r_t    = (pnl_t - cost_t) / GMV_{t-1},  GMV = sum_i |h_i| p_i
/// On the first date GMV_0 is the denominator.
inline BacktestReport compute_pnl(const PricePanel& panel, const Eigen::VectorXd& hedge_ratio,
                                  std::span<const int> positions, const CostModel& costs) {
    if (positions.size() != panel.length()) fail(ErrorCode::Validation, "positions are not aligned with the panel");
    if (static_cast<std::size_t>(hedge_ratio.size()) != panel.width())
        fail(ErrorCode::Validation, "hedge ratio length does not match panel width");
    for (int p : positions) {
        if (p < -1 || p > 1) fail(ErrorCode::Validation, "positions must lie in {-1, 0, +1}");
    }

    const Eigen::VectorXd abs_h = hedge_ratio.cwiseAbs();
    const double unit_cost = abs_h.dot(costs.aligned(panel.ids()));
    const std::vector<double> spread = spread_values(panel, hedge_ratio);
    const Eigen::VectorXd gmv = panel.prices() * abs_h;

    BacktestReport r;
    r.dates = panel.dates();
    r.positions.assign(positions.begin(), positions.end());
    const std::size_t T = panel.length();
    r.gross_pnl.assign(T, 0.0);
    r.transaction_costs.assign(T, 0.0);
    r.daily_returns.assign(T, 0.0);
    r.cumulative_returns.assign(T, 0.0);

    int prev = 0;
    double equity = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double pnl = t > 0 ? prev * (spread[t] - spread[t - 1]) : 0.0;
        const double cost = std::abs(positions[t] - prev) * unit_cost;
        const double capital = gmv(static_cast<Eigen::Index>(t > 0 ? t - 1 : 0));
        if (!(capital > 0.0)) fail(ErrorCode::Degenerate, "gross market value is zero");
        r.gross_pnl[t] = pnl;
        r.transaction_costs[t] = cost;
        r.daily_returns[t] = (pnl - cost) / capital;
        equity *= 1.0 + r.daily_returns[t];
        r.cumulative_returns[t] = equity - 1.0;
        r.total_transaction_cost += cost;
        prev = positions[t];
    }

    const PerformanceMetrics m = compute_metrics(r.daily_returns);
    r.apr = m.apr;
    r.sharpe = m.sharpe;
    r.max_drawdown = m.max_drawdown;
    return r;
}

}  // namespace pairs
