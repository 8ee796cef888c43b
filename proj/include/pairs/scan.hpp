#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "pairs/cointegration.hpp"
#include "pairs/csv.hpp"
#include "pairs/market_data.hpp"
#include "pairs/parallel.hpp"
#include "pairs/spread.hpp"
#include "pairs/unit_root.hpp"

namespace pairs {

/// A tradeable cointegrated subset: top-eigenvector hedge ratio and its spread.
struct CointegratedPortfolio {
    std::vector<std::string> subset;
    Eigen::VectorXd hedge_ratio;
    SpreadSeries spread;
    HalfLifeEstimate half_life;
};

inline CointegratedPortfolio build_portfolio(const PricePanel& subset_panel, const JohansenOutcome& outcome) {
    CointegratedPortfolio p;
    p.subset = subset_panel.ids();
    p.hedge_ratio = extract_hedge_ratio(outcome);
    p.spread = compute_spread(subset_panel, p.hedge_ratio);
    p.half_life = estimate_half_life(p.spread);
    return p;
}

struct ScanOptions {
    std::size_t min_size = 2;
    std::size_t max_size = 4;
    std::size_t max_var_lag = 8;
    DeterministicCase deterministic = DeterministicCase::RestrictedConstant;
};

struct ScanRow {
    std::vector<std::size_t> columns;
    std::vector<std::string> subset;
    std::string skipped_reason;  // empty when the subset was tested
    std::optional<JohansenOutcome> outcome;
    std::optional<CointegratedPortfolio> portfolio;

    bool cointegrated() const { return portfolio.has_value(); }
};

struct ScanReport {
    std::vector<IntegrationOrder> orders;  // per panel column
    std::vector<ScanRow> rows;             // enumeration order
};

/// Largest admissible VAR lag for a sample of `length` rows and `width` series.
inline std::size_t feasible_var_lag(std::size_t length, std::size_t width, std::size_t requested) {
    if (length < width + 30) fail(ErrorCode::Validation, "sample too short for any VAR lag");
    return std::max<std::size_t>(1, std::min(requested, (length - 30) / width));
}

/// Tests one subset; I(1) gating is the caller's responsibility.
inline ScanRow test_subset(const PricePanel& panel, const std::vector<std::size_t>& columns, const ScanOptions& options) {
    ScanRow row;
    row.columns = columns;
    const PricePanel sub = panel.select(columns);
    row.subset = sub.ids();
    try {
        const std::size_t lag = select_var_lag(sub, feasible_var_lag(sub.length(), sub.width(), options.max_var_lag));
        row.outcome = johansen_test(sub, lag, options.deterministic);
        if (row.outcome->rank >= 1) row.portfolio = build_portfolio(sub, *row.outcome);
    } catch (const Error& e) {
        row.skipped_reason = std::string(to_string(e.code())) + ": " + e.what();
    }
    return row;
}

/// Classifies every instrument, then runs the Johansen test on every subset
/// whose members are all I(1). Subsets run in parallel; rows keep enumeration order.
inline ScanReport scan_subsets(const PricePanel& panel, const ScanOptions& options = {}) {
    ScanReport report;
    report.orders.resize(panel.width());
    parallel_for(panel.width(), [&](std::size_t j) {
        report.orders[j] = classify_integration_order(panel.column(j).values);
    });

    const auto subsets = enumerate_combinations(panel.width(), options.min_size, options.max_size);
    report.rows.resize(subsets.size());
    parallel_for(subsets.size(), [&](std::size_t i) {
        bool all_i1 = true;
        for (std::size_t c : subsets[i]) all_i1 = all_i1 && report.orders[c] == IntegrationOrder::I1;
        if (all_i1) {
            report.rows[i] = test_subset(panel, subsets[i], options);
        } else {
            ScanRow row;
            row.columns = subsets[i];
            for (std::size_t c : subsets[i]) row.subset.push_back(panel.ids()[c]);
            row.skipped_reason = "not all I(1)";
            report.rows[i] = std::move(row);
        }
    });
    return report;
}

inline std::string join_ids(const std::vector<std::string>& ids) { return csv::join(ids, ";"); }

inline std::string format_vector(const Eigen::VectorXd& v) {
    std::vector<std::string> parts;
    for (Eigen::Index i = 0; i < v.size(); ++i) parts.push_back(format_real(v(i)));
    return csv::join(parts, ";");
}

inline std::string format_half_life(double h) { return std::isfinite(h) ? format_real(h) : "inf"; }

/// `subset,skipped_reason,rank,top_eigenvalue,hedge_ratio,half_life_days`;
/// list-valued fields are `;`-separated.
inline std::string format_scan_csv(const ScanReport& report) {
    std::string out = "subset,skipped_reason,rank,top_eigenvalue,hedge_ratio,half_life_days\n";
    for (const auto& row : report.rows) {
        std::string reason = row.skipped_reason;
        for (char& ch : reason) {
            if (ch == ',' || ch == '\n') ch = ' ';
        }
        out += join_ids(row.subset) + "," + reason + ",";
        if (row.outcome) {
            out += std::to_string(row.outcome->rank) + "," + format_real(row.outcome->eigenvalues(0));
        } else {
            out += ",";
        }
        out += ",";
        if (row.portfolio) out += format_vector(row.portfolio->hedge_ratio) + "," + format_half_life(row.portfolio->half_life.half_life_days);
        else out += ",";
        out += "\n";
    }
    return out;
}

}  // namespace pairs
