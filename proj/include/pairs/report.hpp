#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pairs/backtest.hpp"
#include "pairs/csv.hpp"
#include "pairs/spread.hpp"

namespace pairs {

inline std::string format_optional_real(const std::optional<double>& v) { return v ? format_real(*v) : "nan"; }

/// `date,position,daily_return,cumulative_return`
inline std::string format_backtest_csv(const BacktestReport& r) {
    std::string out = "date,position,daily_return,cumulative_return\n";
    for (std::size_t t = 0; t < r.dates.size(); ++t)
        out += format_date(r.dates[t]) + "," + std::to_string(r.positions[t]) + "," + format_real(r.daily_returns[t]) +
               "," + format_real(r.cumulative_returns[t]) + "\n";
    return out;
}

/// `apr,sharpe,max_drawdown,total_cost`; an undefined Sharpe prints as nan.
inline std::string format_summary_csv(const BacktestReport& r) {
    return "apr,sharpe,max_drawdown,total_cost\n" + format_real(r.apr) + "," + format_optional_real(r.sharpe) + "," +
           format_real(r.max_drawdown) + "," + format_real(r.total_transaction_cost) + "\n";
}

/// `date,spread,zscore`
inline std::string format_spread_csv(const SpreadSeries& s) {
    std::string out = "date,spread,zscore\n";
    for (std::size_t t = 0; t < s.dates.size(); ++t)
        out += format_date(s.dates[t]) + "," + format_real(s.values[t]) + "," + format_real(s.zscores[t]) + "\n";
    return out;
}

struct ChartSeries {
    std::string label;
    std::vector<double> values;
    std::string color;
};

/// Minimal standalone SVG line chart; non-finite points are skipped.
inline std::string render_line_chart_svg(const std::string& title, const std::vector<ChartSeries>& series) {
    constexpr double width = 900.0, height = 320.0, left = 70.0, right = 20.0, top = 36.0, bottom = 30.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t points = 0;
    for (const auto& s : series) {
        points = std::max(points, s.values.size());
        for (double v : s.values) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi == lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double plot_w = width - left - right, plot_h = height - top - bottom;
    auto x_of = [&](std::size_t i) { return left + (points > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(points - 1) : 0.0); };
    auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };
    char buf[256];

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"320\" viewBox=\"0 0 900 320\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">", left);
    svg += buf + title + "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#999\"/>\n", left, top, plot_w, plot_h);
    svg += buf;
    for (double v : {lo, hi}) {
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                      left - 6, y_of(v) + 4, v);
        svg += buf;
    }
    if (lo < 0.0 && hi > 0.0) {
        std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ccc\"/>\n", left, y_of(0.0),
                      left + plot_w, y_of(0.0));
        svg += buf;
    }
    double legend_x = left + plot_w;
    for (auto it = series.rbegin(); it != series.rend(); ++it) {
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%g\" y=\"22\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"%s\">",
                      legend_x, it->color.c_str());
        svg += buf + it->label + "</text>\n";
        legend_x -= 9.0 * static_cast<double>(it->label.size()) + 16.0;
    }
    for (const auto& s : series) {
        svg += "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" + s.color + "\" points=\"";
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (!std::isfinite(s.values[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x_of(i), y_of(s.values[i]));
            svg += buf;
        }
        svg += "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

/// Writes spread.csv, zscore_positions.csv and returns.csv plus an SVG chart
/// for each. An empty position series is written as all-flat.
inline void emit_plot_data(const BacktestReport& report, const SpreadSeries& spread, double half_life_days,
                           std::span<const int> positions, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create '" + out_dir.string() + "': " + ec.message());
    const std::size_t T = spread.dates.size();
    if (report.daily_returns.size() != T || (!positions.empty() && positions.size() != T))
        fail(ErrorCode::Validation, "plot series are not aligned");

    const std::string hl = std::isfinite(half_life_days) ? format_real(half_life_days) : "inf";
    std::string spread_csv = "date,spread,half_life_days\n";
    std::string z_csv = "date,zscore,position\n";
    std::string ret_csv = "date,daily_return,cumulative_return\n";
    std::vector<double> pos_values(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const int p = positions.empty() ? 0 : positions[t];
        pos_values[t] = p;
        const std::string d = format_date(spread.dates[t]);
        spread_csv += d + "," + format_real(spread.values[t]) + "," + hl + "\n";
        z_csv += d + "," + format_real(spread.zscores[t]) + "," + std::to_string(p) + "\n";
        ret_csv += d + "," + format_real(report.daily_returns[t]) + "," + format_real(report.cumulative_returns[t]) + "\n";
    }
    csv::write_file(out_dir / "spread.csv", spread_csv);
    csv::write_file(out_dir / "zscore_positions.csv", z_csv);
    csv::write_file(out_dir / "returns.csv", ret_csv);

    char title[128];
    std::snprintf(title, sizeof title, "Spread (half-life %s days)", hl.c_str());
    csv::write_file(out_dir / "spread.svg", render_line_chart_svg(title, {{"spread", spread.values, "#1f77b4"}}));
    csv::write_file(out_dir / "zscore_positions.svg",
                    render_line_chart_svg("Standardized spread and position",
                                          {{"zscore", spread.zscores, "#1f77b4"}, {"position", pos_values, "#d62728"}}));
    csv::write_file(out_dir / "returns.svg",
                    render_line_chart_svg("Daily and cumulative returns", {{"daily", report.daily_returns, "#7f7f7f"},
                                                                          {"cumulative", report.cumulative_returns, "#2ca02c"}}));
}

}  // namespace pairs
