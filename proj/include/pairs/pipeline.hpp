#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pairs/backtest.hpp"
#include "pairs/config.hpp"
#include "pairs/fusion.hpp"
#include "pairs/macro_signals.hpp"
#include "pairs/market_data.hpp"
#include "pairs/report.hpp"
#include "pairs/scan.hpp"

namespace pairs {

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
}

inline PricePanel load_panel(const RunConfig& config) {
    if (config.prices.size() < 2) fail(ErrorCode::Validation, "configure at least two price series");
    std::vector<NamedSeries> series;
    for (const auto& [id, path] : config.prices) series.push_back({id, load_price_csv(path)});
    return align_panel(series, {config.min_overlap});
}

inline ScanOptions scan_options(const RunConfig& config) {
    return {config.min_subset_size, config.max_subset_size, config.max_var_lag, config.johansen_case};
}

inline ScanReport run_scan(const RunConfig& config, const PricePanel& panel) {
    ScanReport report = scan_subsets(panel, scan_options(config));
    ensure_directory(config.out_dir);
    csv::write_file(config.out_dir / "scan.csv", format_scan_csv(report));
    std::string orders = "instrument,order\n";
    for (std::size_t j = 0; j < panel.width(); ++j) orders += panel.ids()[j] + "," + to_string(report.orders[j]) + "\n";
    csv::write_file(config.out_dir / "integration_orders.csv", orders);
    return report;
}

/// Columns named by config.subset, or a seeded random pick among the
/// cointegrated rows of `scan` when no subset is configured.
inline std::vector<std::size_t> resolve_subset(const RunConfig& config, const PricePanel& panel, const ScanReport* scan) {
    std::vector<std::size_t> cols;
    if (!config.subset.empty()) {
        for (const auto& id : config.subset) {
            const auto idx = panel.index_of(id);
            if (!idx) fail(ErrorCode::UnknownSubset, "unknown instrument '" + id + "' in subset");
            if (std::find(cols.begin(), cols.end(), *idx) != cols.end())
                fail(ErrorCode::UnknownSubset, "instrument '" + id + "' repeated in subset");
            cols.push_back(*idx);
        }
        if (cols.size() < 2 || cols.size() > 4) fail(ErrorCode::UnknownSubset, "a subset needs 2 to 4 instruments");
        return cols;
    }
    if (!scan) fail(ErrorCode::UnknownSubset, "no subset given");
    std::vector<const ScanRow*> candidates;
    for (const auto& row : scan->rows) {
        if (row.cointegrated()) candidates.push_back(&row);
    }
    if (candidates.empty()) fail(ErrorCode::NoCointegration, "the scan found no cointegrated subset");
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)]->columns;
}

struct MeanReversionRun {
    PricePanel panel;  // subset columns only
    JohansenOutcome outcome;
    CointegratedPortfolio portfolio;
    std::vector<double> zscores;  // trading z-scores (rolling when configured)
    std::vector<int> positions;
    BacktestReport report;
};

inline MeanReversionRun run_mean_reversion(const RunConfig& config, const PricePanel& panel,
                                           const std::vector<std::size_t>& columns, const CostModel& costs) {
    MeanReversionRun run;
    run.panel = panel.select(columns);
    const std::size_t lag =
        select_var_lag(run.panel, feasible_var_lag(run.panel.length(), run.panel.width(), config.max_var_lag));
    run.outcome = johansen_test(run.panel, lag, config.johansen_case);
    run.portfolio = build_portfolio(run.panel, run.outcome);
    run.zscores = config.zscore_window > 0 ? rolling_standardize(run.portfolio.spread.values, config.zscore_window)
                                           : run.portfolio.spread.zscores;
    run.positions = generate_mr_positions(run.zscores, config.entry_z, config.exit_z);
    run.report = compute_pnl(run.panel, run.portfolio.hedge_ratio, run.positions, costs);
    return run;
}

inline void write_backtest(const MeanReversionRun& run, const std::filesystem::path& out_dir) {
    ensure_directory(out_dir);
    SpreadSeries trading = run.portfolio.spread;
    trading.zscores = run.zscores;
    csv::write_file(out_dir / "spread_zscore.csv", format_spread_csv(trading));
    csv::write_file(out_dir / "backtest.csv", format_backtest_csv(run.report));
    csv::write_file(out_dir / "backtest_summary.csv", format_summary_csv(run.report));
    std::string meta = "subset,hedge_ratio,var_lag,vecm_lag,rank,top_eigenvalue,lambda,half_life_days\n";
    meta += join_ids(run.portfolio.subset) + "," + format_vector(run.portfolio.hedge_ratio) + "," +
            std::to_string(run.outcome.var_lag) + "," + std::to_string(run.outcome.vecm_lag) + "," +
            std::to_string(run.outcome.rank) + "," + format_real(run.outcome.eigenvalues(0)) + "," +
            format_real(run.portfolio.half_life.lambda) + "," + format_half_life(run.portfolio.half_life.half_life_days) + "\n";
    csv::write_file(out_dir / "portfolio.csv", meta);
    emit_plot_data(run.report, trading, run.portfolio.half_life.half_life_days, run.positions, out_dir);
}

/// Indicator ids in weight order.
inline std::vector<std::string> indicator_ids(const RunConfig& config) {
    std::vector<std::string> ids;
    for (const auto& [id, path] : config.macros) ids.push_back(id);
    for (const auto& [id, path] : config.oracles) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    }
    return ids;
}

struct ForecastRun {
    std::vector<std::string> ids;
    std::vector<MonthlyDirections> directions;
    std::vector<std::optional<IndicatorForecast>> forecasts;  // empty when an oracle file was used
};

/// Oracle files take precedence; otherwise the classifier is trained per indicator.
inline ForecastRun run_forecast(const RunConfig& config) {
    ForecastRun run;
    run.ids = indicator_ids(config);
    ensure_directory(config.out_dir);
    std::string summary = "indicator,source,train_rows,train_accuracy,test_months,test_accuracy\n";
    const YearMonth train_end = parse_month(config.train_end);
    for (const auto& id : run.ids) {
        if (const auto it = config.oracles.find(id); it != config.oracles.end()) {
            run.directions.push_back(load_direction_csv(it->second));
            run.forecasts.emplace_back();
            summary += id + ",oracle,,,,\n";
        } else {
            const auto macro = std::find_if(config.macros.begin(), config.macros.end(), [&](const auto& m) { return m.first == id; });
            const MonthlySeries series = load_monthly_csv(macro->second);
            ClassifierParams params;
            params.epochs = config.classifier_epochs;
            params.regularization = config.classifier_regularization;
            params.seed = config.seed;
            IndicatorForecast f = forecast_indicator(series, train_end, config.flat_epsilon, params);
            csv::write_file(config.out_dir / ("model_" + id + ".txt"), serialize_model(f.model));
            const auto train_rows = static_cast<std::size_t>(std::count_if(
                series.months.begin(), series.months.end(), [&](YearMonth m) { return m <= train_end; }));
            summary += id + ",classifier," + std::to_string(train_rows) + "," + format_real(f.model.training_accuracy) + "," +
                       std::to_string(f.evaluated) + "," + format_real(f.test_accuracy()) + "\n";
            run.directions.push_back(f.predicted);
            run.forecasts.push_back(std::move(f));
        }
        csv::write_file(config.out_dir / ("forecast_" + id + ".csv"), format_direction_csv(run.directions.back()));
    }
    csv::write_file(config.out_dir / "forecast_summary.csv", summary);
    return run;
}

struct OptimizeRun {
    MeanReversionRun mean_reversion;  // frictionless baseline
    ForecastRun forecasts;
    std::vector<SignalSeries> sources;  // macro indicators, then mean reversion
    OptimizationResult optimization;
    BacktestReport fused;  // optimized weights, transaction costs applied
};

inline OptimizationResult optimize_sources(const RunConfig& config, std::span<const SignalSeries> sources,
                                           const MeanReversionRun& mr) {
    OptimizerConfig oc;
    oc.grid_step = config.grid_step;
    oc.mean_reversion_floor = config.mean_reversion_floor;
    oc.simplex_iterations = config.optimizer_iterations;
    oc.restarts = config.optimizer_restarts;
    oc.seed = config.seed;
    return optimize_weights(sources, mr.panel, mr.portfolio.hedge_ratio, oc);
}

inline OptimizeRun run_optimize(const RunConfig& config, const PricePanel& panel, const std::vector<std::size_t>& columns) {
    OptimizeRun run;
    run.mean_reversion = run_mean_reversion(config, panel, columns, CostModel{});
    run.forecasts = run_forecast(config);
    for (const auto& d : run.forecasts.directions)
        run.sources.push_back(expand_monthly_to_daily(directions_to_signals(d), run.mean_reversion.panel.dates()));
    run.sources.push_back(positions_to_signals(run.mean_reversion.panel.dates(), run.mean_reversion.positions));

    run.optimization = optimize_sources(config, run.sources, run.mean_reversion);
    const auto fused_positions = signal_to_position(combine_signals(run.sources, run.optimization.weights));
    run.fused = compute_pnl(run.mean_reversion.panel, run.mean_reversion.portfolio.hedge_ratio, fused_positions,
                            CostModel{config.costs});

    ensure_directory(config.out_dir);
    csv::write_file(config.out_dir / "optimization_trace.csv", format_trace_csv(run.optimization));
    std::string summary;
    for (const auto& id : run.forecasts.ids) summary += id + ",";
    summary += "mean_reversion,apr\n";
    for (std::size_t k = 0; k + 1 < run.sources.size(); ++k) summary += "0,";
    summary += "1," + format_real(run.optimization.baseline_apr) + "\n";
    for (double w : run.optimization.weights.values()) summary += format_real(w) + ",";
    summary += format_real(run.optimization.apr) + "\n";
    csv::write_file(config.out_dir / "optimization_summary.csv", summary);
    csv::write_file(config.out_dir / "fused_backtest.csv", format_backtest_csv(run.fused));
    csv::write_file(config.out_dir / "fused_backtest_summary.csv", format_summary_csv(run.fused));
    return run;
}

/// Runs every stage and writes `manifest.txt`: config echo, config hash,
/// seed, headline metrics and a hash over the whole manifest body.
inline std::string run_report(const RunConfig& config) {
    const PricePanel panel = load_panel(config);
    const ScanReport scan = run_scan(config, panel);
    const auto columns = resolve_subset(config, panel, &scan);
    const MeanReversionRun mr = run_mean_reversion(config, panel, columns, CostModel{config.costs});
    write_backtest(mr, config.out_dir);

    std::string body = "manifest_version=1\n";
    const std::string echo = format_config(config);
    body += "seed=" + std::to_string(config.seed) + "\n";
    body += "config_hash=" + hex64(fnv1a(echo)) + "\n";
    std::size_t tested = 0, cointegrated = 0;
    for (const auto& row : scan.rows) {
        tested += row.outcome.has_value();
        cointegrated += row.cointegrated();
    }
    body += "scan.subsets=" + std::to_string(scan.rows.size()) + "\n";
    body += "scan.tested=" + std::to_string(tested) + "\n";
    body += "scan.cointegrated=" + std::to_string(cointegrated) + "\n";
    body += "backtest.subset=" + join_ids(mr.portfolio.subset) + "\n";
    body += "backtest.hedge_ratio=" + format_vector(mr.portfolio.hedge_ratio) + "\n";
    body += "backtest.half_life_days=" + format_half_life(mr.portfolio.half_life.half_life_days) + "\n";
    body += "backtest.apr=" + format_real(mr.report.apr) + "\n";
    body += "backtest.sharpe=" + format_optional_real(mr.report.sharpe) + "\n";
    body += "backtest.max_drawdown=" + format_real(mr.report.max_drawdown) + "\n";
    body += "backtest.total_cost=" + format_real(mr.report.total_transaction_cost) + "\n";

    if (!indicator_ids(config).empty()) {
        const OptimizeRun opt = run_optimize(config, panel, columns);
        for (std::size_t k = 0; k < opt.forecasts.ids.size(); ++k) {
            const auto& f = opt.forecasts.forecasts[k];
            body += "forecast." + opt.forecasts.ids[k] + ".test_accuracy=" + (f ? format_real(f->test_accuracy()) : "oracle") + "\n";
        }
        body += "optimize.baseline_apr=" + format_real(opt.optimization.baseline_apr) + "\n";
        body += "optimize.apr=" + format_real(opt.optimization.apr) + "\n";
        std::vector<std::string> w;
        for (double v : opt.optimization.weights.values()) w.push_back(format_real(v));
        body += "optimize.weights=" + csv::join(w, ";") + "\n";
        body += "fused.apr=" + format_real(opt.fused.apr) + "\n";
        body += "fused.sharpe=" + format_optional_real(opt.fused.sharpe) + "\n";
        body += "fused.max_drawdown=" + format_real(opt.fused.max_drawdown) + "\n";
        body += "fused.total_cost=" + format_real(opt.fused.total_transaction_cost) + "\n";
    }
    std::string cfg;
    std::size_t start = 0;
    while (start < echo.size()) {
        const auto end = echo.find('\n', start);
        cfg += "config." + echo.substr(start, end - start) + "\n";
        start = end + 1;
    }
    body += cfg;
    const std::string manifest = body + "manifest_hash=" + hex64(fnv1a(body)) + "\n";
    ensure_directory(config.out_dir);
    csv::write_file(config.out_dir / "manifest.txt", manifest);
    return manifest;
}

}  // namespace pairs
