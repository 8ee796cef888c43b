#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pairs/pairs.hpp"

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string subset;
    std::string out;
    std::string costs;
    std::vector<std::string> oracle_forecasts;
    std::size_t draws = 100000;
    std::size_t sample_size = 500;
    std::string johansen_case = "restricted_constant";
};

pairs::RunConfig resolve_config(const Options& o) {
    pairs::RunConfig c;
    if (!o.config_path.empty()) c = pairs::load_config(o.config_path);
    if (o.seed) c.seed = *o.seed;
    if (!o.subset.empty()) pairs::set_config_value(c, "subset", o.subset, ".");
    if (!o.out.empty()) c.out_dir = o.out;
    if (!o.costs.empty()) {
        for (const auto& [id, v] : pairs::load_cost_csv(o.costs)) c.costs[id] = v;
    }
    if (!o.oracle_forecasts.empty()) {
        const auto ids = pairs::indicator_ids(c);
        if (o.oracle_forecasts.size() > ids.size())
            pairs::fail(pairs::ErrorCode::Validation, "more --oracle-forecasts files than configured indicators");
        for (std::size_t k = 0; k < o.oracle_forecasts.size(); ++k) c.oracles[ids[k]] = o.oracle_forecasts[k];
    }
    pairs::validate_config(c);
    return c;
}

void print_summary(const char* label, const pairs::BacktestReport& r) {
    std::printf("%s apr=%.6f sharpe=%s max_drawdown=%.6f total_cost=%.6f\n", label, r.apr,
                pairs::format_optional_real(r.sharpe).c_str(), r.max_drawdown, r.total_transaction_cost);
}

int run(const std::string& command, const Options& o) {
    using namespace pairs;
    if (command == "verify-critical-values") {
        MonteCarloConfig mc;
        mc.draws = o.draws;
        mc.sample_size = o.sample_size;
        if (o.seed) mc.seed = *o.seed;
        RunConfig c;
        set_config_value(c, "johansen_case", o.johansen_case, ".");
        const auto checks = verify_critical_values(mc, c.johansen_case);
        const std::string text = format_critical_value_csv(checks, mc);
        if (!o.out.empty()) {
            ensure_directory(o.out);
            csv::write_file(std::filesystem::path(o.out) / "critical_values.csv", text);
        }
        std::cout << text;
        for (const auto& ch : checks) {
            if (!ch.within_tolerance()) return 3;
        }
        return 0;
    }

    if (o.config_path.empty()) fail(ErrorCode::Validation, "--config is required for '" + command + "'");
    const RunConfig config = resolve_config(o);

    if (command == "scan") {
        const auto panel = load_panel(config);
        const auto report = run_scan(config, panel);
        std::size_t cointegrated = 0;
        for (const auto& row : report.rows) cointegrated += row.cointegrated();
        std::printf("subsets=%zu cointegrated=%zu out=%s\n", report.rows.size(), cointegrated,
                    (config.out_dir / "scan.csv").string().c_str());
    } else if (command == "backtest") {
        const auto panel = load_panel(config);
        std::optional<ScanReport> scan;
        if (config.subset.empty()) scan = scan_subsets(panel, scan_options(config));
        const auto columns = resolve_subset(config, panel, scan ? &*scan : nullptr);
        const auto mr = run_mean_reversion(config, panel, columns, CostModel{config.costs});
        write_backtest(mr, config.out_dir);
        std::printf("subset=%s hedge_ratio=%s half_life_days=%s\n", join_ids(mr.portfolio.subset).c_str(),
                    format_vector(mr.portfolio.hedge_ratio).c_str(),
                    format_half_life(mr.portfolio.half_life.half_life_days).c_str());
        print_summary("backtest", mr.report);
    } else if (command == "forecast") {
        const auto run = run_forecast(config);
        for (std::size_t k = 0; k < run.ids.size(); ++k) {
            if (run.forecasts[k])
                std::printf("%s train_accuracy=%.4f test_accuracy=%.4f test_months=%zu\n", run.ids[k].c_str(),
                            run.forecasts[k]->model.training_accuracy, run.forecasts[k]->test_accuracy(),
                            run.forecasts[k]->evaluated);
            else
                std::printf("%s oracle months=%zu\n", run.ids[k].c_str(), run.directions[k].size());
        }
    } else if (command == "optimize") {
        const auto panel = load_panel(config);
        std::optional<ScanReport> scan;
        if (config.subset.empty()) scan = scan_subsets(panel, scan_options(config));
        const auto columns = resolve_subset(config, panel, scan ? &*scan : nullptr);
        const auto run = run_optimize(config, panel, columns);
        std::printf("baseline_apr=%.6f optimized_apr=%.6f weights=", run.optimization.baseline_apr, run.optimization.apr);
        for (std::size_t k = 0; k < run.optimization.weights.size(); ++k)
            std::printf("%s%.6g", k ? "," : "", run.optimization.weights[k]);
        std::printf(" probes=%zu\n", run.optimization.trace.size());
        print_summary("fused_with_costs", run.fused);
    } else if (command == "report") {
        std::cout << run_report(config);
    } else {
        fail(ErrorCode::Validation, "unknown command '" + command + "'");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cointegration pairs-trading research pipeline"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"scan", "Johansen scan over every instrument subset"},
        {"backtest", "Mean-reversion backtest of one subset"},
        {"forecast", "Monthly direction forecasts per macro indicator"},
        {"optimize", "Optimize signal fusion weights against APR"},
        {"report", "Run every stage and write a manifest"},
        {"verify-critical-values", "Monte Carlo check of embedded critical values"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config_path, "Flat key=value config file");
        sub->add_option("--seed", seed, "Random seed")->each([&](const std::string&) { o.seed = seed; });
        sub->add_option("--subset", o.subset, "Comma-separated instrument ids");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--costs", o.costs, "instrument,cost CSV");
        sub->add_option("--oracle-forecasts", o.oracle_forecasts, "month,direction CSV per indicator, in indicator order")
            ->allow_extra_args(false);
        if (name == "verify-critical-values") {
            sub->add_option("--draws", o.draws, "Monte Carlo draws")->default_val(100000);
            sub->add_option("--sample-size", o.sample_size, "Simulated series length")->default_val(500);
            sub->add_option("--johansen-case", o.johansen_case, "restricted_constant or unrestricted_constant");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERR:validation:" << e.what() << "\n";
        return 2;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), o);
    } catch (const pairs::Error& e) {
        std::cerr << "ERR:" << pairs::to_string(e.code()) << ":" << e.what() << "\n";
        return pairs::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "ERR:internal:" << e.what() << "\n";
        return 1;
    }
}
