#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "pairs/fusion.hpp"
#include "pairs/market_data.hpp"
#include "pairs/pipeline.hpp"

namespace pairs::fixture {

inline constexpr std::uint64_t kDefaultSeed = 7;

/// Seven instruments over 2008-01..2014-06: five random walks plus two
/// cointegrated constructions (CI1 ~ 0.8 RW1 - 0.5 RW2, CI2 ~ 1.5 RW3).
inline PricePanel price_panel(std::uint64_t seed = kDefaultSeed) {
    SyntheticConfig c;
    c.length = 1690;
    c.random_walks = 5;
    c.noise_scale = 0.5;
    c.start_level = 100.0;
    c.recipes = {{{0.8, -0.5}, 0.6, ou_speed_for_half_life(8.0)}, {{0.0, 0.0, 1.5}, 0.8, ou_speed_for_half_life(12.0)}};
    return generate_synthetic_panel(seed, c);
}

/// Monthly indicator with quarter-point steps, so unchanged months occur.
inline MonthlySeries macro_series(std::uint64_t seed, YearMonth first, std::size_t months) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    MonthlySeries s;
    double level = 5.0, momentum = 0.0;
    for (std::size_t i = 0; i < months; ++i) {
        momentum = 0.6 * momentum + normal(rng);
        level += std::round(momentum * 2.0) / 4.0;
        s.months.push_back(first + std::chrono::months{static_cast<int>(i)});
        s.values.push_back(level);
    }
    return s;
}

/// Perfect-foresight directions: Down (buy) when the spread rises over the
/// month, Up (sell) otherwise.
inline MonthlyDirections oracle_directions(const std::vector<Date>& dates, std::span<const double> spread) {
    std::map<YearMonth, std::pair<double, double>> span_by_month;  // first, last spread
    for (std::size_t t = 0; t < dates.size(); ++t) {
        auto [it, inserted] = span_by_month.try_emplace(month_of(dates[t]), spread[t], spread[t]);
        if (!inserted) it->second.second = spread[t];
    }
    MonthlyDirections out;
    for (const auto& [m, fl] : span_by_month) out[m] = fl.second > fl.first ? Direction::Down : Direction::Up;
    return out;
}

inline MonthlyDirections noise_directions(std::uint64_t seed, YearMonth first, YearMonth last) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 2);
    MonthlyDirections out;
    for (YearMonth m = first; m <= last; m += std::chrono::months{1}) out[m] = kDirectionOrder[static_cast<std::size_t>(pick(rng))];
    return out;
}

inline std::string price_csv(const DatedSeries& s) {
    std::string out = "date,close\n";
    for (std::size_t t = 0; t < s.size(); ++t) out += format_date(s.dates[t]) + "," + format_real(s.values[t]) + "\n";
    return out;
}

inline std::string monthly_csv(const MonthlySeries& s) {
    std::string out = "month,value\n";
    for (std::size_t t = 0; t < s.size(); ++t) out += format_month(s.months[t]) + "," + format_real(s.values[t]) + "\n";
    return out;
}

/// Writes prices/, macro/, oracle/, costs.csv and fixture.conf under `dir`.
/// The traded subset is RW3,CI2; oracle/MACRO1.csv is the perfect-foresight
/// signal for that spread, MACRO2 and MACRO3 are random directions.
inline void write_fixture(const std::filesystem::path& dir, std::uint64_t seed = kDefaultSeed) {
    const PricePanel panel = price_panel(seed);
    ensure_directory(dir / "prices");
    ensure_directory(dir / "macro");
    ensure_directory(dir / "oracle");

    std::string conf =
        "# Synthetic seven-instrument fixture\n"
        "entry_z = 1.0\nexit_z = 0.0\nmin_subset_size = 2\nmax_subset_size = 4\n"
        "train_end = 2007-12\nseed = " + std::to_string(seed) + "\nsubset = RW3,CI2\nout = out\n";
    std::string costs = "instrument,cost\n";
    for (std::size_t j = 0; j < panel.width(); ++j) {
        const std::string& id = panel.ids()[j];
        csv::write_file(dir / "prices" / (id + ".csv"), price_csv(panel.column(j)));
        conf += "price." + id + " = prices/" + id + ".csv\n";
        costs += id + ",0.005\n";
    }
    csv::write_file(dir / "costs.csv", costs);

    const YearMonth first{std::chrono::year{1995}, std::chrono::January};
    const YearMonth last = month_of(panel.dates().back());
    const auto months = static_cast<std::size_t>((last - first).count()) + 1;
    for (int k = 1; k <= 3; ++k) {
        const std::string id = "MACRO" + std::to_string(k);
        csv::write_file(dir / "macro" / (id + ".csv"), monthly_csv(macro_series(seed * 100 + static_cast<std::uint64_t>(k), first, months)));
        conf += "macro." + id + " = macro/" + id + ".csv\n";
    }

    RunConfig rc;
    rc.subset = {"RW3", "CI2"};
    const auto columns = resolve_subset(rc, panel, nullptr);
    const auto mr = run_mean_reversion(rc, panel, columns, CostModel{});
    const YearMonth start = month_of(panel.dates().front());
    csv::write_file(dir / "oracle" / "MACRO1.csv",
                    format_direction_csv(oracle_directions(mr.panel.dates(), mr.portfolio.spread.values)));
    csv::write_file(dir / "oracle" / "MACRO2.csv", format_direction_csv(noise_directions(seed * 100 + 12, start, last)));
    csv::write_file(dir / "oracle" / "MACRO3.csv", format_direction_csv(noise_directions(seed * 100 + 13, start, last)));
    csv::write_file(dir / "fixture.conf", conf);
}

}  // namespace pairs::fixture
