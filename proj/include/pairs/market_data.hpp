#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pairs/csv.hpp"
#include "pairs/error.hpp"
#include "pairs/series.hpp"

namespace pairs {

/// Date-aligned close prices. Rows are dates, columns are instruments.
class PricePanel {
public:
    PricePanel() = default;

    PricePanel(std::vector<Date> dates, Eigen::MatrixXd prices, std::vector<std::string> ids)
        : dates_(std::move(dates)), prices_(std::move(prices)), ids_(std::move(ids)) {
        if (static_cast<std::size_t>(prices_.rows()) != dates_.size())
            fail(ErrorCode::Validation, "price rows do not match date count");
        if (static_cast<std::size_t>(prices_.cols()) != ids_.size())
            fail(ErrorCode::Validation, "price columns do not match instrument count");
        for (std::size_t t = 1; t < dates_.size(); ++t) {
            if (!(dates_[t - 1] < dates_[t]))
                fail(ErrorCode::Validation, "panel dates must be strictly ascending");
        }
        for (Eigen::Index j = 0; j < prices_.cols(); ++j) {
            for (Eigen::Index t = 0; t < prices_.rows(); ++t) {
                const double p = prices_(t, j);
                if (!std::isfinite(p) || p <= 0.0)
                    fail(ErrorCode::Validation, "non-positive or non-finite price for " + ids_[j] +
                                                    " at " + format_date(dates_[t]));
            }
        }
    }

    const std::vector<Date>& dates() const noexcept { return dates_; }
    const Eigen::MatrixXd& prices() const noexcept { return prices_; }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

    std::size_t length() const noexcept { return dates_.size(); }
    std::size_t width() const noexcept { return ids_.size(); }

    DatedSeries column(std::size_t j) const {
        DatedSeries s;
        s.dates = dates_;
        s.values.assign(prices_.col(static_cast<Eigen::Index>(j)).data(),
                        prices_.col(static_cast<Eigen::Index>(j)).data() + prices_.rows());
        return s;
    }

    PricePanel select(const std::vector<std::size_t>& columns) const {
        Eigen::MatrixXd sub(prices_.rows(), static_cast<Eigen::Index>(columns.size()));
        std::vector<std::string> ids;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            if (columns[k] >= width()) fail(ErrorCode::Validation, "column index out of range");
            sub.col(static_cast<Eigen::Index>(k)) = prices_.col(static_cast<Eigen::Index>(columns[k]));
            ids.push_back(ids_[columns[k]]);
        }
        return PricePanel(dates_, std::move(sub), std::move(ids));
    }

    std::optional<std::size_t> index_of(const std::string& id) const {
        const auto it = std::find(ids_.begin(), ids_.end(), id);
        if (it == ids_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - ids_.begin());
    }

private:
    std::vector<Date> dates_;
    Eigen::MatrixXd prices_;
    std::vector<std::string> ids_;
};

struct NamedSeries {
    std::string id;
    DatedSeries series;
};

namespace detail {

inline void reject_duplicates(const std::vector<std::pair<Date, std::size_t>>& rows,
                              const std::string& source) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first == rows[i - 1].first)
            fail(ErrorCode::Validation, source + ": duplicate date " + format_date(rows[i].first) +
                                            " at line " + std::to_string(rows[i].second));
    }
}

}  // namespace detail

/// Reads a `date,close` CSV. Rows may appear in any order; output is sorted.
inline DatedSeries load_price_csv(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    const std::string source = path.string();
    if (lines.empty() || csv::split(lines.front()) != std::vector<std::string>{"date", "close"})
        fail(ErrorCode::Parse, source + ": line 1: expected header 'date,close'");

    struct Row {
        Date date;
        double close;
        std::size_t line;
    };
    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (csv::trim(lines[i]).empty()) continue;
        const auto fields = csv::split(lines[i]);
        Date date;
        double close = 0.0;
        if (fields.size() != 2 || !try_parse_date(fields[0], date) ||
            !csv::try_parse_double(fields[1], close))
            fail(ErrorCode::Parse, source + ": line " + std::to_string(line_no) + ": malformed row '" +
                                       lines[i] + "'");
        if (!std::isfinite(close) || close <= 0.0)
            fail(ErrorCode::Validation, source + ": line " + std::to_string(line_no) +
                                            ": close must be positive, got " + fields[1]);
        rows.push_back({date, close, line_no});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });

    std::vector<std::pair<Date, std::size_t>> keys;
    for (const auto& r : rows) keys.emplace_back(r.date, r.line);
    detail::reject_duplicates(keys, source);

    DatedSeries out;
    for (const auto& r : rows) {
        out.dates.push_back(r.date);
        out.values.push_back(r.close);
    }
    return out;
}

/// Reads a `month,value` CSV of contiguous months.
inline MonthlySeries load_monthly_csv(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    const std::string source = path.string();
    if (lines.empty() || csv::split(lines.front()) != std::vector<std::string>{"month", "value"})
        fail(ErrorCode::Parse, source + ": line 1: expected header 'month,value'");

    std::vector<std::pair<YearMonth, double>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        const auto fields = csv::split(lines[i]);
        YearMonth ym;
        double v = 0.0;
        if (fields.size() != 2 || !try_parse_month(fields[0], ym) || !csv::try_parse_double(fields[1], v) ||
            !std::isfinite(v))
            fail(ErrorCode::Parse, source + ": line " + std::to_string(i + 1) + ": malformed row '" +
                                       lines[i] + "'");
        rows.emplace_back(ym, v);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    MonthlySeries out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first != rows[i - 1].first + std::chrono::months{1})
            fail(ErrorCode::Validation, source + ": months must be contiguous and unique near " +
                                            format_month(rows[i].first));
        out.months.push_back(rows[i].first);
        out.values.push_back(rows[i].second);
    }
    return out;
}

struct AlignOptions {
    std::size_t min_overlap = 30;
};

/// Inner-joins the series on their common dates. Column order follows input order.
inline PricePanel align_panel(const std::vector<NamedSeries>& series, AlignOptions options = {}) {
    if (series.size() < 2) fail(ErrorCode::Validation, "align_panel needs at least two series");
    for (const auto& s : series) {
        if (s.series.empty()) fail(ErrorCode::Validation, "series '" + s.id + "' is empty");
    }

    std::vector<Date> common = series.front().series.dates;
    for (std::size_t k = 1; k < series.size(); ++k) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), series[k].series.dates.begin(),
                              series[k].series.dates.end(), std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty() || common.size() < options.min_overlap)
        fail(ErrorCode::InsufficientOverlap, "only " + std::to_string(common.size()) +
                                                 " common dates; need " + std::to_string(options.min_overlap));

    Eigen::MatrixXd prices(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(series.size()));
    std::vector<std::string> ids;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k].series;
        std::size_t cursor = 0;
        for (std::size_t t = 0; t < common.size(); ++t) {
            while (s.dates[cursor] < common[t]) ++cursor;
            prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = s.values[cursor];
        }
        ids.push_back(series[k].id);
    }
    return PricePanel(std::move(common), std::move(prices), std::move(ids));
}

/// First difference; the first date is dropped.
inline DatedSeries difference_series(const DatedSeries& series) {
    if (series.size() < 2) fail(ErrorCode::Degenerate, "differencing needs at least two observations");
    DatedSeries out;
    out.dates.assign(series.dates.begin() + 1, series.dates.end());
    out.values.resize(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t) out.values[t - 1] = series.values[t] - series.values[t - 1];
    return out;
}

inline std::vector<double> difference(std::span<const double> values) {
    if (values.size() < 2) fail(ErrorCode::Degenerate, "differencing needs at least two observations");
    std::vector<double> out(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) out[t - 1] = values[t] - values[t - 1];
    return out;
}

/// One extra column built as sum_i weights[i] * driver_i + OU noise.
/// The OU component follows x_t = x_{t-1} + speed * x_{t-1} + noise_scale * e_t.
struct CointegrationRecipe {
    std::vector<double> weights;
    double noise_scale = 1.0;
    double speed = -0.0693147180559945;  // half-life 10
};

struct SyntheticConfig {
    std::size_t length = 1500;
    std::size_t random_walks = 2;
    double noise_scale = 1.0;
    double start_level = 100.0;
    double drift = 0.0;
    std::vector<CointegrationRecipe> recipes;
    Date start_date = Date{std::chrono::year{2008} / std::chrono::January / 2};
};

/// OU speed (per step) whose regression half-life -ln 2 / speed equals `half_life`.
inline double ou_speed_for_half_life(double half_life) { return -std::log(2.0) / half_life; }

/// Deterministic synthetic price panel. Columns RW1..RWk are Gaussian random
/// walks; each recipe appends a column CI<n> cointegrated with the drivers.
/// Any column dipping below 10% of `start_level` is shifted up by a constant,
/// which leaves every cointegrating relation intact up to its intercept.
inline PricePanel generate_synthetic_panel(std::uint64_t seed, const SyntheticConfig& config) {
    if (!(config.noise_scale > 0.0)) fail(ErrorCode::Validation, "noise scale must be positive");
    if (!(config.start_level > 0.0)) fail(ErrorCode::Validation, "start level must be positive");
    if (config.length < 2) fail(ErrorCode::Validation, "synthetic length must be at least 2");
    for (const auto& r : config.recipes) {
        if (!(r.noise_scale > 0.0)) fail(ErrorCode::Validation, "recipe noise scale must be positive");
        if (r.weights.empty() || r.weights.size() > config.random_walks)
            fail(ErrorCode::Validation, "recipe weights must reference existing random walks");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto T = static_cast<Eigen::Index>(config.length);
    const auto n_rw = static_cast<Eigen::Index>(config.random_walks);
    const auto width = n_rw + static_cast<Eigen::Index>(config.recipes.size());

    Eigen::MatrixXd prices(T, width);
    std::vector<std::string> ids;
    for (Eigen::Index j = 0; j < n_rw; ++j) {
        double level = config.start_level;
        for (Eigen::Index t = 0; t < T; ++t) {
            if (t > 0) level += config.drift + config.noise_scale * normal(rng);
            prices(t, j) = level;
        }
        ids.push_back("RW" + std::to_string(j + 1));
    }
    for (std::size_t k = 0; k < config.recipes.size(); ++k) {
        const auto& recipe = config.recipes[k];
        const auto col = n_rw + static_cast<Eigen::Index>(k);
        double ou = 0.0;
        for (Eigen::Index t = 0; t < T; ++t) {
            if (t > 0) ou += recipe.speed * ou + recipe.noise_scale * normal(rng);
            double v = ou;
            for (std::size_t i = 0; i < recipe.weights.size(); ++i)
                v += recipe.weights[i] * prices(t, static_cast<Eigen::Index>(i));
            prices(t, col) = v;
        }
        ids.push_back("CI" + std::to_string(k + 1));
    }

    const double floor_level = 0.1 * config.start_level;
    for (Eigen::Index j = 0; j < width; ++j) {
        const double lo = prices.col(j).minCoeff();
        if (lo < floor_level) prices.col(j).array() += floor_level - lo;
    }
    return PricePanel(business_days(config.start_date, config.length), std::move(prices), std::move(ids));
}

}  // namespace pairs
