#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pairs/backtest.hpp"
#include "pairs/error.hpp"
#include "pairs/macro_signals.hpp"
#include "pairs/parallel.hpp"

namespace pairs {

/// (Long, Short, Flat) indicator bits with exactly one set.
using OneHotSignal = std::array<std::uint8_t, 3>;

inline OneHotSignal one_hot_encode(Signal s) {
    switch (s) {
        case Signal::Long: return {1, 0, 0};
        case Signal::Short: return {0, 1, 0};
        case Signal::Flat: return {0, 0, 1};
    }
    return {0, 0, 1};
}

/// Per-source weights in [0, 1]. The mean-reversion source is last by convention.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
        for (double w : weights_) {
            if (!(w >= 0.0 && w <= 1.0)) fail(ErrorCode::Validation, "weights must lie in [0, 1]");
        }
    }

    const std::vector<double>& values() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }

    bool operator==(const WeightVector&) const = default;

private:
    std::vector<double> weights_;
};

inline int signal_to_position(Signal s) {
    return s == Signal::Long ? 1 : s == Signal::Short ? -1 : 0;
}

inline Signal position_to_signal(int p) {
    return p > 0 ? Signal::Long : p < 0 ? Signal::Short : Signal::Flat;
}

inline std::vector<int> signal_to_position(const SignalSeries& combined) {
    std::vector<int> out;
    out.reserve(combined.signals.size());
    for (Signal s : combined.signals) out.push_back(signal_to_position(s));
    return out;
}

inline SignalSeries positions_to_signals(const std::vector<Date>& dates, std::span<const int> positions) {
    SignalSeries out;
    out.dates = dates;
    for (int p : positions) out.signals.push_back(position_to_signal(p));
    return out;
}

/// Weighted one-hot vote per date; a tie for the top score yields Flat.
inline SignalSeries combine_signals(std::span<const SignalSeries> sources, const WeightVector& weights) {
    if (sources.empty()) fail(ErrorCode::Validation, "no signal sources to combine");
    if (weights.size() != sources.size()) fail(ErrorCode::Validation, "one weight per signal source is required");
    for (const auto& s : sources) {
        if (s.dates != sources.front().dates || s.signals.size() != s.dates.size())
            fail(ErrorCode::Alignment, "signal sources do not share a daily calendar");
    }

    SignalSeries out;
    out.dates = sources.front().dates;
    out.signals.resize(out.dates.size());
    for (std::size_t t = 0; t < out.dates.size(); ++t) {
        std::array<double, 3> score{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < sources.size(); ++k) {
            const auto bits = one_hot_encode(sources[k].signals[t]);
            for (std::size_t c = 0; c < 3; ++c) score[c] += weights[k] * bits[c];
        }
        const double top = std::max({score[0], score[1], score[2]});
        const int winners = (score[0] == top) + (score[1] == top) + (score[2] == top);
        if (winners > 1 || score[2] == top) {
            out.signals[t] = Signal::Flat;
        } else {
            out.signals[t] = score[0] == top ? Signal::Long : Signal::Short;
        }
    }
    return out;
}

struct OptimizerConfig {
    double grid_step = 0.25;
    double mean_reversion_floor = 0.0;  // lower bound on the last weight in the grid
    std::size_t simplex_iterations = 60;
    std::size_t restarts = 2;  // extra simplex runs from seeded random starts
    std::uint64_t seed = 0;
};

struct OptimizationProbe {
    std::size_t index = 0;
    std::vector<double> weights;
    double apr = 0.0;
};

struct OptimizationResult {
    WeightVector weights;
    double apr = 0.0;
    double baseline_apr = 0.0;  // mean reversion alone
    double best_grid_apr = 0.0;
    std::size_t grid_size = 0;
    std::vector<OptimizationProbe> trace;
};

/// Frictionless APR of trading the combined signal as a target position.
inline double fused_apr(std::span<const SignalSeries> sources, const WeightVector& weights, const PricePanel& panel,
                        const Eigen::VectorXd& hedge_ratio, bool* has_variance = nullptr) {
    const auto combined = combine_signals(sources, weights);
    const auto positions = signal_to_position(combined);
    const auto report = compute_pnl(panel, hedge_ratio, positions, CostModel{});
    if (has_variance) *has_variance = report.sharpe.has_value();
    return report.apr;
}

namespace detail {

inline std::vector<std::vector<double>> weight_grid(std::size_t dims, double step, double last_floor) {
    const auto levels = static_cast<std::size_t>(std::llround(1.0 / step));
    if (levels < 1 || std::abs(static_cast<double>(levels) * step - 1.0) > 1e-12)
        fail(ErrorCode::Validation, "grid step must divide 1");
    std::vector<std::vector<double>> grid;
    std::vector<std::size_t> idx(dims, 0);
    while (true) {
        std::vector<double> w(dims);
        for (std::size_t k = 0; k < dims; ++k) w[k] = static_cast<double>(idx[k]) * step;
        if (w.back() >= last_floor) grid.push_back(std::move(w));
        std::size_t k = dims;
        while (k > 0 && idx[k - 1] == levels) idx[--k] = 0;
        if (k == 0) break;
        ++idx[k - 1];
    }
    return grid;
}

}  // namespace detail

/// Maximizes frictionless APR over [0, 1]^N: exhaustive grid, then bounded
/// Nelder-Mead from the best grid point and from `restarts` seeded random
/// starts. Every evaluation is recorded in the trace in evaluation order.
inline OptimizationResult optimize_weights(std::span<const SignalSeries> sources, const PricePanel& panel,
                                           const Eigen::VectorXd& hedge_ratio, const OptimizerConfig& config = {}) {
    const std::size_t dims = sources.size();
    if (dims < 1) fail(ErrorCode::Validation, "no signal sources to optimize");
    if (!(config.mean_reversion_floor >= 0.0 && config.mean_reversion_floor <= 1.0))
        fail(ErrorCode::Validation, "mean-reversion floor must lie in [0, 1]");

    OptimizationResult result;
    bool any_variance = false;

    const auto grid = detail::weight_grid(dims, config.grid_step, config.mean_reversion_floor);
    std::vector<double> grid_apr(grid.size());
    std::vector<char> grid_var(grid.size(), 0);
    parallel_for(grid.size(), [&](std::size_t i) {
        bool v = false;
        grid_apr[i] = fused_apr(sources, WeightVector(grid[i]), panel, hedge_ratio, &v);
        grid_var[i] = v;
    });

    std::size_t best_index = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        result.trace.push_back({i, grid[i], grid_apr[i]});
        any_variance = any_variance || grid_var[i];
        if (grid_apr[i] > grid_apr[best_index]) best_index = i;
    }
    result.grid_size = grid.size();
    result.best_grid_apr = grid_apr[best_index];
    std::vector<double> best_w = grid[best_index];
    double best_apr = grid_apr[best_index];

    std::vector<double> baseline(dims, 0.0);
    baseline.back() = 1.0;
    {
        bool v = false;
        result.baseline_apr = fused_apr(sources, WeightVector(baseline), panel, hedge_ratio, &v);
    }

    auto lower = [&](std::size_t k) { return k + 1 == dims ? config.mean_reversion_floor : 0.0; };
    auto clamp_point = [&](std::vector<double> w) {
        for (std::size_t k = 0; k < dims; ++k) w[k] = std::clamp(w[k], lower(k), 1.0);
        return w;
    };
    auto evaluate = [&](const std::vector<double>& w) {
        bool v = false;
        const double apr = fused_apr(sources, WeightVector(w), panel, hedge_ratio, &v);
        any_variance = any_variance || v;
        result.trace.push_back({result.trace.size(), w, apr});
        if (apr > best_apr) {
            best_apr = apr;
            best_w = w;
        }
        return apr;
    };

    auto nelder_mead = [&](std::vector<double> start) {
        const double delta = config.grid_step / 2.0;
        std::vector<std::vector<double>> simplex{start};
        for (std::size_t k = 0; k < dims; ++k) {
            auto v = start;
            v[k] = v[k] + delta <= 1.0 ? v[k] + delta : v[k] - delta;
            simplex.push_back(clamp_point(v));
        }
        std::vector<double> value;
        for (const auto& v : simplex) value.push_back(-evaluate(v));

        std::size_t evals = 0;
        while (evals < config.simplex_iterations) {
            std::vector<std::size_t> order(simplex.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
            const std::size_t worst = order.back();
            const std::size_t second = order[order.size() - 2];
            const std::size_t best = order.front();

            std::vector<double> centroid(dims, 0.0);
            for (std::size_t i : order) {
                if (i == worst) continue;
                for (std::size_t k = 0; k < dims; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dims);
            }
            auto along = [&](double coef) {
                std::vector<double> p(dims);
                for (std::size_t k = 0; k < dims; ++k) p[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
                return clamp_point(p);
            };

            const auto reflected = along(-1.0);
            const double fr = -evaluate(reflected);
            ++evals;
            if (fr < value[best]) {
                const auto expanded = along(-2.0);
                const double fe = -evaluate(expanded);
                ++evals;
                if (fe < fr) {
                    simplex[worst] = expanded;
                    value[worst] = fe;
                } else {
                    simplex[worst] = reflected;
                    value[worst] = fr;
                }
            } else if (fr < value[second]) {
                simplex[worst] = reflected;
                value[worst] = fr;
            } else {
                const auto contracted = fr < value[worst] ? along(-0.5) : along(0.5);
                const double fc = -evaluate(contracted);
                ++evals;
                if (fc < std::min(fr, value[worst])) {
                    simplex[worst] = contracted;
                    value[worst] = fc;
                } else {
                    for (std::size_t i = 0; i < simplex.size() && evals < config.simplex_iterations; ++i) {
                        if (i == best) continue;
                        for (std::size_t k = 0; k < dims; ++k)
                            simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
                        value[i] = -evaluate(simplex[i]);
                        ++evals;
                    }
                }
            }
        }
    };

    if (config.simplex_iterations > 0) {
        nelder_mead(best_w);
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t r = 0; r < config.restarts; ++r) {
            std::vector<double> start(dims);
            for (std::size_t k = 0; k < dims; ++k) start[k] = lower(k) + (1.0 - lower(k)) * unit(rng);
            nelder_mead(start);
        }
    }

    if (!any_variance) fail(ErrorCode::OptimizationDegenerate, "every probed weighting produced zero-variance returns");
    result.weights = WeightVector(best_w);
    result.apr = best_apr;
    return result;
}

/// `probe_index,w1..wN,apr` rows, reals printed round-trip exact.
inline std::string format_trace_csv(const OptimizationResult& result) {
    std::string out = "probe_index";
    const std::size_t dims = result.weights.size();
    for (std::size_t k = 0; k < dims; ++k) out += ",w" + std::to_string(k + 1);
    out += ",apr\n";
    for (const auto& p : result.trace) {
        out += std::to_string(p.index);
        for (double w : p.weights) out += "," + format_real(w);
        out += "," + format_real(p.apr) + "\n";
    }
    return out;
}

}  // namespace pairs
