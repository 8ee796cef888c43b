#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pairs/cointegration.hpp"
#include "pairs/parallel.hpp"
#include "pairs/unit_root.hpp"

namespace pairs {

/// Linear-interpolated empirical quantile (type 7) of a sample; sorts in place.
inline double empirical_quantile(std::vector<double>& sample, double prob) {
    if (sample.empty()) fail(ErrorCode::Degenerate, "quantile of an empty sample");
    std::sort(sample.begin(), sample.end());
    const double h = prob * static_cast<double>(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

struct SimulatedQuantile {
    double probability;
    double value;
};

struct MonteCarloConfig {
    std::size_t draws = 100000;
    std::size_t sample_size = 500;
    std::uint64_t seed = 20080102;
};

/// Null distribution of the Dickey-Fuller t-ratio (constant, no trend, no
/// augmentation lags) from driftless Gaussian random walks. Draw i uses its
/// own generator seeded with seed + i.
inline std::vector<double> simulate_df_statistics(const MonteCarloConfig& config) {
    std::vector<double> stats(config.draws);
    parallel_for(config.draws, [&](std::size_t i) {
        std::mt19937_64 rng(config.seed + i);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> y(config.sample_size);
        double level = 0.0;
        for (auto& v : y) {
            level += normal(rng);
            v = level;
        }
        stats[i] = adf_test(y, std::size_t{0}).statistic;
    });
    return stats;
}

/// Null distribution of the trace statistic for a single stochastic trend
/// (m - r = 1). Under the unrestricted-constant case the walk carries a unit
/// drift, matching the asymptotics the tabulated value assumes.
inline std::vector<double> simulate_trace_statistics(const MonteCarloConfig& config, DeterministicCase det) {
    const double drift = det == DeterministicCase::UnrestrictedConstant ? 1.0 : 0.0;
    std::vector<double> stats(config.draws);
    parallel_for(config.draws, [&](std::size_t i) {
        std::mt19937_64 rng(config.seed + i);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd y(static_cast<Eigen::Index>(config.sample_size), 1);
        double level = 0.0;
        for (Eigen::Index t = 0; t < y.rows(); ++t) {
            level += drift + normal(rng);
            y(t, 0) = level;
        }
        stats[i] = detail::johansen_core(y, 1, det).trace_statistics(0);
    });
    return stats;
}

struct CriticalValueCheck {
    std::string name;
    double probability = 0.0;
    double simulated = 0.0;
    double embedded = 0.0;
    double tolerance = 0.0;

    bool within_tolerance() const { return std::abs(simulated - embedded) <= tolerance; }
};

/// Monte Carlo checks of the embedded 95% ADF and m - r = 1 trace values.
inline std::vector<CriticalValueCheck> verify_critical_values(const MonteCarloConfig& config,
                                                              DeterministicCase det = DeterministicCase::RestrictedConstant) {
    std::vector<CriticalValueCheck> out;
    auto df = simulate_df_statistics(config);
    out.push_back({"adf_constant_5pct", 0.05, empirical_quantile(df, 0.05),
                   df_critical_values(config.sample_size).pct5, 0.03});
    auto trace = simulate_trace_statistics(config, det);
    out.push_back({std::string("johansen_trace_") + to_string(det) + "_m-r=1", 0.95, empirical_quantile(trace, 0.95),
                   johansen_trace_critical_value_95(det, 1), 0.3});
    return out;
}

inline std::string format_critical_value_csv(const std::vector<CriticalValueCheck>& checks, const MonteCarloConfig& config) {
    std::string out = "statistic,probability,sample_size,draws,simulated,embedded,tolerance,within_tolerance\n";
    for (const auto& c : checks) {
        out += c.name + "," + format_real(c.probability) + "," + std::to_string(config.sample_size) + "," +
               std::to_string(config.draws) + "," + format_real(c.simulated) + "," + format_real(c.embedded) + "," +
               format_real(c.tolerance) + "," + (c.within_tolerance() ? "true" : "false") + "\n";
    }
    return out;
}

}  // namespace pairs
