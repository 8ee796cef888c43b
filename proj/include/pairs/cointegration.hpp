#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pairs/error.hpp"
#include "pairs/market_data.hpp"
#include "pairs/regression.hpp"

namespace pairs {

/// Every index subset of {0..n-1} with size in [min_size, max_size]; ordered by
/// size, then lexicographically within a size.
inline std::vector<std::vector<std::size_t>> enumerate_combinations(std::size_t n, std::size_t min_size,
                                                                   std::size_t max_size) {
    if (min_size < 2) fail(ErrorCode::Validation, "subset size must be at least 2");
    if (min_size > max_size) fail(ErrorCode::Validation, "min subset size exceeds max subset size");
    if (n < min_size) fail(ErrorCode::Validation, "not enough instruments for the requested subset size");
    max_size = std::min(max_size, n);

    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = min_size; k <= max_size; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            out.push_back(idx);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

namespace detail {

inline void require_regular(const Eigen::MatrixXd& s, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    if (!(hi > 0.0) || !(lo > 1e-12 * hi)) fail(ErrorCode::Singular, std::string(what) + " is singular");
}

}  // namespace detail

/// Lag order of a levels VAR with intercept minimising
///   SC(p) = ln det(Sigma_p) + (ln n / n) * (p m^2 + m)
/// with every p in [1, max_lag] fitted on the same n = T - max_lag rows.
inline std::size_t select_var_lag(const Eigen::MatrixXd& levels, std::size_t max_lag) {
    const auto T = static_cast<std::size_t>(levels.rows());
    const auto m = static_cast<std::size_t>(levels.cols());
    if (max_lag < 1) fail(ErrorCode::Validation, "max VAR lag must be at least 1");
    if (max_lag == 1) return 1;
    if (T < m * max_lag + 30) fail(ErrorCode::Validation, "sample too short for the requested VAR lag range");

    const auto n = static_cast<Eigen::Index>(T - max_lag);
    const auto mi = static_cast<Eigen::Index>(m);
    const Eigen::MatrixXd response = levels.bottomRows(n);
    Eigen::MatrixXd design(n, 1 + mi * static_cast<Eigen::Index>(max_lag));
    design.col(0).setOnes();
    for (std::size_t lag = 1; lag <= max_lag; ++lag)
        design.middleCols(1 + mi * static_cast<Eigen::Index>(lag - 1), mi) =
            levels.middleRows(static_cast<Eigen::Index>(max_lag - lag), n);

    const double dn = static_cast<double>(n);
    std::size_t best = 1;
    double best_sc = std::numeric_limits<double>::infinity();
    for (std::size_t p = 1; p <= max_lag; ++p) {
        const Eigen::MatrixXd resid = residualize(response, design.leftCols(1 + mi * static_cast<Eigen::Index>(p)));
        const Eigen::MatrixXd sigma = resid.transpose() * resid / dn;
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success) fail(ErrorCode::Singular, "VAR residual covariance is singular");
        const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        if (!std::isfinite(log_det)) fail(ErrorCode::Singular, "VAR residual covariance is singular");
        const double sc = log_det + std::log(dn) / dn * static_cast<double>(p * m * m + m);
        if (sc < best_sc) {
            best_sc = sc;
            best = p;
        }
    }
    return best;
}

inline std::size_t select_var_lag(const PricePanel& panel, std::size_t max_lag) {
    return select_var_lag(panel.prices(), max_lag);
}

/// Deterministic terms of the error-correction model.
/// UnrestrictedConstant: intercept in the VECM (drift in levels, no trend in
/// the cointegrating relation). RestrictedConstant: intercept confined to the
/// cointegrating relation.
enum class DeterministicCase { UnrestrictedConstant, RestrictedConstant };

inline const char* to_string(DeterministicCase c) {
    return c == DeterministicCase::UnrestrictedConstant ? "unrestricted_constant" : "restricted_constant";
}

/// 95% trace critical values indexed by m - r (1..4), MacKinnon-Haug-Michelis (1999).
inline double johansen_trace_critical_value_95(DeterministicCase c, std::size_t dims) {
    static constexpr std::array<double, 4> unrestricted{3.8415, 15.4943, 29.7961, 47.8545};
    static constexpr std::array<double, 4> restricted{9.1645, 20.2618, 35.1928, 54.0790};
    if (dims < 1 || dims > 4) fail(ErrorCode::Validation, "trace critical values cover 1..4 dimensions");
    return c == DeterministicCase::UnrestrictedConstant ? unrestricted[dims - 1] : restricted[dims - 1];
}

struct JohansenOutcome {
    std::vector<std::string> subset;
    DeterministicCase deterministic = DeterministicCase::UnrestrictedConstant;
    Eigen::VectorXd eigenvalues;        // descending, in [0, 1)
    Eigen::MatrixXd eigenvectors;       // column i pairs with eigenvalues(i); rows are instruments
    Eigen::VectorXd trace_statistics;   // entry r tests rank <= r
    Eigen::VectorXd critical_values_95;
    std::size_t rank = 0;
    std::size_t var_lag = 1;
    std::size_t vecm_lag = 0;
    std::size_t observations = 0;
};

namespace detail {

/// Shared Johansen machinery; accepts any width >= 1 so the Monte Carlo
/// calibration can run the one-dimensional case.
inline JohansenOutcome johansen_core(const Eigen::MatrixXd& levels, std::size_t var_lag, DeterministicCase det) {
    const auto T = static_cast<std::size_t>(levels.rows());
    const auto m = levels.cols();
    if (var_lag < 1) fail(ErrorCode::Validation, "VAR lag must be at least 1");
    if (T < static_cast<std::size_t>(m) * var_lag + 30)
        fail(ErrorCode::Validation, "sample too short for the Johansen test");

    const std::size_t k = var_lag - 1;  // lagged differences in the VECM
    const auto n = static_cast<Eigen::Index>(T - var_lag);
    const auto first = static_cast<Eigen::Index>(var_lag);  // first usable row of levels

    const Eigen::MatrixXd diffs = levels.bottomRows(T - 1) - levels.topRows(T - 1);  // diffs.row(t-1) = dY_t
    const Eigen::MatrixXd z0 = diffs.middleRows(first - 1, n);

    const bool restricted = det == DeterministicCase::RestrictedConstant;
    Eigen::MatrixXd z1(n, m + (restricted ? 1 : 0));
    z1.leftCols(m) = levels.middleRows(0, n);  // Y_{t-p}: long-run form
    if (restricted) z1.col(m).setOnes();

    Eigen::MatrixXd z2(n, m * static_cast<Eigen::Index>(k) + (restricted ? 0 : 1));
    for (std::size_t i = 1; i <= k; ++i)
        z2.middleCols(m * static_cast<Eigen::Index>(i - 1), m) = diffs.middleRows(first - 1 - static_cast<Eigen::Index>(i), n);
    if (!restricted) z2.rightCols(1).setOnes();

    const Eigen::MatrixXd r0 = residualize(z0, z2);
    const Eigen::MatrixXd r1 = residualize(z1, z2);
    const double dn = static_cast<double>(n);
    const Eigen::MatrixXd s00 = r0.transpose() * r0 / dn;
    const Eigen::MatrixXd s11 = r1.transpose() * r1 / dn;
    const Eigen::MatrixXd s01 = r0.transpose() * r1 / dn;
    require_regular(s00, "S00");
    require_regular(s11, "S11");

    Eigen::MatrixXd a = s01.transpose() * s00.ldlt().solve(s01);
    a = 0.5 * (a + a.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, s11);
    if (ges.info() != Eigen::Success) fail(ErrorCode::Singular, "generalized eigenproblem failed");

    // Eigen returns ascending order; keep the m largest, descending.
    const auto dim = z1.cols();
    JohansenOutcome out;
    out.deterministic = det;
    out.var_lag = var_lag;
    out.vecm_lag = k;
    out.observations = static_cast<std::size_t>(n);
    out.eigenvalues.resize(m);
    out.eigenvectors.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index src = dim - 1 - i;
        out.eigenvalues(i) = std::clamp(ges.eigenvalues()(src), 0.0, std::nextafter(1.0, 0.0));
        out.eigenvectors.col(i) = ges.eigenvectors().col(src).head(m);
    }

    out.trace_statistics.resize(m);
    out.critical_values_95.resize(m);
    double tail = 0.0;
    for (Eigen::Index r = m - 1; r >= 0; --r) {
        tail += std::log1p(-out.eigenvalues(r));
        out.trace_statistics(r) = -dn * tail;
    }
    out.rank = static_cast<std::size_t>(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto dims = static_cast<std::size_t>(m - r);
        out.critical_values_95(r) = dims <= 4 ? johansen_trace_critical_value_95(det, dims)
                                              : std::numeric_limits<double>::quiet_NaN();
    }
    for (Eigen::Index r = 0; r < m; ++r) {
        if (!(out.trace_statistics(r) > out.critical_values_95(r))) {
            out.rank = static_cast<std::size_t>(r);
            break;
        }
    }
    return out;
}

}  // namespace detail

/// Johansen trace test on the long-run VECM
///   dY_t = Pi Y_{t-p} + sum_{i=1..p-1} G_i dY_{t-i} + deterministics + e_t,
/// where p is the levels-VAR lag order.
inline JohansenOutcome johansen_test(const PricePanel& panel, std::size_t var_lag,
                                     DeterministicCase det = DeterministicCase::RestrictedConstant) {
    if (panel.width() < 2 || panel.width() > 4)
        fail(ErrorCode::Validation, "Johansen test supports 2 to 4 instruments");
    JohansenOutcome out = detail::johansen_core(panel.prices(), var_lag, det);
    out.subset = panel.ids();
    return out;
}

/// Scales a vector so its first non-negligible component is +1.
inline Eigen::VectorXd normalize_first_component(const Eigen::VectorXd& v) {
    const double scale = v.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) fail(ErrorCode::Degenerate, "cannot normalize a zero vector");
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12 * scale) return v / v(i);
    }
    return v / scale;
}

/// Eigenvector of the largest eigenvalue, first nonzero component scaled to +1.
inline Eigen::VectorXd extract_hedge_ratio(const JohansenOutcome& outcome) {
    if (outcome.rank < 1) fail(ErrorCode::NoCointegration, "no cointegrating relation at 95%");
    Eigen::Index top = 0;
    outcome.eigenvalues.maxCoeff(&top);
    return normalize_first_component(outcome.eigenvectors.col(top));
}

}  // namespace pairs
