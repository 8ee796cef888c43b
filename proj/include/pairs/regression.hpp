#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "pairs/error.hpp"

namespace pairs {

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd standard_errors;
    Eigen::VectorXd residuals;
    double rss = 0.0;
    Eigen::Index observations = 0;
};

/// Least squares via column-pivoted Householder QR. Throws Singular when the
/// design matrix is rank deficient relative to its largest pivot.
inline OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
    const Eigen::Index n = design.rows();
    const Eigen::Index k = design.cols();
    if (n <= k) fail(ErrorCode::Degenerate, "regression needs more observations than regressors");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) fail(ErrorCode::Singular, "regressor matrix is rank deficient");

    OlsFit fit;
    fit.observations = n;
    fit.coefficients = qr.solve(response);
    fit.residuals = response - design * fit.coefficients;
    fit.rss = fit.residuals.squaredNorm();

    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::VectorXd permuted_diag = (r_inv * r_inv.transpose()).diagonal();
    const double sigma2 = fit.rss / static_cast<double>(n - k);
    fit.standard_errors.resize(k);
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < k; ++i) fit.standard_errors(perm(i)) = std::sqrt(sigma2 * permuted_diag(i));
    return fit;
}

/// Residuals of regressing each column of `y` on `x` (x may have zero columns).
inline Eigen::MatrixXd residualize(const Eigen::MatrixXd& y, const Eigen::MatrixXd& x) {
    if (x.cols() == 0) return y;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < x.cols()) fail(ErrorCode::Singular, "conditioning regressors are rank deficient");
    return y - x * qr.solve(y);
}

}  // namespace pairs
