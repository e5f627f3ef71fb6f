/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/distributions.hpp"

#include "evidencer/errors.hpp"
#include "evidencer/special_functions.hpp"

#include <cmath>
#include <string>

namespace evidencer::dist {

namespace {

Eigen::LLT<Matrix> cholesky(const Matrix& m, std::string_view what) {
    if (m.rows() != m.cols()) {
        throw DecompositionError(std::string(what) + " is not square");
    }
    if (!is_symmetric(m, 1e-10)) {
        throw DecompositionError(std::string(what) + " is not symmetric");
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DecompositionError(std::string(what) + " is not positive definite");
    }
    return llt;
}

double log_det(const Eigen::LLT<Matrix>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

} // namespace

NgParams NgParams::non_informative(Index p) {
    return {Vector::Zero(p), Matrix::Zero(p, p), 0.0, 0.0};
}

bool NgParams::is_non_informative() const {
    return a == 0.0 && b == 0.0 && mu.isZero(0.0) && lambda.isZero(0.0);
}

bool NgParams::is_proper() const {
    if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) return false;
    if (lambda.rows() != dim() || lambda.cols() != dim()) return false;
    if (!is_symmetric(lambda)) return false;
    Eigen::LLT<Matrix> llt(lambda);
    return llt.info() == Eigen::Success;
}

void NgParams::require_proper(std::string_view what) const {
    if (!is_proper()) {
        throw DomainError(std::string(what) +
                          " must be a proper normal-gamma distribution (lambda PD, a > 0, b > 0)");
    }
}

bool is_symmetric(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double log_det_spd(const Matrix& m, std::string_view what) {
    return log_det(cholesky(m, what));
}

double kl_mvn(const Vector& mu1, const Matrix& sigma1, const Vector& mu2, const Matrix& sigma2) {
    const Index k = mu1.size();
    if (mu2.size() != k || sigma1.rows() != k || sigma2.rows() != k) {
        throw DomainError("kl_mvn: dimension mismatch");
    }
    const auto llt1 = cholesky(sigma1, "kl_mvn sigma1");
    const auto llt2 = cholesky(sigma2, "kl_mvn sigma2");
    const Vector diff = mu2 - mu1;
    const double maha = diff.dot(llt2.solve(diff));
    const double trace = llt2.solve(sigma1).trace();
    const double kl =
        0.5 * (maha + trace - (log_det(llt1) - log_det(llt2)) - static_cast<double>(k));
    return kl;
}

double kl_gamma(double a1, double b1, double a2, double b2) {
    if (!(a1 > 0 && b1 > 0 && a2 > 0 && b2 > 0)) {
        throw DomainError("kl_gamma requires positive shape and rate parameters");
    }
    using special::digamma;
    using special::log_gamma;
    return a2 * std::log(b1 / b2) - (log_gamma(a1) - log_gamma(a2)) + (a1 - a2) * digamma(a1) -
           (b1 - b2) * a1 / b1;
}

GammaMoments gamma_moments(double a, double b) {
    if (!(a > 0 && b > 0)) throw DomainError("gamma_moments requires a > 0 and b > 0");
    return {a / b, special::digamma(a) - std::log(b)};
}

} // namespace evidencer::dist
