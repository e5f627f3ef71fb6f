/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_DISTRIBUTIONS_HPP
#define EVIDENCER_DISTRIBUTIONS_HPP

#include "evidencer/types.hpp"

#include <string_view>

namespace evidencer::dist {

/// Normal-gamma hyperparameters: beta | tau ~ N(mu, (tau * lambda)^-1),
/// tau ~ Gam(a, b). Used both as a prior and as a posterior.
struct NgParams {
    Vector mu;
    Matrix lambda;
    double a = 0.0;
    double b = 0.0;

    Index dim() const noexcept { return mu.size(); }

    /// mu = 0, lambda = 0, a = 0, b = 0: flat prior on the coefficients and
    /// Jeffreys prior on the residual precision. Only valid as input to a
    /// conjugate update.
    static NgParams non_informative(Index p);

    bool is_non_informative() const;

    /// lambda positive definite, a > 0 and b > 0.
    bool is_proper() const;

    /// Throws DomainError unless is_proper().
    void require_proper(std::string_view what) const;
};

/// Log-determinant of a symmetric positive definite matrix through its
/// Cholesky factor. Throws DecompositionError naming `what` otherwise.
double log_det_spd(const Matrix& m, std::string_view what);

/// Checks symmetry to 1e-12 relative.
bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

/// KL[N(mu1, sigma1) || N(mu2, sigma2)].
double kl_mvn(const Vector& mu1, const Matrix& sigma1, const Vector& mu2, const Matrix& sigma2);

/// KL[Gam(a1, b1) || Gam(a2, b2)] with rate parameterisation.
double kl_gamma(double a1, double b1, double a2, double b2);

struct GammaMoments {
    double mean;      // <x> = a / b
    double log_mean;  // <log x> = psi(a) - log b
};

GammaMoments gamma_moments(double a, double b);

} // namespace evidencer::dist

#endif
