/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_SPECIAL_FUNCTIONS_HPP
#define EVIDENCER_SPECIAL_FUNCTIONS_HPP

#include <span>

namespace evidencer::special {

/// ln Gamma(x) for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// Digamma psi(x) for x > 0.
double digamma(double x);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
/// i.e. the CDF of Gamma(a, 1) at x.
double reg_lower_incomplete_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), evaluated
/// directly so that small tails keep their relative accuracy.
double reg_upper_incomplete_gamma(double a, double x);

/// Regularized incomplete beta I_x(a, b), the CDF of Beta(a, b) at x.
double reg_incomplete_beta(double x, double a, double b);

/// log(sum(exp(v))) by shifting with the maximum. -inf entries are allowed;
/// the result is -inf when every entry is -inf.
double log_sum_exp(std::span<const double> values);

/// Density of Gamma(shape, rate) at x >= 0.
double gamma_pdf(double x, double shape, double rate = 1.0);

} // namespace evidencer::special

#endif
