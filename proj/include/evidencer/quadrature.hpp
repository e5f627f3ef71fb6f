/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_QUADRATURE_HPP
#define EVIDENCER_QUADRATURE_HPP

#include <cstddef>
#include <vector>

namespace evidencer::special {

/// Nodes and weights of a rule approximating an integral over
/// [lower, upper). Nodes are strictly increasing and weights positive.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lower = 0.0;
    double upper = 0.0;

    std::size_t size() const noexcept { return nodes.size(); }

    template <typename F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            sum += weights[i] * f(nodes[i]);
        }
        return sum;
    }
};

/// Gauss-Legendre nodes/weights of the given order on [-1, 1]. Cached.
const QuadratureRule& gauss_legendre(std::size_t order);

/// Points per Gauss-Legendre panel used by the composite rules below.
inline constexpr std::size_t kPanelOrder = 16;

/// Default upper-tail mass left out of Gamma quadrature rules.
inline constexpr double kDefaultRelTail = 1e-12;

/// Lower and upper Gamma(shape, 1) quantiles at rel_tail and 1 - rel_tail.
struct GammaSupport {
    double lower;
    double upper;
};
GammaSupport gamma_support(double shape, double rel_tail);

/// Composite Gauss-Legendre rule that is uniform in log(q) on [lo, hi],
/// with `panels` panels of kPanelOrder points. Requires 0 < lo < hi.
QuadratureRule log_uniform_rule(double lo, double hi, std::size_t panels);

/// Starting panel count for a log-uniform rule on [lo, hi] that integrates
/// against a Gamma(shape, 1) density.
std::size_t default_panels(double lo, double hi, double shape);

/// Rule on [0, Q] for integrating against a Gamma(shape, 1) density, where Q
/// is the 1 - rel_tail quantile. Mass below the rel_tail quantile is
/// dropped as well, so the pdf integrates to at least 1 - 2 * rel_tail.
QuadratureRule gamma_quadrature(double shape, double rel_tail = kDefaultRelTail,
                                std::size_t panels = 0);

} // namespace evidencer::special

#endif
