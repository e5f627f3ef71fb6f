/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/quadrature.hpp"

#include "evidencer/errors.hpp"
#include "evidencer/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace evidencer::special {

namespace {

QuadratureRule make_gauss_legendre(std::size_t order) {
    QuadratureRule rule;
    rule.lower = -1.0;
    rule.upper = 1.0;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const auto n = static_cast<double>(order);
    for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                const double p3 = p2;
                p2 = p1;
                const auto jj = static_cast<double>(j);
                p1 = ((2.0 * jj + 1.0) * z * p2 - jj * p3) / (jj + 1.0);
            }
            dp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / dp;
            if (std::fabs(z - z1) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[order - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

// Smallest log-argument whose exponential is still a normal double.
const double kMinLogNode = std::log(std::numeric_limits<double>::min()) + 1.0;

// Root of a strictly monotone g(u) on [lo, hi] where g(lo) and g(hi) have
// opposite signs. Newton steps, falling back to bisection when a step
// leaves the bracket.
template <typename G, typename DG>
double bracketed_newton(G&& g, DG&& dg, double lo, double hi) {
    double glo = g(lo);
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gu = g(u);
        if (gu == 0.0) return u;
        if ((gu < 0.0) == (glo < 0.0)) {
            lo = u;
            glo = gu;
        } else {
            hi = u;
        }
        const double slope = dg(u);
        double next = u - gu / slope;
        if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (std::fabs(next - u) < 1e-13 * std::max(1.0, std::fabs(u))) return next;
        u = next;
    }
    throw NumericError("Gamma quantile search did not converge");
}

} // namespace

const QuadratureRule& gauss_legendre(std::size_t order) {
    if (order == 0) throw DomainError("Gauss-Legendre order must be positive");
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_gauss_legendre(order)).first;
    return it->second;
}

GammaSupport gamma_support(double shape, double rel_tail) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("gamma_support requires a positive shape");
    }
    if (!(rel_tail > 0.0 && rel_tail < 1e-6)) {
        throw DomainError("gamma_support requires 0 < rel_tail < 1e-6");
    }
    const double log_tail = std::log(rel_tail);
    const double log_norm = log_gamma(shape);
    // d/du log F(e^u) = e^u f(e^u) / F(e^u) with f the Gamma(shape, 1) pdf.
    auto log_pdf_times_q = [&](double u) { return shape * u - std::exp(u) - log_norm; };

    // Upper quantile: log Q(shape, e^u) = log_tail.
    auto g_up = [&](double u) {
        const double q = reg_upper_incomplete_gamma(shape, std::exp(u));
        return (q > 0.0 ? std::log(q) : -1e300) - log_tail;
    };
    auto dg_up = [&](double u) {
        const double q = reg_upper_incomplete_gamma(shape, std::exp(u));
        return -std::exp(log_pdf_times_q(u)) / q;
    };
    double up_lo = std::log(shape);
    double up_hi = std::log(shape + 10.0 * std::sqrt(shape) + 40.0);
    while (g_up(up_hi) > 0.0) up_hi += 1.0;
    const double upper = std::exp(bracketed_newton(g_up, dg_up, up_lo, up_hi));

    // Lower quantile: log P(shape, e^u) = log_tail, using P ~ x^a / Gamma(a + 1).
    auto g_lo = [&](double u) {
        const double p = reg_lower_incomplete_gamma(shape, std::exp(u));
        return (p > 0.0 ? std::log(p) : -1e300) - log_tail;
    };
    auto dg_lo = [&](double u) {
        const double p = reg_lower_incomplete_gamma(shape, std::exp(u));
        return std::exp(log_pdf_times_q(u)) / p;
    };
    double guess = (log_tail + log_gamma(shape + 1.0)) / shape;
    double lower;
    if (guess - 1.0 <= kMinLogNode) {
        lower = std::exp(kMinLogNode);
    } else {
        double lo_lo = guess - 1.0;
        while (lo_lo > kMinLogNode && g_lo(lo_lo) > 0.0) lo_lo -= 1.0;
        lo_lo = std::max(lo_lo, kMinLogNode);
        const double lo_hi = std::log(shape) + 1.0;
        lower = g_lo(lo_lo) > 0.0 ? std::exp(kMinLogNode)
                                  : std::exp(bracketed_newton(g_lo, dg_lo, lo_lo, lo_hi));
    }
    return {lower, upper};
}

QuadratureRule log_uniform_rule(double lo, double hi, std::size_t panels) {
    if (!(lo > 0.0 && hi > lo)) throw DomainError("log_uniform_rule requires 0 < lo < hi");
    if (panels == 0) throw DomainError("log_uniform_rule requires at least one panel");
    const QuadratureRule& gl = gauss_legendre(kPanelOrder);
    const double t0 = std::log(lo);
    const double width = (std::log(hi) - t0) / static_cast<double>(panels);
    QuadratureRule rule;
    rule.lower = 0.0;
    rule.upper = hi;
    rule.nodes.reserve(panels * kPanelOrder);
    rule.weights.reserve(panels * kPanelOrder);
    for (std::size_t k = 0; k < panels; ++k) {
        const double centre = t0 + (static_cast<double>(k) + 0.5) * width;
        for (std::size_t i = 0; i < kPanelOrder; ++i) {
            const double q = std::exp(centre + 0.5 * width * gl.nodes[i]);
            rule.nodes.push_back(q);
            rule.weights.push_back(0.5 * width * gl.weights[i] * q);
        }
    }
    return rule;
}

std::size_t default_panels(double lo, double hi, double shape) {
    // The integrand varies on a log-scale of roughly 1/sqrt(max(shape, hi)).
    const double span = std::log(hi) - std::log(lo);
    const double scale = std::sqrt(std::max(shape, 1.0));
    return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(span * scale / 2.0)));
}

QuadratureRule gamma_quadrature(double shape, double rel_tail, std::size_t panels) {
    const GammaSupport support = gamma_support(shape, rel_tail);
    if (panels == 0) panels = default_panels(support.lower, support.upper, shape);
    return log_uniform_rule(support.lower, support.upper, panels);
}

} // namespace evidencer::special
