/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/special_functions.hpp"

#include "evidencer/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace evidencer::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 1000000;
constexpr double kPi = 3.14159265358979323846;

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + " requires a positive finite argument, got " +
                          std::to_string(x));
    }
}

// Series for P(a, x), valid and fast for x < a + 1.
double lower_gamma_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) {
            return sum * std::exp(a * std::log(x) - x - log_gamma(a));
        }
    }
    throw NumericError("incomplete gamma series did not converge");
}

// Modified Lentz continued fraction for Q(a, x), x >= a + 1.
double upper_gamma_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            return std::exp(a * std::log(x) - x - log_gamma(a)) * h;
        }
    }
    throw NumericError("incomplete gamma continued fraction did not converge");
}

void check_incomplete_gamma_args(double a, double x) {
    require_positive(a, "incomplete gamma shape");
    if (!(x >= 0.0)) {
        throw DomainError("incomplete gamma requires x >= 0, got " + std::to_string(x));
    }
}

// Lentz continued fraction for the incomplete beta function.
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

// log Gamma(x) minus its Stirling approximation.
double stirling_remainder(double x) {
    if (x < 10.0) {
        return std::lgamma(x) - ((x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * kPi));
    }
    const double r = 1.0 / x;
    const double r2 = r * r;
    return r * (1.0 / 12.0 -
                r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
}

// x^a (1 - x)^b / B(a, b), without cancelling large log-gamma terms.
double beta_prefactor(double x, double a, double b) {
    const double c = a + b;
    const double small = std::min(a, b);
    const double big = std::max(a, b);
    if (big < 8.0) {
        return std::exp(log_gamma(c) - log_gamma(a) - log_gamma(b) + a * std::log(x) +
                        b * std::log1p(-x));
    }
    if (small < 8.0) {
        // log Gamma(c) - log Gamma(big) expanded around big.
        const double shift = (big - 0.5) * std::log1p(small / big) + small * std::log(c) - small +
                             stirling_remainder(c) - stirling_remainder(big);
        return std::exp(shift - log_gamma(small) + a * std::log(x) + b * std::log1p(-x));
    }
    const double e = c * x - a;
    const double log_ratio = a * std::log1p(e / a) + b * std::log1p(-e / b);
    const double log_norm = 0.5 * std::log(a * b / (2.0 * kPi * c)) - stirling_remainder(a) -
                            stirling_remainder(b) + stirling_remainder(c);
    return std::exp(log_ratio + log_norm);
}

} // namespace

double log_gamma(double x) {
    require_positive(x, "log_gamma");
    // Lanczos-type approximation, g = 671/128, 14 terms; full double precision.
    static constexpr std::array<double, 14> cof = {
        57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
        -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
        -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
        .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
        -.261908384015814087e-4, .368991826595316234e-5};
    if (x == 1.0 || x == 2.0) return 0.0;
    double y = x;
    double tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double ser = 0.999999999999997092;
    for (double c : cof) ser += c / ++y;
    return tmp + std::log(2.5066282746310005 * ser / x);
}

double digamma(double x) {
    require_positive(x, "digamma");
    double result = 0.0;
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double f = 1.0 / (x * x);
    const double tail =
        f * (-1.0 / 12 +
             f * (1.0 / 120 +
                  f * (-1.0 / 252 +
                       f * (1.0 / 240 + f * (-1.0 / 132 + f * (691.0 / 32760 + f * (-1.0 / 12)))))));
    return result + std::log(x) - 0.5 / x + tail;
}

double reg_lower_incomplete_gamma(double a, double x) {
    check_incomplete_gamma_args(a, x);
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return std::min(1.0, lower_gamma_series(a, x));
    return std::max(0.0, 1.0 - upper_gamma_fraction(a, x));
}

double reg_upper_incomplete_gamma(double a, double x) {
    check_incomplete_gamma_args(a, x);
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return std::max(0.0, 1.0 - lower_gamma_series(a, x));
    return std::min(1.0, upper_gamma_fraction(a, x));
}

double reg_incomplete_beta(double x, double a, double b) {
    require_positive(a, "incomplete beta shape a");
    require_positive(b, "incomplete beta shape b");
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("incomplete beta requires 0 <= x <= 1, got " + std::to_string(x));
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = beta_prefactor(x, a, b);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::clamp(front * beta_fraction(a, b, x) / a, 0.0, 1.0);
    }
    return std::clamp(1.0 - front * beta_fraction(b, a, 1.0 - x) / b, 0.0, 1.0);
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) throw DomainError("log_sum_exp of an empty list");
    double top = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (std::isnan(v)) throw DomainError("log_sum_exp input contains NaN");
        top = std::max(top, v);
    }
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

double gamma_pdf(double x, double shape, double rate) {
    require_positive(shape, "gamma_pdf shape");
    require_positive(rate, "gamma_pdf rate");
    if (x < 0.0 || std::isinf(x)) return 0.0;
    if (x == 0.0) {
        if (shape < 1.0) return std::numeric_limits<double>::infinity();
        return shape == 1.0 ? rate : 0.0;
    }
    return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                    log_gamma(shape));
}

} // namespace evidencer::special
