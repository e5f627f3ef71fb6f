/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_TESTS_SUPPORT_HPP
#define EVIDENCER_TESTS_SUPPORT_HPP

#include "evidencer/distributions.hpp"
#include "evidencer/glm_ng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace evidencer::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline Matrix normal_matrix(Rng& rng, Index rows, Index cols, double sd = 1.0) {
    std::normal_distribution<double> n(0.0, sd);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
    }
    return m;
}

/// Symmetric positive definite matrix with eigenvalues roughly in [lo, hi].
inline Matrix random_spd(Rng& rng, Index p, double lo = 0.5, double hi = 3.0) {
    const Matrix a = normal_matrix(rng, p, p);
    Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ();
    Vector ev(p);
    for (Index i = 0; i < p; ++i) ev(i) = uniform(rng, lo, hi);
    Matrix s = q * ev.asDiagonal() * q.transpose();
    return (s + s.transpose()) / 2.0;
}

inline dist::NgParams random_proper_prior(Rng& rng, Index p) {
    dist::NgParams prior;
    prior.mu = normal_matrix(rng, p, 1);
    prior.lambda = random_spd(rng, p, 0.2, 2.0);
    prior.a = uniform(rng, 0.5, 4.0);
    prior.b = uniform(rng, 0.5, 4.0);
    return prior;
}

enum class PrecisionKind { Identity, Diagonal, Full };

inline glm::Precision random_precision(Rng& rng, Index n, PrecisionKind kind) {
    switch (kind) {
    case PrecisionKind::Identity:
        return glm::Precision::identity(n);
    case PrecisionKind::Diagonal: {
        Vector d(n);
        for (Index i = 0; i < n; ++i) d(i) = uniform(rng, 0.5, 2.0);
        return glm::Precision::diagonal(d);
    }
    case PrecisionKind::Full:
        break;
    }
    return glm::Precision::full(random_spd(rng, n, 0.5, 2.0));
}

/// y = X beta + noise, with an intercept in the first column.
inline glm::GlmSpec random_spec(Rng& rng, Index n, Index p, Index voxels,
                                PrecisionKind kind = PrecisionKind::Identity) {
    Matrix x = normal_matrix(rng, n, p);
    x.col(0).setOnes();
    const Matrix beta = normal_matrix(rng, p, voxels);
    Matrix y = x * beta + normal_matrix(rng, n, voxels, 0.8);
    return {std::move(y), std::move(x), random_precision(rng, n, kind)};
}

inline PrecisionKind random_kind(Rng& rng) {
    return static_cast<PrecisionKind>(uniform_int(rng, 0, 2));
}

inline double max_rel_diff(const Matrix& a, const Matrix& b) {
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Log of the unnormalised joint p(y | beta, tau) * pi(beta, tau) for p = 1,
/// with pi either a normal-gamma density or the flat reference tau^(-1/2).
struct ScalarJoint {
    Vector y;
    Vector x;
    Matrix precision;
    bool proper = true;
    double mu0 = 0.0, lambda0 = 0.0, a0 = 0.0, b0 = 0.0;

    double log_density(double beta, double tau) const {
        const double n = static_cast<double>(y.size());
        const Vector r = y - x * beta;
        const double log_det_p = std::log(precision.determinant());
        double lp = 0.5 * log_det_p + 0.5 * n * std::log(tau / (2.0 * std::numbers::pi)) -
                    0.5 * tau * r.dot(precision * r);
        if (proper) {
            const double d = beta - mu0;
            lp += 0.5 * std::log(tau * lambda0 / (2.0 * std::numbers::pi)) -
                  0.5 * tau * lambda0 * d * d;
            lp += a0 * std::log(b0) - std::lgamma(a0) + (a0 - 1.0) * std::log(tau) - b0 * tau;
        } else {
            lp += -0.5 * std::log(tau);
        }
        return lp;
    }
};

/// log of the double integral of exp(joint.log_density) over beta in R and
/// tau > 0 by nested adaptive Gauss-Kronrod quadrature.
inline double brute_force_log_integral(const ScalarJoint& joint) {
    const double sxx = joint.x.dot(joint.precision * joint.x) + (joint.proper ? joint.lambda0 : 0.0);
    const double beta_hat =
        (joint.x.dot(joint.precision * joint.y) + (joint.proper ? joint.lambda0 * joint.mu0 : 0.0)) /
        sxx;
    const Vector r = joint.y - joint.x * beta_hat;
    const double tau_hat = static_cast<double>(joint.y.size()) / (r.dot(joint.precision * r) + 1.0);
    const double offset = joint.log_density(beta_hat, tau_hat);

    using boost::math::quadrature::gauss_kronrod;
    auto inner = [&](double log_tau) {
        const double tau = std::exp(log_tau);
        const double width = 1.0 / std::sqrt(tau * sxx);
        auto f = [&](double u) {
            return std::exp(joint.log_density(beta_hat + u * width, tau) - offset);
        };
        return width * tau * gauss_kronrod<double, 61>::integrate(f, -40.0, 40.0, 12, 1e-13);
    };
    const double lo = std::log(tau_hat) - 40.0;
    const double hi = std::log(tau_hat) + 12.0;
    const double mass = gauss_kronrod<double, 61>::integrate(inner, lo, hi, 15, 1e-12);
    return std::log(mass) + offset;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("evidencer_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace evidencer::testing

#endif
