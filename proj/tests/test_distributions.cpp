/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/distributions.hpp"
#include "evidencer/errors.hpp"
#include "evidencer/special_functions.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace evidencer;
using namespace evidencer::dist;
using namespace evidencer::testing;

namespace {

constexpr double kEuler = 0.57721566490153286061;

struct MeanSe {
    double mean;
    double se;
};

template <class F>
MeanSe monte_carlo(std::size_t draws, F&& sample) {
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double v = sample();
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    return {mean, std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n)};
}

/// Draws from N(mu, sigma) through the Cholesky factor.
struct MvnSampler {
    Vector mu;
    Matrix l;
    std::normal_distribution<double> z{0.0, 1.0};

    MvnSampler(Vector m, const Matrix& sigma) : mu(std::move(m)), l(sigma.llt().matrixL()) {}

    Vector operator()(Rng& rng) {
        Vector e(mu.size());
        for (Index i = 0; i < e.size(); ++i) e(i) = z(rng);
        return mu + l * e;
    }
};

double log_mvn_pdf(const Vector& x, const Vector& mu, const Matrix& sigma) {
    const Eigen::LLT<Matrix> llt(sigma);
    const Vector d = x - mu;
    const double quad = d.dot(llt.solve(d));
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

double log_gamma_pdf(double x, double a, double b) {
    return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
}

} // namespace

TEST_CASE("NgParams") {
    const auto ni = NgParams::non_informative(3);
    CHECK(ni.dim() == 3);
    CHECK(ni.is_non_informative());
    CHECK_FALSE(ni.is_proper());
    CHECK(ni.mu.isZero(0.0));
    CHECK(ni.lambda.isZero(0.0));
    CHECK(ni.a == 0.0);
    CHECK(ni.b == 0.0);
    CHECK_THROWS_AS(ni.require_proper("prior"), DomainError);

    Rng rng(21);
    const auto p = random_proper_prior(rng, 3);
    CHECK(p.is_proper());
    CHECK_FALSE(p.is_non_informative());
    CHECK_NOTHROW(p.require_proper("prior"));

    auto asym = p;
    asym.lambda(0, 1) += 1e-6;
    CHECK_FALSE(asym.is_proper());
}

TEST_CASE("log_det_spd uses a triangular factor") {
    Rng rng(22);
    const Matrix m = random_spd(rng, 6);
    CHECK(log_det_spd(m, "m") == doctest::Approx(std::log(m.determinant())).epsilon(1e-12));
    // Far beyond the range of a raw determinant.
    const Matrix big = Matrix::Identity(400, 400) * 1e3;
    CHECK(log_det_spd(big, "big") == doctest::Approx(400.0 * std::log(1e3)).epsilon(1e-13));
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_WITH_AS(log_det_spd(bad, "covariance"), doctest::Contains("covariance"),
                         DecompositionError);
}

TEST_CASE("kl_mvn") {
    Rng rng(23);
    const Vector mu = normal_matrix(rng, 3, 1);
    const Matrix s = random_spd(rng, 3);
    CHECK(kl_mvn(mu, s, mu, s) == doctest::Approx(0.0).epsilon(1e-14));

    CHECK(kl_mvn(Vector::Constant(1, 1.0), Matrix::Identity(1, 1), Vector::Zero(1),
                 Matrix::Identity(1, 1)) == doctest::Approx(0.5).epsilon(1e-15));

    SUBCASE("Monte Carlo oracle in three dimensions") {
        const Vector mu1 = normal_matrix(rng, 3, 1);
        const Vector mu2 = normal_matrix(rng, 3, 1);
        const Matrix s1 = random_spd(rng, 3);
        const Matrix s2 = random_spd(rng, 3);
        MvnSampler draw(mu1, s1);
        const auto mc = monte_carlo(1000000, [&] {
            const Vector x = draw(rng);
            return log_mvn_pdf(x, mu1, s1) - log_mvn_pdf(x, mu2, s2);
        });
        CHECK(std::abs(kl_mvn(mu1, s1, mu2, s2) - mc.mean) < 3.0 * mc.se);
    }

    SUBCASE("vanishes only for coincident arguments") {
        Vector mu2 = mu;
        mu2(0) += 1e-3;
        CHECK(kl_mvn(mu, s, mu2, s) > 0.0);
        Matrix s2 = s;
        s2(1, 1) *= 1.001;
        CHECK(kl_mvn(mu, s, mu, s2) > 0.0);
    }

    SUBCASE("invariant under a joint rotation") {
        for (int i = 0; i < 50; ++i) {
            const Index p = uniform_int(rng, 1, 6);
            const Vector m1 = normal_matrix(rng, p, 1);
            const Vector m2 = normal_matrix(rng, p, 1);
            const Matrix s1 = random_spd(rng, p);
            const Matrix s2 = random_spd(rng, p);
            const Matrix q = Eigen::HouseholderQR<Matrix>(normal_matrix(rng, p, p)).householderQ();
            const double before = kl_mvn(m1, s1, m2, s2);
            const double after = kl_mvn(q * m1, q * s1 * q.transpose(), q * m2, q * s2 * q.transpose());
            CHECK(std::abs(before - after) < 1e-9 * std::max(1.0, before));
        }
    }

    CHECK_THROWS_WITH_AS(kl_mvn(mu, -s, mu, s), doctest::Contains("sigma1"), DecompositionError);
    CHECK_THROWS_WITH_AS(kl_mvn(mu, s, mu, -s), doctest::Contains("sigma2"), DecompositionError);
    CHECK_THROWS_AS(kl_mvn(mu, s, Vector::Zero(2), Matrix::Identity(2, 2)), DomainError);
}

TEST_CASE("kl_gamma") {
    CHECK(kl_gamma(1.0, 1.0, 1.0, 1.0) == 0.0);
    CHECK(kl_gamma(2.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0 - kEuler).epsilon(1e-12));
    CHECK(kl_gamma(2.0, 1.0, 1.0, 1.0) == doctest::Approx(0.4227843).epsilon(1e-7));
    CHECK(kl_gamma(3.0, 2.0, 3.0, 2.0 * (1.0 + 1e-6)) > 0.0);
    CHECK_THROWS_AS(kl_gamma(0.0, 1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(kl_gamma(1.0, 1.0, 1.0, 0.0), DomainError);

    Rng rng(24);
    const double a1 = 3.2, b1 = 1.7, a2 = 2.1, b2 = 0.9;
    std::gamma_distribution<double> g(a1, 1.0 / b1);
    const auto mc = monte_carlo(1000000, [&] {
        const double x = g(rng);
        return log_gamma_pdf(x, a1, b1) - log_gamma_pdf(x, a2, b2);
    });
    CHECK(std::abs(kl_gamma(a1, b1, a2, b2) - mc.mean) < 3.0 * mc.se);
}

TEST_CASE("gamma_moments") {
    const auto m11 = gamma_moments(1.0, 1.0);
    CHECK(m11.mean == 1.0);
    CHECK(m11.log_mean == doctest::Approx(-kEuler).epsilon(1e-12));
    const auto m33 = gamma_moments(3.0, 3.0);
    CHECK(m33.mean == doctest::Approx(1.0).epsilon(1e-15));
    // psi(3) = 1 + 1/2 - gamma
    CHECK(m33.log_mean == doctest::Approx(1.5 - kEuler - std::log(3.0)).epsilon(1e-12));

    Rng rng(25);
    for (auto [a, b] : {std::pair{0.7, 2.0}, std::pair{4.5, 0.3}}) {
        std::gamma_distribution<double> g(a, 1.0 / b);
        std::vector<double> draws(1000000);
        for (auto& d : draws) d = g(rng);
        std::size_t i = 0;
        const auto mean = monte_carlo(draws.size(), [&] { return draws[i++]; });
        i = 0;
        const auto log_mean = monte_carlo(draws.size(), [&] { return std::log(draws[i++]); });
        const auto m = gamma_moments(a, b);
        CHECK(std::abs(m.mean - mean.mean) < 3.0 * mean.se);
        CHECK(std::abs(m.log_mean - log_mean.mean) < 3.0 * log_mean.se);
    }
}

TEST_CASE("expected quadratic form") {
    // <x'Ax> = mu'A mu + tr(A Sigma) for x ~ N(mu, Sigma).
    Rng rng(26);
    const Vector mu = normal_matrix(rng, 4, 1);
    const Matrix sigma = random_spd(rng, 4);
    const Matrix a = random_spd(rng, 4);
    MvnSampler draw(mu, sigma);
    const auto mc = monte_carlo(1000000, [&] {
        const Vector x = draw(rng);
        return x.dot(a * x);
    });
    const double expected = mu.dot(a * mu) + (a * sigma).trace();
    CHECK(std::abs(expected - mc.mean) < 3.0 * mc.se);
}
