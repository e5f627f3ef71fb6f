/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/bma.hpp"

#include "evidencer/errors.hpp"

#include <cmath>

namespace evidencer::bma {

namespace {

// exp() overflows above ~709.78.
constexpr double kMaxExponent = 700.0;

void check_pp(const PosteriorProbs& pp, Index models, Index voxels) {
    if (pp.pp.rows() != models || pp.pp.cols() != voxels) {
        throw DomainError("posterior probabilities are " + std::to_string(pp.pp.rows()) + "x" +
                          std::to_string(pp.pp.cols()) + " but betas are " +
                          std::to_string(models) + "x" + std::to_string(voxels));
    }
}

} // namespace

void BetaStack::validate() const {
    if (beta_hat.empty()) throw DomainError("beta stack is empty");
    for (const auto& b : beta_hat) {
        if (b.rows() != sessions() || b.cols() != voxels()) {
            throw DomainError("beta stack models differ in session or voxel count");
        }
        if (!b.allFinite()) throw DomainError("beta stack has non-finite entries");
    }
    if (sessions() < 1) throw DomainError("beta stack has no sessions");
}

Matrix BetaStack::session_means() const {
    validate();
    Matrix means(models(), voxels());
    for (Index i = 0; i < models(); ++i) {
        means.row(i) = beta_hat[static_cast<std::size_t>(i)].colwise().mean();
    }
    return means;
}

PosteriorProbs posterior_probabilities(const LmeMatrix& lme, const Vector& prior) {
    const Index m = lme.rows();
    if (m < 1) throw DomainError("posterior probabilities need at least one model");
    if (!lme.allFinite()) throw DomainError("LMEs must be finite");
    PosteriorProbs out;
    out.prior = prior.size() == 0 ? Vector::Constant(m, 1.0 / static_cast<double>(m)) : prior;
    if (out.prior.size() != m) throw DomainError("prior length does not match model count");
    if (!(out.prior.array() >= 0.0).all() || std::fabs(out.prior.sum() - 1.0) > 1e-10) {
        throw DomainError("model prior must be non-negative and sum to 1");
    }

    Eigen::ArrayXXd shifted = lme.array().rowwise() - lme.array().colwise().mean();
    // Mean-shifting leaves the largest exponent above kMaxExponent only for
    // extreme spreads; those columns fall back to a max shift.
    for (Index v = 0; v < lme.cols(); ++v) {
        if (shifted.col(v).maxCoeff() > kMaxExponent) {
            shifted.col(v) = lme.col(v).array() - lme.col(v).maxCoeff();
        }
    }
    Eigen::ArrayXXd weighted =
        shifted.unaryExpr([](double t) { return std::exp(t); }).colwise() * out.prior.array();
    const Eigen::ArrayXXd sums = weighted.colwise().sum();
    for (Index v = 0; v < lme.cols(); ++v) {
        if (!(sums(0, v) > 0.0)) {
            throw DomainError("all posterior weights vanish at voxel " + std::to_string(v));
        }
    }
    out.pp = (weighted.rowwise() / sums.row(0)).matrix();
    return out;
}

Vector cv_bma(const BetaStack& betas, const PosteriorProbs& pp) {
    const Matrix means = betas.session_means();
    check_pp(pp, betas.models(), betas.voxels());
    return means.cwiseProduct(pp.pp).colwise().sum().transpose();
}

Vector oos_bma(const BetaStack& betas, std::span<const PosteriorProbs> per_session) {
    betas.validate();
    if (static_cast<Index>(per_session.size()) != betas.sessions()) {
        throw DomainError("need one PP set per session: got " + std::to_string(per_session.size()) +
                          " for " + std::to_string(betas.sessions()) + " sessions");
    }
    Vector total = Vector::Zero(betas.voxels());
    for (Index j = 0; j < betas.sessions(); ++j) {
        const auto& pp = per_session[static_cast<std::size_t>(j)];
        check_pp(pp, betas.models(), betas.voxels());
        for (Index i = 0; i < betas.models(); ++i) {
            total += betas.beta_hat[static_cast<std::size_t>(i)].row(j).transpose().cwiseProduct(
                pp.pp.row(i).transpose());
        }
    }
    return total / static_cast<double>(betas.sessions());
}

} // namespace evidencer::bma
