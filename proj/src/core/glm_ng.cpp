/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/glm_ng.hpp"

#include "evidencer/errors.hpp"
#include "evidencer/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace evidencer::glm {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

std::string dims(Index r, Index c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

Eigen::LLT<Matrix> cholesky_or_throw(const Matrix& m, const char* what) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw DecompositionError(std::string(what) + " is not positive definite");
    }
    return llt;
}

double llt_log_det(const Eigen::LLT<Matrix>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Element-wise log through std::log: packet and scalar paths differ in the
// last bit, and which path a voxel takes depends on the batch width.
Eigen::ArrayXd scalar_log(const Eigen::ArrayXd& x) {
    return x.unaryExpr([](double t) { return std::log(t); });
}

// Voxel-wise kernels copy each column into a reused buffer before any
// product. Matrix products over many columns pick blocking and alignment
// from the column count, so results would otherwise depend on batching.

constexpr double kRankTol = 1e-13;

void require_rank(const Matrix& xtpx) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(xtpx, Eigen::EigenvaluesOnly);
    const Vector& ev = eig.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    // Gram eigenvalues carry O(eps * top) rounding, so the cut sits just above it.
    if (!(top > 0.0) || ev.minCoeff() <= kRankTol * top) {
        throw EstimationError(
            "design matrix is rank deficient; a non-informative prior cannot be updated");
    }
}

} // namespace

// ---------------------------------------------------------------- Precision

Precision Precision::identity(Index n) {
    Precision p;
    p.kind_ = Kind::Identity;
    p.n_ = n;
    return p;
}

Precision Precision::diagonal(Vector d) {
    if (!(d.array() > 0.0).all() || !d.allFinite()) {
        throw DecompositionError("diagonal precision must have positive finite entries");
    }
    Precision p;
    p.kind_ = Kind::Diagonal;
    p.n_ = d.size();
    p.log_det_ = d.array().log().sum();
    p.diag_ = std::move(d);
    return p;
}

Precision Precision::full(Matrix m) {
    if (m.rows() != m.cols()) throw DecompositionError("precision matrix is not square");
    if (!dist::is_symmetric(m)) throw DecompositionError("precision matrix is not symmetric");
    Precision p;
    p.kind_ = Kind::Full;
    p.n_ = m.rows();
    p.log_det_ = llt_log_det(cholesky_or_throw(m, "precision matrix"));
    p.full_ = std::move(m);
    return p;
}

Matrix Precision::apply(const Matrix& a) const {
    switch (kind_) {
    case Kind::Identity:
        return a;
    case Kind::Diagonal:
        return diag_.asDiagonal() * a;
    case Kind::Full:
        break;
    }
    return full_ * a;
}

Precision Precision::block(Index start, Index length) const {
    if (start < 0 || length < 0 || start + length > n_) {
        throw LayoutError("precision block out of range");
    }
    switch (kind_) {
    case Kind::Identity:
        return identity(length);
    case Kind::Diagonal:
        return diagonal(diag_.segment(start, length));
    case Kind::Full:
        break;
    }
    return full(full_.block(start, start, length, length));
}

Matrix Precision::dense() const {
    switch (kind_) {
    case Kind::Identity:
        return Matrix::Identity(n_, n_);
    case Kind::Diagonal:
        return diag_.asDiagonal();
    case Kind::Full:
        break;
    }
    return full_;
}

// ---------------------------------------------------------------- GlmSpec

void GlmSpec::validate() const {
    const Index n = scans();
    const Index p = regressors();
    if (y.rows() != n) {
        throw DomainError("response has " + std::to_string(y.rows()) + " scans but design has " +
                          std::to_string(n));
    }
    if (precision.size() != n) {
        throw DomainError("precision is " + dims(precision.size(), precision.size()) +
                          " but there are " + std::to_string(n) + " scans");
    }
    if (p < 1) throw DomainError("design matrix has no regressors");
    if (n < p + 1) {
        throw DomainError("need at least p + 1 = " + std::to_string(p + 1) + " scans, got " +
                          std::to_string(n));
    }
    if (!x.allFinite() || !y.allFinite()) throw DomainError("non-finite data or design entries");
}

GlmSpec GlmSpec::rows(Index start, Index length) const {
    if (start < 0 || length < 0 || start + length > scans()) {
        throw LayoutError("scan range out of bounds");
    }
    return {y.middleRows(start, length), x.middleRows(start, length),
            precision.block(start, length)};
}

GlmSpec GlmSpec::voxel_slice(Index start, Index count) const {
    return {y.middleCols(start, count), x, precision};
}

// ---------------------------------------------------------------- SufficientStats

SufficientStats SufficientStats::zero(Index p, Index voxels) {
    return {0, Matrix::Zero(p, p), Matrix::Zero(p, voxels), Vector::Zero(voxels), 0.0};
}

SufficientStats SufficientStats::from(const GlmSpec& spec) {
    spec.validate();
    const Matrix px = spec.precision.apply(spec.x);
    SufficientStats s;
    s.n = spec.scans();
    s.xtpx = spec.x.transpose() * px;
    s.xtpx = 0.5 * (s.xtpx + s.xtpx.transpose()).eval();
    s.xtpy.resize(spec.regressors(), spec.voxels());
    s.ytpy.resize(spec.voxels());
    Vector yv(spec.scans());
    for (Index v = 0; v < spec.voxels(); ++v) {
        yv = spec.y.col(v);
        const Matrix pyv = spec.precision.apply(yv);
        s.xtpy.col(v) = px.transpose() * yv;
        s.ytpy(v) = yv.dot(pyv.col(0));
    }
    s.log_det_p = spec.precision.log_det();
    return s;
}

SufficientStats& SufficientStats::operator+=(const SufficientStats& other) {
    if (other.regressors() != regressors() || other.voxels() != voxels()) {
        throw DomainError("sufficient statistics have mismatched dimensions");
    }
    n += other.n;
    xtpx += other.xtpx;
    xtpy += other.xtpy;
    ytpy += other.ytpy;
    log_det_p += other.log_det_p;
    return *this;
}

SufficientStats& SufficientStats::operator-=(const SufficientStats& other) {
    if (other.regressors() != regressors() || other.voxels() != voxels()) {
        throw DomainError("sufficient statistics have mismatched dimensions");
    }
    n -= other.n;
    xtpx -= other.xtpx;
    xtpy -= other.xtpy;
    ytpy -= other.ytpy;
    log_det_p -= other.log_det_p;
    return *this;
}

SufficientStats operator+(SufficientStats lhs, const SufficientStats& rhs) {
    lhs += rhs;
    return lhs;
}

SufficientStats operator-(SufficientStats lhs, const SufficientStats& rhs) {
    lhs -= rhs;
    return lhs;
}

// ---------------------------------------------------------------- VoxelWiseNg

VoxelWiseNg VoxelWiseNg::broadcast(const dist::NgParams& params, Index voxels) {
    if (params.lambda.rows() != params.dim() || params.lambda.cols() != params.dim()) {
        throw DomainError("normal-gamma lambda does not match mu");
    }
    return {params.mu.replicate(1, voxels), params.lambda, params.a,
            Vector::Constant(voxels, params.b)};
}

dist::NgParams VoxelWiseNg::voxel(Index v) const {
    return {mu.col(v), lambda, a, b(v)};
}

bool VoxelWiseNg::is_non_informative() const {
    return a == 0.0 && b.isZero(0.0) && mu.isZero(0.0) && lambda.isZero(0.0);
}

void VoxelWiseNg::require_proper(const char* what) const {
    if (!(a > 0.0) || !std::isfinite(a) || !(b.array() > 0.0).all() || !b.allFinite()) {
        throw DomainError(std::string(what) + " must be proper (a > 0, b > 0)");
    }
    if (!dist::is_symmetric(lambda) || Eigen::LLT<Matrix>(lambda).info() != Eigen::Success) {
        throw DomainError(std::string(what) + " must be proper (lambda positive definite)");
    }
}

// ---------------------------------------------------------------- inference

VoxelWisePosterior posterior_update(const SufficientStats& stats, const VoxelWiseNg& prior) {
    const Index p = prior.dim();
    const Index v = prior.voxels();
    if (stats.regressors() != p || stats.voxels() != v || prior.mu.rows() != p ||
        prior.mu.cols() != v) {
        throw DomainError("posterior_update: prior is " + dims(p, v) + " but data are " +
                          dims(stats.regressors(), stats.voxels()));
    }
    if (!(prior.a >= 0.0) || !(prior.b.array() >= 0.0).all()) {
        throw DomainError("posterior_update: prior a and b must be non-negative");
    }
    if (stats.n == 0) return prior;

    VoxelWisePosterior post;
    post.lambda = stats.xtpx + prior.lambda;
    const bool flat = prior.lambda.isZero(0.0);
    if (flat) require_rank(stats.xtpx);
    Eigen::LLT<Matrix> llt(post.lambda);
    if (llt.info() != Eigen::Success) {
        if (flat) {
            throw EstimationError(
                "design matrix is rank deficient; a non-informative prior cannot be updated");
        }
        throw DecompositionError("posterior precision lambda_n is not positive definite");
    }

    post.a = prior.a + 0.5 * static_cast<double>(stats.n);
    post.mu.resize(p, v);
    post.b.resize(v);
    Vector mu0(p), rhs(p), mu(p);
    for (Index i = 0; i < v; ++i) {
        mu0 = prior.mu.col(i);
        const Vector prior_term = prior.lambda * mu0;
        rhs = stats.xtpy.col(i);
        rhs += prior_term;
        mu = llt.solve(rhs);
        post.mu.col(i) = mu;
        post.b(i) = prior.b(i) + 0.5 * (stats.ytpy(i) + mu0.dot(prior_term) - mu.dot(rhs));
    }
    for (Index i = 0; i < v; ++i) {
        if (!(post.b(i) > 0.0)) {
            throw NumericError("posterior rate b_n is not positive at voxel " + std::to_string(i) +
                               " (exact fit or ill-conditioned design)");
        }
    }
    return post;
}

VoxelWisePosterior posterior_update(const GlmSpec& spec, const VoxelWiseNg& prior) {
    return posterior_update(SufficientStats::from(spec), prior);
}

Vector log_model_evidence(const SufficientStats& stats, const VoxelWiseNg& prior,
                          const VoxelWisePosterior& post) {
    prior.require_proper("log_model_evidence prior");
    if (std::fabs(post.a - prior.a - 0.5 * static_cast<double>(stats.n)) >
        1e-9 * std::max(1.0, post.a)) {
        throw DomainError("log_model_evidence: posterior is not the update of this prior");
    }
    const double log_det_prior = llt_log_det(cholesky_or_throw(prior.lambda, "prior lambda"));
    const double log_det_post = llt_log_det(cholesky_or_throw(post.lambda, "posterior lambda"));
    using special::log_gamma;
    const double shared = 0.5 * stats.log_det_p - 0.5 * static_cast<double>(stats.n) * kLog2Pi +
                          0.5 * log_det_prior - 0.5 * log_det_post + log_gamma(post.a) -
                          log_gamma(prior.a);
    return (shared + prior.a * scalar_log(prior.b.array()) - post.a * scalar_log(post.b.array())).matrix();
}

Vector log_model_evidence(const GlmSpec& spec, const VoxelWiseNg& prior,
                          const VoxelWisePosterior& post) {
    return log_model_evidence(SufficientStats::from(spec), prior, post);
}

Vector accuracy(const SufficientStats& stats, const VoxelWisePosterior& post) {
    post.require_proper("accuracy posterior");
    const auto llt = cholesky_or_throw(post.lambda, "posterior lambda");
    const double trace = llt.solve(stats.xtpx).trace();
    const double n = static_cast<double>(stats.n);
    // (y - X mu)' P (y - X mu) per voxel, expanded in sufficient statistics.
    Vector resid(post.voxels());
    Vector mu(post.dim()), xy(post.dim());
    for (Index v = 0; v < post.voxels(); ++v) {
        mu = post.mu.col(v);
        xy = stats.xtpy.col(v);
        const Vector xxmu = stats.xtpx * mu;
        resid(v) = stats.ytpy(v) - 2.0 * mu.dot(xy) + mu.dot(xxmu);
    }
    const double shared = -0.5 * trace + 0.5 * stats.log_det_p - 0.5 * n * kLog2Pi +
                          0.5 * n * special::digamma(post.a);
    const auto b = post.b.array();
    return (-0.5 * post.a * resid.array() / b + shared - 0.5 * n * scalar_log(b)).matrix();
}

Vector accuracy(const GlmSpec& spec, const VoxelWisePosterior& post) {
    return accuracy(SufficientStats::from(spec), post);
}

Vector complexity(const VoxelWiseNg& prior, const VoxelWisePosterior& post) {
    prior.require_proper("complexity prior");
    post.require_proper("complexity posterior");
    if (prior.dim() != post.dim() || prior.voxels() != post.voxels()) {
        throw DomainError("complexity: prior and posterior dimensions differ");
    }
    const auto llt_post = cholesky_or_throw(post.lambda, "posterior lambda");
    const double log_det_prior = llt_log_det(cholesky_or_throw(prior.lambda, "prior lambda"));
    const double log_det_post = llt_log_det(llt_post);
    const double trace = llt_post.solve(prior.lambda).trace();

    using special::digamma;
    using special::log_gamma;
    Vector quad(post.voxels());
    Vector diff(post.dim());
    for (Index v = 0; v < post.voxels(); ++v) {
        diff = prior.mu.col(v) - post.mu.col(v);
        const Vector ld = prior.lambda * diff;
        quad(v) = diff.dot(ld);
    }
    const double shared = 0.5 * trace - 0.5 * (log_det_prior - log_det_post) -
                          0.5 * static_cast<double>(prior.dim()) -
                          (log_gamma(post.a) - log_gamma(prior.a)) +
                          (post.a - prior.a) * digamma(post.a);
    const auto bn = post.b.array();
    const auto b0 = prior.b.array();
    return (0.5 * (post.a / bn) * (quad.array() - 2.0 * (bn - b0)) + shared +
            prior.a * scalar_log(bn / b0))
        .matrix();
}

} // namespace evidencer::glm
