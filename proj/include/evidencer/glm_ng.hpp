/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_GLM_NG_HPP
#define EVIDENCER_GLM_NG_HPP

#include "evidencer/distributions.hpp"
#include "evidencer/types.hpp"

namespace evidencer::glm {

/// Observation precision P of one session (noise covariance is (tau P)^-1).
/// Identity and diagonal precisions are stored compactly; log|P| is cached.
class Precision {
public:
    enum class Kind { Identity, Diagonal, Full };

    Precision() = default;

    static Precision identity(Index n);
    static Precision diagonal(Vector d);
    static Precision full(Matrix p);

    Kind kind() const noexcept { return kind_; }
    Index size() const noexcept { return n_; }
    double log_det() const noexcept { return log_det_; }

    /// P * a
    Matrix apply(const Matrix& a) const;

    /// Precision of the scans [start, start + length).
    Precision block(Index start, Index length) const;

    Matrix dense() const;

private:
    Kind kind_ = Kind::Identity;
    Index n_ = 0;
    Vector diag_;
    Matrix full_;
    double log_det_ = 0.0;
};

/// One session of one model: y (n x V), X (n x p), P (n x n).
struct GlmSpec {
    Matrix y;
    Matrix x;
    Precision precision;

    Index scans() const noexcept { return x.rows(); }
    Index regressors() const noexcept { return x.cols(); }
    Index voxels() const noexcept { return y.cols(); }

    /// Dimensions agree and n >= p + 1. Throws DomainError.
    void validate() const;

    /// Scans [start, start + length), with the matching block of P.
    GlmSpec rows(Index start, Index length) const;

    /// Voxels [start, start + count).
    GlmSpec voxel_slice(Index start, Index count) const;
};

/// Additive data summary of a GlmSpec: X'PX, X'PY, diag(Y'PY), n, log|P|.
/// Summing the statistics of two blocks equals the statistics of the
/// concatenated block.
struct SufficientStats {
    Index n = 0;
    Matrix xtpx;
    Matrix xtpy;
    Vector ytpy;
    double log_det_p = 0.0;

    static SufficientStats zero(Index p, Index voxels);
    static SufficientStats from(const GlmSpec& spec);

    Index regressors() const noexcept { return xtpx.rows(); }
    Index voxels() const noexcept { return ytpy.size(); }

    SufficientStats& operator+=(const SufficientStats& other);
    SufficientStats& operator-=(const SufficientStats& other);
};

SufficientStats operator+(SufficientStats lhs, const SufficientStats& rhs);
SufficientStats operator-(SufficientStats lhs, const SufficientStats& rhs);

/// Normal-gamma parameters for V voxels at once. lambda and a depend only on
/// the design, so they are shared; mu (p x V) and b (V) are per voxel.
struct VoxelWiseNg {
    Matrix mu;
    Matrix lambda;
    double a = 0.0;
    Vector b;

    Index dim() const noexcept { return lambda.rows(); }
    Index voxels() const noexcept { return b.size(); }

    static VoxelWiseNg broadcast(const dist::NgParams& params, Index voxels);
    dist::NgParams voxel(Index v) const;

    bool is_non_informative() const;
    void require_proper(const char* what) const;
};

using VoxelWisePosterior = VoxelWiseNg;

/// Conjugate update of `prior` with the data summarised by `stats`:
///   lambda_n = X'PX + lambda_0
///   mu_n     = lambda_n^-1 (X'Py + lambda_0 mu_0)
///   a_n      = a_0 + n / 2
///   b_n      = b_0 + (y'Py + mu_0' lambda_0 mu_0 - mu_n' lambda_n mu_n) / 2
/// An empty block (n == 0) returns the prior unchanged.
VoxelWisePosterior posterior_update(const SufficientStats& stats, const VoxelWiseNg& prior);
VoxelWisePosterior posterior_update(const GlmSpec& spec, const VoxelWiseNg& prior);

/// Log marginal likelihood of the data in `stats` under a proper `prior`,
/// given `post` = posterior_update(stats, prior).
Vector log_model_evidence(const SufficientStats& stats, const VoxelWiseNg& prior,
                          const VoxelWisePosterior& post);
Vector log_model_evidence(const GlmSpec& spec, const VoxelWiseNg& prior,
                          const VoxelWisePosterior& post);

/// Posterior expected log-likelihood.
Vector accuracy(const SufficientStats& stats, const VoxelWisePosterior& post);
Vector accuracy(const GlmSpec& spec, const VoxelWisePosterior& post);

/// KL divergence of the posterior from the (proper) prior.
Vector complexity(const VoxelWiseNg& prior, const VoxelWisePosterior& post);

} // namespace evidencer::glm

#endif
