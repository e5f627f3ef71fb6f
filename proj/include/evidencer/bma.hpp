/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_BMA_HPP
#define EVIDENCER_BMA_HPP

#include "evidencer/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace evidencer::bma {

/// First-level estimates of one regressor: beta_hat[i] is the sessions x
/// voxels matrix of model i.
struct BetaStack {
    std::string regressor;
    std::vector<Matrix> beta_hat;

    Index models() const noexcept { return static_cast<Index>(beta_hat.size()); }
    Index sessions() const noexcept { return beta_hat.empty() ? 0 : beta_hat.front().rows(); }
    Index voxels() const noexcept { return beta_hat.empty() ? 0 : beta_hat.front().cols(); }

    void validate() const;

    /// models x voxels averages over sessions.
    Matrix session_means() const;
};

struct PosteriorProbs {
    Matrix pp;     // models x voxels
    Vector prior;  // length M
};

/// Posterior model probabilities from a models x voxels LME matrix. The
/// voxel-wise mean LME is subtracted before exponentiating; an empty prior
/// means uniform 1/M.
PosteriorProbs posterior_probabilities(const LmeMatrix& lme, const Vector& prior = {});

/// Session-wide (cross-validated) BMA: average over sessions first, then
/// weight by the cvLME-based posterior probabilities.
Vector cv_bma(const BetaStack& betas, const PosteriorProbs& pp);

/// Session-wise (out-of-sample) BMA with one PP set per session.
Vector oos_bma(const BetaStack& betas, std::span<const PosteriorProbs> per_session);

} // namespace evidencer::bma

#endif
