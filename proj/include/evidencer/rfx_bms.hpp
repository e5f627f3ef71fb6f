/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_RFX_BMS_HPP
#define EVIDENCER_RFX_BMS_HPP

#include "evidencer/quadrature.hpp"
#include "evidencer/types.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace evidencer::rfx {

/// Per-subject models x voxels LME matrices of one group.
struct GroupLmeStack {
    std::vector<LmeMatrix> lme;
    std::vector<std::string> subject_ids;

    Index subjects() const noexcept { return static_cast<Index>(lme.size()); }
    Index models() const noexcept { return lme.empty() ? 0 : lme.front().rows(); }
    Index voxels() const noexcept { return lme.empty() ? 0 : lme.front().cols(); }

    /// N >= 2, k >= 2, equal shapes, finite entries. Throws DomainError.
    void validate() const;

    /// subjects x models LMEs of voxel v.
    Matrix voxel(Index v) const;
};

struct RfxOptions {
    double alpha0 = 1.0;
    double tol = 1e-4;
    int max_iter = 200;
};

struct DirichletPosterior {
    Matrix alpha;          // models x voxels
    double alpha0 = 1.0;
    Matrix expected_freq;  // alpha / sum(alpha) per voxel
    Matrix ep;             // filled by exceedance_probabilities()
    std::vector<std::uint8_t> converged;
    std::vector<int> iterations;

    std::size_t non_converged() const;
};

struct RfxVoxelFit {
    Vector alpha;
    int iterations = 0;
    bool converged = false;
};

/// Variational fixed point for one voxel from a subjects x models LME
/// matrix: responsibilities g_nj proportional to
/// exp(LME_nj + psi(alpha_j) - psi(sum alpha)), then alpha_j = alpha0 + sum_n g_nj,
/// until max |delta alpha| < tol or max_iter iterations.
RfxVoxelFit estimate_rfx_voxel(const Matrix& lme, const RfxOptions& options = {});

/// Voxel-wise estimation. Non-convergence is flagged, not thrown.
DirichletPosterior estimate_rfx(const GroupLmeStack& group, const RfxOptions& options = {});

enum class EpMethod { ClosedForm, Sampling, Integration };

EpMethod parse_ep_method(const std::string& name);
std::string to_string(EpMethod method);

/// Two-model exceedance probabilities through the Beta CDF at 1/2.
Vector ep_beta_closed_form(const Vector& alpha);

/// Gamma(shape, 1) variates by Marsaglia-Tsang rejection; shape < 1 goes
/// through the Gamma(shape + 1) * U^(1/shape) boost.
class GammaSampler {
public:
    double operator()(double shape, std::mt19937_64& rng);

private:
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Minimum number of Dirichlet draws accepted by ep_sampling.
inline constexpr std::size_t kMinSamples = 10000;

/// Monte Carlo exceedance probabilities from `samples` Dirichlet draws.
/// Ties go to the lowest model index.
Vector ep_sampling(const Vector& alpha, std::size_t samples, std::mt19937_64& rng);
Vector ep_sampling(const Vector& alpha, std::size_t samples, std::uint64_t seed);

struct EpIntegration {
    Vector ep;                 // raw, not renormalised
    double sum_deviation = 0;  // sum(ep) - 1
    std::size_t panels = 0;    // panels of the accepted rule
};

/// Convergence threshold between successive panel doublings.
inline constexpr double kEpIntegrationTol = 1e-8;

/// phi_j = integral over q of prod_{i != j} P(alpha_i, q) * Gam(q; alpha_j, 1).
/// One log-uniform rule spanning every model's support is shared by all j
/// and doubled until successive estimates agree to kEpIntegrationTol.
EpIntegration ep_integration(const Vector& alpha, double rel_tail = special::kDefaultRelTail);

struct EpOptions {
    EpMethod method = EpMethod::Integration;
    std::size_t samples = 1000000;
    std::uint64_t seed = 0;
    double rel_tail = special::kDefaultRelTail;
};

struct EpDiagnostics {
    double max_sum_deviation = 0.0;
    std::size_t cache_hits = 0;
    std::size_t sampling_calls = 0;
};

/// models x voxels exceedance probabilities. Sampling draws from one engine
/// seeded by (options.seed, stream), consumed in voxel order; integration
/// results are reused for repeated alpha columns.
Matrix exceedance_probabilities(const Matrix& alpha, const EpOptions& options,
                                std::uint64_t stream = 0, EpDiagnostics* diagnostics = nullptr);

} // namespace evidencer::rfx

#endif
