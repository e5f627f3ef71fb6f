/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_CV_ENGINE_HPP
#define EVIDENCER_CV_ENGINE_HPP

#include "evidencer/glm_ng.hpp"
#include "evidencer/types.hpp"

#include <span>
#include <vector>

namespace evidencer::cv {

/// Half-open scan range [begin, end).
struct ScanRange {
    Index begin = 0;
    Index end = 0;
    Index size() const noexcept { return end - begin; }
    friend bool operator==(const ScanRange&, const ScanRange&) = default;
};

/// Partition of the scans of a data set into cross-validation folds.
struct SessionLayout {
    std::vector<ScanRange> sessions;
    std::vector<Index> discarded;
    Index total_scans = 0;

    std::size_t folds() const noexcept { return sessions.size(); }

    /// Ranges disjoint, union with `discarded` covers [0, total_scans)
    /// exactly once, at least two folds. Throws LayoutError.
    void validate() const;
};

/// Default lower bound on the scan count for the single-session split.
inline constexpr Index kMinSplitScans = 40;

/// Split one session into two equal halves separated by a contiguous gap of
/// d discarded scans, where d is the smallest value in [10, 19] making n - d
/// even.
SessionLayout split_single_session(Index n, Index min_scans = kMinSplitScans);

/// Consecutive sessions of the given lengths, nothing discarded.
SessionLayout multi_session_layout(std::span<const Index> lengths);

/// Cut one GlmSpec into per-fold specs following `layout`.
std::vector<glm::GlmSpec> partition(const glm::GlmSpec& whole, const SessionLayout& layout);

/// Out-of-sample evidence of one fold, per voxel.
struct FoldEvidence {
    Vector lme;
    Vector acc;
    Vector com;
};

/// Cross-validated evidence of one model, per voxel.
struct ModelCv {
    Vector cv_lme;
    Vector cv_acc;
    Vector cv_com;
    std::vector<FoldEvidence> folds;
};

/// Cross-validated evidence of a model space: models x voxels matrices.
struct CvResult {
    LmeMatrix cv_lme;
    LmeMatrix cv_acc;
    LmeMatrix cv_com;
    std::vector<LmeMatrix> oos_lme;
    std::vector<LmeMatrix> oos_acc;
    std::vector<LmeMatrix> oos_com;

    std::size_t folds() const noexcept { return oos_lme.size(); }
};

/// oosLME/Acc/Com of fold `fold`: the posterior trained on all other
/// sessions from the non-informative prior serves as the prior of the
/// held-out session.
FoldEvidence oos_lme(std::span<const glm::GlmSpec> sessions, std::size_t fold);
FoldEvidence oos_lme(const glm::GlmSpec& whole, const SessionLayout& layout, std::size_t fold);

/// Sums of out-of-sample quantities over folds. Session statistics are
/// computed once; each training posterior comes from the total minus the
/// held-out session, and the all-data posterior is shared by every fold.
ModelCv cv_lme(std::span<const glm::GlmSpec> sessions);
ModelCv cv_lme(const glm::GlmSpec& whole, const SessionLayout& layout);

/// Same as above from precomputed per-session statistics.
ModelCv cv_lme(std::span<const glm::SufficientStats> sessions);

/// Stack per-model results into a CvResult. All models must share the
/// fold count and voxel count.
CvResult assemble(std::span<const ModelCv> models);

} // namespace evidencer::cv

#endif
