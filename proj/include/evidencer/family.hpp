/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_FAMILY_HPP
#define EVIDENCER_FAMILY_HPP

#include "evidencer/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace evidencer::family {

struct Family {
    std::string name;
    std::vector<std::size_t> models;
    /// Within-family prior p(m|f), parallel to `models`. Empty means uniform.
    std::vector<double> weights;
};

/// Disjoint, non-empty families covering models [0, model_count).
class FamilyPartition {
public:
    FamilyPartition(std::vector<Family> families, std::size_t model_count);

    const std::vector<Family>& families() const noexcept { return families_; }
    std::size_t size() const noexcept { return families_.size(); }
    std::size_t model_count() const noexcept { return model_count_; }

private:
    std::vector<Family> families_;
    std::size_t model_count_;
};

/// families x voxels log family evidences from a models x voxels LME matrix.
/// Non-uniform weights shift each LME by log p(m|f) + log M_f; a zero weight
/// drops the model.
Matrix log_family_evidence(const LmeMatrix& lme, const FamilyPartition& partition);

} // namespace evidencer::family

#endif
