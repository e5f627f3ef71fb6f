/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/family.hpp"

#include "evidencer/errors.hpp"
#include "evidencer/special_functions.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace evidencer::family {

FamilyPartition::FamilyPartition(std::vector<Family> families, std::size_t model_count)
    : families_(std::move(families)), model_count_(model_count) {
    if (families_.empty()) throw DomainError("family partition is empty");
    std::vector<int> seen(model_count_, 0);
    std::set<std::string> names;
    for (const auto& f : families_) {
        if (f.models.empty()) throw DomainError("family '" + f.name + "' has no models");
        if (!names.insert(f.name).second) throw DomainError("duplicate family name '" + f.name + "'");
        for (std::size_t m : f.models) {
            if (m >= model_count_) {
                throw DomainError("family '" + f.name + "' references model " + std::to_string(m) +
                                  " outside the model space");
            }
            if (seen[m]++ > 0) {
                throw DomainError("families overlap at model " + std::to_string(m));
            }
        }
        if (!f.weights.empty()) {
            if (f.weights.size() != f.models.size()) {
                throw DomainError("family '" + f.name + "' has a weight count mismatch");
            }
            double sum = 0.0;
            for (double w : f.weights) {
                if (!(w >= 0.0) || !std::isfinite(w)) {
                    throw DomainError("family '" + f.name + "' has a negative weight");
                }
                sum += w;
            }
            if (std::fabs(sum - 1.0) > 1e-12) {
                throw DomainError("weights of family '" + f.name + "' do not sum to 1");
            }
        }
    }
    for (std::size_t m = 0; m < model_count_; ++m) {
        if (seen[m] == 0) {
            throw DomainError("model " + std::to_string(m) + " belongs to no family");
        }
    }
}

Matrix log_family_evidence(const LmeMatrix& lme, const FamilyPartition& partition) {
    if (static_cast<std::size_t>(lme.rows()) != partition.model_count()) {
        throw DomainError("LME matrix has " + std::to_string(lme.rows()) +
                          " models but the partition covers " +
                          std::to_string(partition.model_count()));
    }
    if (!lme.allFinite()) throw DomainError("LME entries must be finite");

    const Index voxels = lme.cols();
    Matrix lfe(static_cast<Index>(partition.size()), voxels);
    std::vector<double> buffer;
    for (std::size_t fi = 0; fi < partition.size(); ++fi) {
        const Family& f = partition.families()[fi];
        const double log_size = std::log(static_cast<double>(f.models.size()));
        // Additive shift per model: 0 for uniform, log p(m|f) + log M_f otherwise.
        std::vector<double> shift(f.models.size(), 0.0);
        if (!f.weights.empty()) {
            for (std::size_t i = 0; i < f.models.size(); ++i) {
                shift[i] = f.weights[i] > 0.0 ? std::log(f.weights[i]) + log_size
                                              : -std::numeric_limits<double>::infinity();
            }
        }
        buffer.resize(f.models.size());
        for (Index v = 0; v < voxels; ++v) {
            for (std::size_t i = 0; i < f.models.size(); ++i) {
                buffer[i] = lme(static_cast<Index>(f.models[i]), v) + shift[i];
            }
            const double lse = special::log_sum_exp(buffer);
            if (std::isinf(lse)) {
                throw DomainError("family '" + f.name + "' has no model with positive weight");
            }
            lfe(static_cast<Index>(fi), v) = lse - log_size;
        }
    }
    return lfe;
}

} // namespace evidencer::family
