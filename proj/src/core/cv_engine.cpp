/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/cv_engine.hpp"

#include "evidencer/errors.hpp"

#include <algorithm>
#include <string>

namespace evidencer::cv {

using glm::GlmSpec;
using glm::SufficientStats;
using glm::VoxelWiseNg;

namespace {

void check_sessions(std::span<const SufficientStats> sessions) {
    if (sessions.size() < 2) {
        throw LayoutError("cross-validation needs at least two sessions, got " +
                          std::to_string(sessions.size()));
    }
    const Index p = sessions.front().regressors();
    const Index v = sessions.front().voxels();
    for (const auto& s : sessions) {
        if (s.regressors() != p) throw DomainError("sessions differ in regressor count");
        if (s.voxels() != v) throw DomainError("sessions differ in voxel count");
    }
}

std::vector<SufficientStats> session_stats(std::span<const GlmSpec> sessions) {
    std::vector<SufficientStats> out;
    out.reserve(sessions.size());
    for (const auto& s : sessions) out.push_back(SufficientStats::from(s));
    return out;
}

FoldEvidence evaluate_fold(const SufficientStats& test, const SufficientStats& train,
                           const VoxelWiseNg& all_data_post) {
    const Index p = test.regressors();
    const Index v = test.voxels();
    const auto flat = VoxelWiseNg::broadcast(dist::NgParams::non_informative(p), v);
    const auto train_post = glm::posterior_update(train, flat);
    FoldEvidence fold;
    fold.lme = glm::log_model_evidence(test, train_post, all_data_post);
    fold.acc = glm::accuracy(test, all_data_post);
    fold.com = glm::complexity(train_post, all_data_post);
    return fold;
}

} // namespace

void SessionLayout::validate() const {
    if (sessions.size() < 2) throw LayoutError("a session layout needs at least two folds");
    std::vector<int> hits(static_cast<std::size_t>(total_scans), 0);
    auto mark = [&](Index i) {
        if (i < 0 || i >= total_scans) throw LayoutError("scan index out of range");
        ++hits[static_cast<std::size_t>(i)];
    };
    for (const auto& r : sessions) {
        if (r.size() <= 0) throw LayoutError("empty session range");
        for (Index i = r.begin; i < r.end; ++i) mark(i);
    }
    for (Index i : discarded) mark(i);
    if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) {
        throw LayoutError("session ranges and discarded scans must cover every scan exactly once");
    }
}

SessionLayout split_single_session(Index n, Index min_scans) {
    if (n < min_scans) {
        throw LayoutError("single-session split needs at least " + std::to_string(min_scans) +
                          " scans, got " + std::to_string(n));
    }
    const Index gap = (n % 2 == 0) ? 10 : 11;
    const Index half = (n - gap) / 2;
    SessionLayout layout;
    layout.total_scans = n;
    layout.sessions = {{0, half}, {half + gap, n}};
    for (Index i = half; i < half + gap; ++i) layout.discarded.push_back(i);
    return layout;
}

SessionLayout multi_session_layout(std::span<const Index> lengths) {
    SessionLayout layout;
    Index at = 0;
    for (Index len : lengths) {
        layout.sessions.push_back({at, at + len});
        at += len;
    }
    layout.total_scans = at;
    layout.validate();
    return layout;
}

std::vector<GlmSpec> partition(const GlmSpec& whole, const SessionLayout& layout) {
    layout.validate();
    if (layout.total_scans != whole.scans()) {
        throw LayoutError("layout covers " + std::to_string(layout.total_scans) +
                          " scans but the data have " + std::to_string(whole.scans()));
    }
    std::vector<GlmSpec> out;
    out.reserve(layout.folds());
    for (const auto& r : layout.sessions) out.push_back(whole.rows(r.begin, r.size()));
    return out;
}

FoldEvidence oos_lme(std::span<const GlmSpec> sessions, std::size_t fold) {
    if (fold >= sessions.size()) {
        throw LayoutError("fold index " + std::to_string(fold) + " out of range for " +
                          std::to_string(sessions.size()) + " sessions");
    }
    const auto stats = session_stats(sessions);
    check_sessions(stats);
    auto train = SufficientStats::zero(stats.front().regressors(), stats.front().voxels());
    for (std::size_t j = 0; j < stats.size(); ++j) {
        if (j != fold) train += stats[j];
    }
    const Index p = train.regressors();
    const auto flat = VoxelWiseNg::broadcast(dist::NgParams::non_informative(p), train.voxels());
    const auto train_post = glm::posterior_update(train, flat);
    const auto post = glm::posterior_update(stats[fold], train_post);
    FoldEvidence out;
    out.lme = glm::log_model_evidence(stats[fold], train_post, post);
    out.acc = glm::accuracy(stats[fold], post);
    out.com = glm::complexity(train_post, post);
    return out;
}

FoldEvidence oos_lme(const GlmSpec& whole, const SessionLayout& layout, std::size_t fold) {
    const auto parts = partition(whole, layout);
    return oos_lme(parts, fold);
}

ModelCv cv_lme(std::span<const SufficientStats> sessions) {
    check_sessions(sessions);
    const Index p = sessions.front().regressors();
    const Index v = sessions.front().voxels();
    auto total = SufficientStats::zero(p, v);
    for (const auto& s : sessions) total += s;

    const auto flat = VoxelWiseNg::broadcast(dist::NgParams::non_informative(p), v);
    const auto all_data_post = glm::posterior_update(total, flat);

    ModelCv out;
    out.cv_lme = Vector::Zero(v);
    out.cv_acc = Vector::Zero(v);
    out.cv_com = Vector::Zero(v);
    for (const auto& test : sessions) {
        auto fold = evaluate_fold(test, total - test, all_data_post);
        out.cv_lme += fold.lme;
        out.cv_acc += fold.acc;
        out.cv_com += fold.com;
        out.folds.push_back(std::move(fold));
    }
    return out;
}

ModelCv cv_lme(std::span<const GlmSpec> sessions) {
    const auto stats = session_stats(sessions);
    return cv_lme(std::span<const SufficientStats>(stats));
}

ModelCv cv_lme(const GlmSpec& whole, const SessionLayout& layout) {
    const auto parts = partition(whole, layout);
    return cv_lme(std::span<const GlmSpec>(parts));
}

CvResult assemble(std::span<const ModelCv> models) {
    if (models.empty()) throw DomainError("no models to assemble");
    const auto m = static_cast<Index>(models.size());
    const Index v = models.front().cv_lme.size();
    const std::size_t s = models.front().folds.size();
    CvResult out;
    out.cv_lme.resize(m, v);
    out.cv_acc.resize(m, v);
    out.cv_com.resize(m, v);
    out.oos_lme.assign(s, Matrix(m, v));
    out.oos_acc.assign(s, Matrix(m, v));
    out.oos_com.assign(s, Matrix(m, v));
    for (Index i = 0; i < m; ++i) {
        const auto& mc = models[static_cast<std::size_t>(i)];
        if (mc.cv_lme.size() != v || mc.folds.size() != s) {
            throw DomainError("models differ in voxel or fold count");
        }
        out.cv_lme.row(i) = mc.cv_lme.transpose();
        out.cv_acc.row(i) = mc.cv_acc.transpose();
        out.cv_com.row(i) = mc.cv_com.transpose();
        for (std::size_t f = 0; f < s; ++f) {
            out.oos_lme[f].row(i) = mc.folds[f].lme.transpose();
            out.oos_acc[f].row(i) = mc.folds[f].acc.transpose();
            out.oos_com[f].row(i) = mc.folds[f].com.transpose();
        }
    }
    return out;
}

} // namespace evidencer::cv
