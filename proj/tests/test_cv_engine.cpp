/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/cv_engine.hpp"
#include "evidencer/errors.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace evidencer;
using namespace evidencer::cv;
using namespace evidencer::testing;
using glm::GlmSpec;

namespace {

std::vector<GlmSpec> random_sessions(Rng& rng, Index sessions, Index p, Index voxels,
                                     PrecisionKind kind = PrecisionKind::Diagonal) {
    // Shared true betas make the sessions exchangeable.
    Matrix beta = normal_matrix(rng, p, voxels);
    std::vector<GlmSpec> out;
    for (Index s = 0; s < sessions; ++s) {
        const Index n = uniform_int(rng, p + 3, 25);
        auto spec = random_spec(rng, n, p, voxels, kind);
        spec.y = spec.x * beta + normal_matrix(rng, n, voxels, 0.7);
        out.push_back(std::move(spec));
    }
    return out;
}

Vector diag_of(const glm::Precision& p) {
    return p.dense().diagonal();
}

/// Stacks sessions into one GlmSpec with a diagonal precision.
GlmSpec concatenate(const std::vector<const GlmSpec*>& parts) {
    Index n = 0;
    for (const auto* s : parts) n += s->scans();
    const auto& first = *parts.front();
    GlmSpec out{Matrix(n, first.voxels()), Matrix(n, first.regressors()), {}};
    Vector d(n);
    Index row = 0;
    for (const auto* s : parts) {
        out.y.middleRows(row, s->scans()) = s->y;
        out.x.middleRows(row, s->scans()) = s->x;
        d.segment(row, s->scans()) = diag_of(s->precision);
        row += s->scans();
    }
    out.precision = glm::Precision::diagonal(d);
    return out;
}

/// Fold evidence recomputed from the raw training data without shortcuts.
FoldEvidence naive_fold(const std::vector<GlmSpec>& sessions, std::size_t fold) {
    std::vector<const GlmSpec*> train;
    for (std::size_t s = 0; s < sessions.size(); ++s) {
        if (s != fold) train.push_back(&sessions[s]);
    }
    const auto& test = sessions[fold];
    const auto ni = glm::VoxelWiseNg::broadcast(dist::NgParams::non_informative(test.regressors()),
                                                test.voxels());
    const auto prior = glm::posterior_update(concatenate(train), ni);
    const auto post = glm::posterior_update(test, prior);
    return {glm::log_model_evidence(test, prior, post), glm::accuracy(test, post),
            glm::complexity(prior, post)};
}

} // namespace

TEST_CASE("single-session split rule") {
    const auto l100 = split_single_session(100);
    REQUIRE(l100.folds() == 2);
    CHECK(l100.sessions[0] == ScanRange{0, 45});
    CHECK(l100.sessions[1] == ScanRange{55, 100});
    CHECK(l100.discarded.size() == 10);

    const auto l101 = split_single_session(101);
    CHECK(l101.discarded.size() == 11);
    CHECK(l101.sessions[0].size() == 45);
    CHECK(l101.sessions[1].size() == 45);

    CHECK_THROWS_AS(split_single_session(39), LayoutError);
    CHECK_NOTHROW(split_single_session(40));
    CHECK_THROWS_AS(split_single_session(45, 50), LayoutError);
    CHECK_NOTHROW(split_single_session(30, 30));

    for (Index n = 40; n <= 600; ++n) {
        const auto l = split_single_session(n);
        CHECK_NOTHROW(l.validate());
        const Index d = static_cast<Index>(l.discarded.size());
        CHECK(d >= 10);
        CHECK(d <= 11);
        CHECK((n - d) % 2 == 0);
        CHECK(l.sessions[0].size() == l.sessions[1].size());
        CHECK(l.sessions[0].begin == 0);
        CHECK(l.sessions[1].end == n);
    }
}

TEST_CASE("layout validation") {
    const std::vector<Index> lengths{10, 12, 9};
    const auto l = multi_session_layout(lengths);
    CHECK(l.folds() == 3);
    CHECK(l.total_scans == 31);
    CHECK(l.sessions[2] == ScanRange{22, 31});

    SessionLayout overlap{{{0, 10}, {9, 20}}, {}, 20};
    CHECK_THROWS_AS(overlap.validate(), LayoutError);
    SessionLayout gap{{{0, 10}, {11, 20}}, {}, 20};
    CHECK_THROWS_AS(gap.validate(), LayoutError);
    SessionLayout single{{{0, 20}}, {}, 20};
    CHECK_THROWS_AS(single.validate(), LayoutError);
    CHECK_THROWS_AS(multi_session_layout(std::vector<Index>{10}), LayoutError);
}

TEST_CASE("out-of-sample evidence") {
    Rng rng(51);
    SUBCASE("identical sessions give identical folds") {
        auto sessions = random_sessions(rng, 1, 2, 4);
        sessions.push_back(sessions.front());
        const auto f0 = oos_lme(sessions, 0);
        const auto f1 = oos_lme(sessions, 1);
        CHECK(max_rel_diff(f0.lme, f1.lme) < 1e-12);
        CHECK(max_rel_diff(f0.acc, f1.acc) < 1e-12);
    }
    SUBCASE("fold index out of range") {
        const auto sessions = random_sessions(rng, 3, 2, 2);
        CHECK_THROWS_AS(oos_lme(sessions, 3), LayoutError);
    }
    SUBCASE("brute-force predictive density") {
        // oosLME = log of int p(y_test|theta) p(y_train|theta) pi(theta)
        //          minus log of int p(y_train|theta) pi(theta), pi(beta, tau) ~ tau^(-1/2).
        for (int i = 0; i < 4; ++i) {
            std::vector<GlmSpec> sessions;
            for (Index n : {3, 3}) {
                Matrix x = normal_matrix(rng, n, 1).array() + 1.5;
                Matrix y = x * 0.8 + normal_matrix(rng, n, 1, 0.6);
                sessions.push_back({y, x, glm::Precision::identity(n)});
            }
            const double oos = oos_lme(sessions, 1).lme(0);
            ScalarJoint train;
            train.proper = false;
            train.y = sessions[0].y.col(0);
            train.x = sessions[0].x.col(0);
            train.precision = Matrix::Identity(3, 3);
            ScalarJoint all = train;
            all.y = Vector(6);
            all.y << sessions[0].y.col(0), sessions[1].y.col(0);
            all.x = Vector(6);
            all.x << sessions[0].x.col(0), sessions[1].x.col(0);
            all.precision = Matrix::Identity(6, 6);
            const double ref = brute_force_log_integral(all) - brute_force_log_integral(train);
            CHECK(std::abs(oos - ref) < 1e-4);
        }
    }
}

TEST_CASE("cross-validated evidence") {
    Rng rng(52);
    SUBCASE("sum of folds, bit for bit") {
        const auto sessions = random_sessions(rng, 4, 3, 6);
        const auto cv = cv_lme(sessions);
        Vector sum = Vector::Zero(6);
        for (const auto& f : cv.folds) sum += f.lme;
        CHECK(cv.cv_lme == sum);
        CHECK((cv.cv_acc - cv.cv_com - cv.cv_lme).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("two-session order does not matter") {
        auto sessions = random_sessions(rng, 2, 2, 5);
        const auto a = cv_lme(sessions);
        std::swap(sessions[0], sessions[1]);
        const auto b = cv_lme(sessions);
        CHECK(max_rel_diff(a.cv_lme, b.cv_lme) < 1e-12);
    }
    SUBCASE("shortcut agrees with the naive path") {
        for (int i = 0; i < 40; ++i) {
            const Index s = uniform_int(rng, 2, 5);
            const auto sessions = random_sessions(rng, s, uniform_int(rng, 1, 4), uniform_int(rng, 1, 6));
            const auto cv = cv_lme(sessions);
            for (std::size_t f = 0; f < sessions.size(); ++f) {
                const auto naive = naive_fold(sessions, f);
                CHECK(max_rel_diff(cv.folds[f].lme, naive.lme) < 1e-10);
                CHECK(max_rel_diff(cv.folds[f].acc, naive.acc) < 1e-10);
                CHECK(max_rel_diff(cv.folds[f].com, naive.com) < 1e-10);
                const auto direct = oos_lme(sessions, f);
                CHECK(max_rel_diff(direct.lme, naive.lme) < 1e-10);
            }
        }
    }
    SUBCASE("statistics path equals the data path") {
        const auto sessions = random_sessions(rng, 3, 2, 4, PrecisionKind::Full);
        std::vector<glm::SufficientStats> stats;
        for (const auto& s : sessions) stats.push_back(glm::SufficientStats::from(s));
        CHECK(max_rel_diff(cv_lme(stats).cv_lme, cv_lme(sessions).cv_lme) < 1e-14);
    }
    SUBCASE("voxel permutation") {
        auto sessions = random_sessions(rng, 3, 2, 5);
        const auto a = cv_lme(sessions);
        for (auto& s : sessions) s.y = s.y.rowwise().reverse().eval();
        const auto b = cv_lme(sessions);
        CHECK(max_rel_diff(a.cv_lme, b.cv_lme.reverse()) < 1e-13);
    }
    SUBCASE("single session through the split layout") {
        auto whole = random_spec(rng, 100, 3, 4, PrecisionKind::Full);
        const auto layout = split_single_session(100);
        const auto parts = partition(whole, layout);
        REQUIRE(parts.size() == 2);
        CHECK(parts[0].scans() == 45);
        CHECK(max_rel_diff(parts[1].y, whole.y.middleRows(55, 45)) == 0.0);
        CHECK(max_rel_diff(parts[1].precision.dense(), whole.precision.dense().block(55, 55, 45, 45)) == 0.0);
        CHECK(max_rel_diff(cv_lme(whole, layout).cv_lme, cv_lme(parts).cv_lme) < 1e-14);
        const auto fold = oos_lme(whole, layout, 1);
        CHECK(max_rel_diff(fold.lme, oos_lme(parts, 1).lme) < 1e-14);
    }
    SUBCASE("errors") {
        const auto sessions = random_sessions(rng, 1, 2, 3);
        CHECK_THROWS_AS(cv_lme(sessions), LayoutError);
        auto mixed = random_sessions(rng, 2, 2, 3);
        mixed[1].x = normal_matrix(rng, mixed[1].scans(), 3);
        CHECK_THROWS_AS(cv_lme(mixed), DomainError);
    }
}

TEST_CASE("assembled results") {
    Rng rng(53);
    std::vector<ModelCv> models;
    for (Index p : {1, 2, 3}) models.push_back(cv_lme(random_sessions(rng, 3, p, 7)));
    const auto r = assemble(models);
    CHECK(r.cv_lme.rows() == 3);
    CHECK(r.cv_lme.cols() == 7);
    REQUIRE(r.folds() == 3);
    Matrix sum = Matrix::Zero(3, 7);
    for (const auto& f : r.oos_lme) sum += f;
    CHECK(r.cv_lme == sum);
    CHECK((r.cv_acc - r.cv_com - r.cv_lme).cwiseAbs().maxCoeff() < 1e-8);
}
