/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// On-disk data sets for pipeline, C API and CLI tests.

#ifndef EVIDENCER_TESTS_FIXTURES_HPP
#define EVIDENCER_TESTS_FIXTURES_HPP

#include "evidencer/csv.hpp"
#include "support.hpp"

#include <json.hpp>

namespace evidencer::testing {

struct SubjectFixture {
    std::filesystem::path config;
    Index voxels;
    Index sessions;
};

/// Two models (intercept + one regressor, and that plus a noise regressor),
/// `sessions` sessions, families {small: m1, big: m2} and cv BMA betas.
inline SubjectFixture write_subject(const std::filesystem::path& dir, std::uint64_t seed,
                                    Index voxels = 24, Index sessions = 2, Index scans = 30,
                                    const std::string& variant = "cv") {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    Rng rng(seed);
    const Matrix beta = normal_matrix(rng, 2, voxels);
    nlohmann::json cfg;
    nlohmann::json m1 = {{"name", "m1"}, {"designs", nlohmann::json::array()}};
    nlohmann::json m2 = {{"name", "m2"}, {"designs", nlohmann::json::array()}};
    nlohmann::json data = nlohmann::json::array();
    std::vector<std::string> labels;
    for (Index v = 0; v < voxels; ++v) labels.push_back("vox" + std::to_string(v + 1));
    for (Index s = 0; s < sessions; ++s) {
        Matrix x1 = normal_matrix(rng, scans, 2);
        x1.col(0).setOnes();
        Matrix x2(scans, 3);
        x2 << x1, normal_matrix(rng, scans, 1);
        const Matrix y = x1 * beta + normal_matrix(rng, scans, voxels, 0.9);
        const std::string tag = std::to_string(s + 1);
        io::write_matrix(dir / ("y_" + tag + ".csv"), y, labels);
        io::write_matrix(dir / ("x1_" + tag + ".csv"), x1, {"const", "x"});
        io::write_matrix(dir / ("x2_" + tag + ".csv"), x2, {"const", "x", "noise"});
        data.push_back("y_" + tag + ".csv");
        m1["designs"].push_back("x1_" + tag + ".csv");
        m2["designs"].push_back("x2_" + tag + ".csv");
    }
    io::write_matrix(dir / "beta_m1.csv", normal_matrix(rng, sessions, voxels));
    io::write_matrix(dir / "beta_m2.csv", normal_matrix(rng, sessions, voxels));
    cfg["models"] = {m1, m2};
    cfg["data"] = data;
    cfg["families"] = {{{"name", "small"}, {"models", {"m1"}}},
                       {{"name", "big"}, {"models", {"m2"}}}};
    cfg["bma"] = {{"regressor", "x"},
                  {"variant", variant},
                  {"betas", {{"m1", "beta_m1.csv"}, {"m2", "beta_m2.csv"}}}};
    write_text(dir / "config.json", cfg.dump(2));
    return {dir / "config.json", voxels, sessions};
}

/// Group config over `subjects` precomputed cvLME tables of k models.
inline std::filesystem::path write_group(const std::filesystem::path& dir, std::uint64_t seed,
                                         Index subjects, Index models, Index voxels,
                                         double spread = 4.0) {
    std::filesystem::create_directories(dir);
    Rng rng(seed);
    nlohmann::json list = nlohmann::json::array();
    nlohmann::json names = nlohmann::json::array();
    for (Index m = 0; m < models; ++m) names.push_back("model" + std::to_string(m + 1));
    for (Index n = 0; n < subjects; ++n) {
        const std::string id = "sub" + std::to_string(n + 1);
        Matrix lme = normal_matrix(rng, models, voxels, spread);
        lme.row(0).array() += 1.0;
        io::write_matrix(dir / (id + ".csv"), lme.array() - 200.0);
        list.push_back({{"id", id}, {"cvlme", id + ".csv"}});
    }
    nlohmann::json cfg;
    cfg["group"] = {{"models", names}, {"subjects", list}};
    write_text(dir / "group.json", cfg.dump(2));
    return dir / "group.json";
}

} // namespace evidencer::testing

#endif
