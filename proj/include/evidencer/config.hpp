/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_CONFIG_HPP
#define EVIDENCER_CONFIG_HPP

#include "evidencer/rfx_bms.hpp"
#include "evidencer/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evidencer::io {

namespace fs = std::filesystem;

struct ModelEntry {
    std::string name;
    std::vector<fs::path> designs;  // one per session
};

struct FamilyEntry {
    std::string name;
    std::vector<std::string> models;
    std::vector<double> weights;  // empty: uniform
};

/// A group member: either a precomputed cvLME CSV (models x voxels) or a
/// subject-level model-space config whose cvLME is computed on the fly.
struct SubjectEntry {
    std::string id;
    fs::path cvlme;
    fs::path config;
};

struct BmaEntry {
    std::string regressor;
    std::map<std::string, fs::path> betas;  // model name -> sessions x voxels CSV
    std::string variant = "cv";             // "cv" or "oos"
};

enum class SessionMode { Multi, Single };

/// Model-space description loaded from JSON. Relative paths are resolved
/// against the directory of the config file.
struct ModelSpaceConfig {
    fs::path source;
    std::string raw_text;

    std::vector<ModelEntry> models;
    std::vector<fs::path> data;
    std::vector<fs::path> precision;  // empty: identity
    SessionMode session_mode = SessionMode::Multi;
    Index single_scans = 0;  // 0: take from the data
    Index min_split_scans = 40;

    std::vector<FamilyEntry> families;
    std::vector<double> model_prior;  // empty: uniform
    std::optional<BmaEntry> bma;

    std::vector<SubjectEntry> subjects;
    std::vector<std::string> group_models;  // names when only CSVs are given
    std::string group_level = "model";      // "model" or "family"
    rfx::RfxOptions rfx;

    bool has_models() const noexcept { return !models.empty(); }
    bool has_group() const noexcept { return !subjects.empty(); }
    std::size_t session_count() const noexcept { return data.size(); }

    std::vector<std::string> model_names() const;

    /// Index of a model name in `models` (or `group_models`). Throws ConfigError.
    std::size_t model_index(const std::string& name) const;

    static ModelSpaceConfig parse(const std::string& text, const fs::path& base_dir,
                                  const fs::path& source = {});
    static ModelSpaceConfig load(const fs::path& path);
};

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

} // namespace evidencer::io

#endif
