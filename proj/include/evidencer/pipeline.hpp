/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_PIPELINE_HPP
#define EVIDENCER_PIPELINE_HPP

#include "evidencer/config.hpp"
#include "evidencer/cv_engine.hpp"
#include "evidencer/rfx_bms.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace evidencer::io {

enum Stage : unsigned {
    kStageCvLme = 1u << 0,
    kStageAnc = 1u << 1,
    kStageLfe = 1u << 2,
    kStageBms = 1u << 3,
    kStageEp = 1u << 4,
    kStageBma = 1u << 5,
    kStageAll = (1u << 6) - 1,
};

/// Stages in execution order.
inline constexpr Stage kStageOrder[] = {kStageCvLme, kStageAnc, kStageLfe,
                                        kStageBma,   kStageBms, kStageEp};

std::string stage_name(Stage stage);

/// Comma-separated stage names ("cvlme,anc,lfe,bms,ep,bma" or "all").
unsigned parse_stages(const std::string& list);

/// Adds prerequisites: anc, lfe, bma and bms need cvlme; ep needs bms.
unsigned resolve_stage_dependencies(unsigned mask);

/// Stages that the config supports when the caller asks for everything.
unsigned applicable_stages(const ModelSpaceConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitPartial = 4;

struct PipelineOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::optional<rfx::EpMethod> ep_method;  // default: closed-form for k = 2, else integration
    std::size_t samples = 1000000;
    Index chunk_size = 4096;
    bool write_timings = false;
};

struct StageReport {
    std::string name;
    std::string status;  // ok | failed | skipped | not_applicable | not_requested
    std::string error;
    std::string error_kind;  // config | numeric
    double seconds = 0.0;
};

struct PipelineReport {
    int exit_code = kExitOk;
    std::string error;  // set when the run failed before any stage
    std::vector<StageReport> stages;
    std::vector<std::string> outputs;
};

/// Cross-validated evidence of every model of a subject-level config.
cv::CvResult compute_cv(const ModelSpaceConfig& config, unsigned threads, Index chunk_size);

/// Runs the requested stages (0 = every applicable stage) and writes one CSV
/// per result table plus manifest.json into options.out_dir. The manifest is
/// written even when stages fail.
PipelineReport run_pipeline(const PipelineOptions& options, unsigned stages);

} // namespace evidencer::io

#endif
