/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/pipeline.hpp"

#include "evidencer/bma.hpp"
#include "evidencer/csv.hpp"
#include "evidencer/errors.hpp"
#include "evidencer/family.hpp"
#include "evidencer/glm_ng.hpp"
#include "evidencer/quadrature.hpp"
#include "evidencer/version.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

namespace evidencer::io {

namespace {

using nlohmann::json;

struct Chunk {
    Index begin;
    Index count;
};

std::vector<Chunk> make_chunks(Index voxels, Index chunk_size) {
    if (chunk_size < 1) throw ConfigError("chunk size must be positive");
    std::vector<Chunk> chunks;
    for (Index v = 0; v < voxels; v += chunk_size) {
        chunks.push_back({v, std::min(chunk_size, voxels - v)});
    }
    return chunks;
}

Matrix load_values(const fs::path& p) {
    return load_matrix(p).values;
}

glm::Precision load_precision(const fs::path& p, Index n) {
    const Matrix m = load_values(p);
    if (m.rows() == n && m.cols() == n && n > 1) return glm::Precision::full(m);
    if (m.rows() == n && m.cols() == 1) return glm::Precision::diagonal(m.col(0));
    if (m.rows() == 1 && m.cols() == n) return glm::Precision::diagonal(m.row(0).transpose());
    throw ConfigError("precision " + p.string() + " must be " + std::to_string(n) + "x" +
                      std::to_string(n) + " or a length-" + std::to_string(n) + " diagonal");
}

// Per-model session specs of a subject-level config, plus voxel labels.
struct LoadedModelSpace {
    std::vector<std::vector<glm::GlmSpec>> models;
    std::vector<std::string> voxel_labels;
};

LoadedModelSpace load_model_space(const ModelSpaceConfig& cfg) {
    if (!cfg.has_models()) throw ConfigError("config defines no models");
    LoadedModelSpace out;
    std::vector<Matrix> data;
    Index voxels = -1;
    for (const auto& p : cfg.data) {
        auto lm = load_matrix(p);
        if (voxels < 0) {
            voxels = lm.values.cols();
            out.voxel_labels = lm.column_labels.empty() ? default_labels("v", voxels)
                                                        : lm.column_labels;
        } else if (lm.values.cols() != voxels) {
            throw ConfigError("data file " + p.string() + " has " +
                              std::to_string(lm.values.cols()) + " voxels, expected " +
                              std::to_string(voxels));
        }
        data.push_back(std::move(lm.values));
    }
    std::vector<glm::Precision> precision;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const Index n = data[s].rows();
        precision.push_back(cfg.precision.empty() ? glm::Precision::identity(n)
                                                  : load_precision(cfg.precision[s], n));
    }
    for (const auto& m : cfg.models) {
        std::vector<glm::GlmSpec> sessions;
        Index p = -1;
        for (std::size_t s = 0; s < data.size(); ++s) {
            Matrix x = load_values(m.designs[s]);
            if (x.rows() != data[s].rows()) {
                throw ConfigError("design " + m.designs[s].string() + " has " +
                                  std::to_string(x.rows()) + " scans but session " +
                                  std::to_string(s + 1) + " data have " +
                                  std::to_string(data[s].rows()));
            }
            if (p >= 0 && x.cols() != p) {
                throw ConfigError("model '" + m.name + "' changes regressor count across sessions");
            }
            p = x.cols();
            sessions.push_back({data[s], std::move(x), precision[s]});
        }
        if (cfg.session_mode == SessionMode::Single) {
            const Index n = sessions.front().scans();
            if (cfg.single_scans > 0 && cfg.single_scans != n) {
                throw ConfigError("sessions.scans is " + std::to_string(cfg.single_scans) +
                                  " but the data have " + std::to_string(n) + " scans");
            }
            sessions = cv::partition(sessions.front(),
                                     cv::split_single_session(n, cfg.min_split_scans));
        }
        out.models.push_back(std::move(sessions));
    }
    return out;
}

cv::CvResult compute_cv_loaded(const LoadedModelSpace& space, unsigned threads, Index chunk_size) {
    const Index voxels = space.models.front().front().voxels();
    const auto chunks = make_chunks(voxels, chunk_size);
    const std::size_t n_models = space.models.size();
    std::vector<cv::ModelCv> parts(n_models * chunks.size());
    detail::parallel_for(parts.size(), threads, [&](std::size_t task) {
        const std::size_t m = task / chunks.size();
        const Chunk c = chunks[task % chunks.size()];
        std::vector<glm::GlmSpec> sessions;
        for (const auto& s : space.models[m]) sessions.push_back(s.voxel_slice(c.begin, c.count));
        parts[task] = cv::cv_lme(std::span<const glm::GlmSpec>(sessions));
    });

    std::vector<cv::ModelCv> models(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
        auto& mc = models[m];
        const std::size_t folds = parts[m * chunks.size()].folds.size();
        mc.cv_lme.resize(voxels);
        mc.cv_acc.resize(voxels);
        mc.cv_com.resize(voxels);
        mc.folds.assign(folds, {Vector(voxels), Vector(voxels), Vector(voxels)});
        for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
            const auto& part = parts[m * chunks.size() + ci];
            const Chunk c = chunks[ci];
            mc.cv_lme.segment(c.begin, c.count) = part.cv_lme;
            mc.cv_acc.segment(c.begin, c.count) = part.cv_acc;
            mc.cv_com.segment(c.begin, c.count) = part.cv_com;
            for (std::size_t f = 0; f < folds; ++f) {
                mc.folds[f].lme.segment(c.begin, c.count) = part.folds[f].lme;
                mc.folds[f].acc.segment(c.begin, c.count) = part.folds[f].acc;
                mc.folds[f].com.segment(c.begin, c.count) = part.folds[f].com;
            }
        }
    }
    return cv::assemble(models);
}

family::FamilyPartition make_partition(const ModelSpaceConfig& cfg, std::size_t model_count) {
    if (cfg.families.empty()) throw ConfigError("no families defined in the config");
    std::vector<family::Family> families;
    for (const auto& f : cfg.families) {
        family::Family fam{f.name, {}, f.weights};
        for (const auto& name : f.models) fam.models.push_back(cfg.model_index(name));
        families.push_back(std::move(fam));
    }
    try {
        return family::FamilyPartition(std::move(families), model_count);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid families: ") + e.what());
    }
}

Vector model_prior(const ModelSpaceConfig& cfg, Index models) {
    if (cfg.model_prior.empty()) return {};
    if (static_cast<Index>(cfg.model_prior.size()) != models) {
        throw ConfigError("priors.models has " + std::to_string(cfg.model_prior.size()) +
                          " entries for " + std::to_string(models) + " models");
    }
    return Eigen::Map<const Vector>(cfg.model_prior.data(), models);
}

class Run {
public:
    Run(const PipelineOptions& options, PipelineReport& report)
        : options_(options), report_(report) {}

    void execute(unsigned requested) {
        config_ = ModelSpaceConfig::load(options_.config_path);
        config_hash_ = fnv1a_hex(config_.raw_text);
        requested_ = requested == 0 ? applicable_stages(config_) : requested;
        const unsigned resolved = resolve_stage_dependencies(requested_);

        for (Stage stage : kStageOrder) {
            StageReport sr;
            sr.name = stage_name(stage);
            if (!(resolved & stage)) {
                sr.status = "not_requested";
                report_.stages.push_back(sr);
                continue;
            }
            const std::string blocker = blocking_dependency(stage);
            if (!blocker.empty()) {
                sr.status = "skipped";
                sr.error = "dependency '" + blocker + "' did not complete";
                report_.stages.push_back(sr);
                continue;
            }
            const auto start = std::chrono::steady_clock::now();
            try {
                sr.status = run_stage(stage, (requested_ & stage) != 0) ? "ok" : "not_applicable";
            } catch (const ConfigError& e) {
                fail(sr, "config", e.what());
            } catch (const ParseError& e) {
                fail(sr, "config", e.what());
            } catch (const IoError& e) {
                fail(sr, "config", e.what());
            } catch (const LayoutError& e) {
                fail(sr, "config", e.what());
            } catch (const std::exception& e) {
                fail(sr, "numeric", e.what());
            }
            sr.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            status_[stage] = sr.status;
            report_.stages.push_back(sr);
        }
    }

    json manifest_body() const {
        json m;
        m["config_hash"] = "fnv1a64:" + config_hash_;
        m["seed"] = options_.seed;
        m["ep_method"] = ep_method_name_;
        m["samples"] = options_.samples;
        m["chunk_size"] = options_.chunk_size;
        m["tolerances"] = {{"rfx_tol", config_.rfx.tol},
                           {"rfx_max_iter", config_.rfx.max_iter},
                           {"rfx_alpha0", config_.rfx.alpha0},
                           {"ep_rel_tail", special::kDefaultRelTail},
                           {"ep_integration_tol", rfx::kEpIntegrationTol}};
        m["tables"] = tables_;
        m["diagnostics"] = diagnostics_;
        if (!subject_ids_.empty()) m["subjects"] = subject_ids_;
        json requested = json::array();
        for (Stage s : kStageOrder) {
            if (requested_ & s) requested.push_back(stage_name(s));
        }
        m["stages_requested"] = requested;
        return m;
    }

private:
    static void fail(StageReport& sr, const char* kind, const std::string& what) {
        sr.status = "failed";
        sr.error_kind = kind;
        sr.error = what;
    }

    std::string blocking_dependency(Stage stage) const {
        std::vector<Stage> deps;
        if (stage == kStageAnc || stage == kStageLfe || stage == kStageBma || stage == kStageBms) {
            deps.push_back(kStageCvLme);
        }
        if (stage == kStageEp) deps.push_back(kStageBms);
        for (Stage d : deps) {
            const auto it = status_.find(d);
            const std::string st = it == status_.end() ? "" : it->second;
            if (st != "ok" && st != "not_applicable") return stage_name(d);
        }
        return {};
    }

    void write_table(const std::string& file, const std::string& kind, const Matrix& values,
                     const std::vector<std::string>& row_labels,
                     const std::vector<std::string>& column_labels) {
        write_matrix(options_.out_dir / file, values, column_labels);
        tables_.push_back({{"file", file},
                           {"kind", kind},
                           {"rows", values.rows()},
                           {"cols", values.cols()},
                           {"row_labels", row_labels}});
        report_.outputs.push_back(file);
    }

    // Returns false when the stage does not apply to this config.
    bool run_stage(Stage stage, bool explicitly_requested) {
        switch (stage) {
        case kStageCvLme:
            if (!config_.has_models()) {
                if (explicitly_requested) throw ConfigError("cvlme needs 'models' and 'data'");
                return false;
            }
            run_cvlme();
            return true;
        case kStageAnc:
            run_anc();
            return true;
        case kStageLfe:
            run_lfe();
            return true;
        case kStageBma:
            run_bma();
            return true;
        case kStageBms:
            run_bms();
            return true;
        case kStageEp:
            run_ep();
            return true;
        case kStageAll:
            break;
        }
        return false;
    }

    void require_cv(const char* stage) const {
        if (!cv_) throw ConfigError(std::string(stage) + " needs 'models' and 'data' in the config");
    }

    void run_cvlme() {
        const auto space = load_model_space(config_);
        voxel_labels_ = space.voxel_labels;
        cv_ = compute_cv_loaded(space, options_.threads, options_.chunk_size);
        const auto names = config_.model_names();
        write_table("cvLME.csv", "cvLME", cv_->cv_lme, names, voxel_labels_);
        for (std::size_t f = 0; f < cv_->folds(); ++f) {
            write_table("oosLME_fold" + std::to_string(f + 1) + ".csv", "oosLME", cv_->oos_lme[f],
                        names, voxel_labels_);
        }
    }

    void run_anc() {
        require_cv("anc");
        const auto names = config_.model_names();
        write_table("cvAcc.csv", "cvAcc", cv_->cv_acc, names, voxel_labels_);
        write_table("cvCom.csv", "cvCom", cv_->cv_com, names, voxel_labels_);
        for (std::size_t f = 0; f < cv_->folds(); ++f) {
            const std::string suffix = "_fold" + std::to_string(f + 1) + ".csv";
            write_table("oosAcc" + suffix, "oosAcc", cv_->oos_acc[f], names, voxel_labels_);
            write_table("oosCom" + suffix, "oosCom", cv_->oos_com[f], names, voxel_labels_);
        }
    }

    void run_lfe() {
        require_cv("lfe");
        const auto partition = make_partition(config_, static_cast<std::size_t>(cv_->cv_lme.rows()));
        const Matrix lfe = family::log_family_evidence(cv_->cv_lme, partition);
        std::vector<std::string> names;
        for (const auto& f : config_.families) names.push_back(f.name);
        write_table("LFE.csv", "LFE", lfe, names, voxel_labels_);
    }

    void run_bma() {
        require_cv("bma");
        if (!config_.bma) throw ConfigError("bma needs a 'bma' section in the config");
        const auto& entry = *config_.bma;
        const auto names = config_.model_names();
        const Index models = static_cast<Index>(names.size());
        bma::BetaStack betas;
        betas.regressor = entry.regressor;
        for (const auto& name : names) {
            const auto it = entry.betas.find(name);
            if (it == entry.betas.end()) throw ConfigError("bma.betas lacks model '" + name + "'");
            betas.beta_hat.push_back(load_values(it->second));
        }
        if (betas.voxels() != cv_->cv_lme.cols()) {
            throw ConfigError("beta files have " + std::to_string(betas.voxels()) +
                              " voxels but the data have " + std::to_string(cv_->cv_lme.cols()));
        }
        try {
            betas.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        const Vector prior = model_prior(config_, models);
        Vector estimate;
        if (entry.variant == "cv") {
            const auto pp = bma::posterior_probabilities(cv_->cv_lme, prior);
            write_table("PP.csv", "PP", pp.pp, names, voxel_labels_);
            estimate = bma::cv_bma(betas, pp);
        } else {
            if (static_cast<std::size_t>(betas.sessions()) != cv_->folds()) {
                throw ConfigError("oos BMA needs one beta row per fold");
            }
            std::vector<bma::PosteriorProbs> per_session;
            for (std::size_t f = 0; f < cv_->folds(); ++f) {
                per_session.push_back(bma::posterior_probabilities(cv_->oos_lme[f], prior));
                write_table("PP_fold" + std::to_string(f + 1) + ".csv", "PP",
                            per_session.back().pp, names, voxel_labels_);
            }
            estimate = bma::oos_bma(betas, per_session);
        }
        write_table("BMA.csv", "BMA", estimate.transpose(), {entry.regressor}, voxel_labels_);
    }

    void run_bms() {
        if (!config_.has_group()) throw ConfigError("bms-group needs a 'group' section");
        rfx::GroupLmeStack group;
        std::vector<std::string> labels;
        for (const auto& s : config_.subjects) {
            Matrix lme;
            if (!s.cvlme.empty()) {
                auto lm = load_matrix(s.cvlme);
                if (labels.empty()) labels = lm.column_labels;
                lme = std::move(lm.values);
            } else {
                const auto sub = ModelSpaceConfig::load(s.config);
                const auto space = load_model_space(sub);
                if (labels.empty()) labels = space.voxel_labels;
                lme = compute_cv_loaded(space, options_.threads, options_.chunk_size).cv_lme;
            }
            group.lme.push_back(std::move(lme));
            group.subject_ids.push_back(s.id);
        }
        subject_ids_ = group.subject_ids;
        const Index models = group.models();
        if (!config_.has_models() && config_.group_models.empty()) {
            config_.group_models = default_labels("m", models);
        }
        if (static_cast<Index>(config_.model_names().size()) != models) {
            throw ConfigError("group LMEs have " + std::to_string(models) + " models but " +
                              std::to_string(config_.model_names().size()) + " are named");
        }
        bms_rows_ = config_.model_names();
        if (config_.group_level == "family") {
            const auto partition = make_partition(config_, static_cast<std::size_t>(models));
            for (auto& m : group.lme) {
                if (m.rows() != models) throw ConfigError("subjects differ in model count");
                m = family::log_family_evidence(m, partition);
            }
            bms_rows_.clear();
            for (const auto& f : config_.families) bms_rows_.push_back(f.name);
        }
        try {
            group.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        const Index voxels = group.voxels();
        bms_labels_ = labels.size() == static_cast<std::size_t>(voxels) ? labels
                                                                       : default_labels("v", voxels);

        const auto chunks = make_chunks(voxels, options_.chunk_size);
        std::vector<rfx::DirichletPosterior> parts(chunks.size());
        detail::parallel_for(chunks.size(), options_.threads, [&](std::size_t ci) {
            rfx::GroupLmeStack slice;
            slice.subject_ids = group.subject_ids;
            for (const auto& m : group.lme) {
                slice.lme.push_back(m.middleCols(chunks[ci].begin, chunks[ci].count));
            }
            parts[ci] = rfx::estimate_rfx(slice, config_.rfx);
        });
        rfx::DirichletPosterior post;
        post.alpha0 = config_.rfx.alpha0;
        post.alpha.resize(group.models(), voxels);
        for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
            post.alpha.middleCols(chunks[ci].begin, chunks[ci].count) = parts[ci].alpha;
            post.converged.insert(post.converged.end(), parts[ci].converged.begin(),
                                  parts[ci].converged.end());
            post.iterations.insert(post.iterations.end(), parts[ci].iterations.begin(),
                                   parts[ci].iterations.end());
        }
        post.expected_freq = post.alpha.array().rowwise() / post.alpha.colwise().sum().array();
        diagnostics_["rfx_non_converged_voxels"] = post.non_converged();
        diagnostics_["rfx_max_iterations"] =
            post.iterations.empty() ? 0 : *std::max_element(post.iterations.begin(), post.iterations.end());
        write_table("alpha.csv", "alpha", post.alpha, bms_rows_, bms_labels_);
        rfx_ = std::move(post);
    }

    void run_ep() {
        if (!rfx_) throw ConfigError("ep needs the bms stage");
        const Index k = rfx_->alpha.rows();
        rfx::EpOptions ep;
        ep.method = options_.ep_method.value_or(k == 2 ? rfx::EpMethod::ClosedForm
                                                       : rfx::EpMethod::Integration);
        ep.samples = options_.samples;
        ep.seed = options_.seed;
        ep_method_name_ = rfx::to_string(ep.method);
        if (ep.method == rfx::EpMethod::ClosedForm && k != 2) {
            throw ConfigError("closed-form EPs need exactly two models, got " + std::to_string(k));
        }
        if (ep.method == rfx::EpMethod::Sampling && ep.samples < rfx::kMinSamples) {
            throw ConfigError("--samples must be at least " + std::to_string(rfx::kMinSamples));
        }
        const Index voxels = rfx_->alpha.cols();
        const auto chunks = make_chunks(voxels, options_.chunk_size);
        std::vector<Matrix> parts(chunks.size());
        std::vector<rfx::EpDiagnostics> diag(chunks.size());
        detail::parallel_for(chunks.size(), options_.threads, [&](std::size_t ci) {
            parts[ci] = rfx::exceedance_probabilities(
                rfx_->alpha.middleCols(chunks[ci].begin, chunks[ci].count), ep, ci, &diag[ci]);
        });
        Matrix phi(k, voxels);
        double max_dev = 0.0;
        for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
            phi.middleCols(chunks[ci].begin, chunks[ci].count) = parts[ci];
            max_dev = std::max(max_dev, diag[ci].max_sum_deviation);
        }
        if (ep.method == rfx::EpMethod::Integration) {
            diagnostics_["ep_max_abs_sum_deviation"] = max_dev;
        }
        write_table("EP.csv", "EP", phi, bms_rows_, bms_labels_);
    }

    const PipelineOptions& options_;
    PipelineReport& report_;
    ModelSpaceConfig config_;
    std::string config_hash_;
    unsigned requested_ = 0;
    std::map<Stage, std::string> status_;
    std::optional<cv::CvResult> cv_;
    std::vector<std::string> voxel_labels_;
    std::optional<rfx::DirichletPosterior> rfx_;
    std::vector<std::string> bms_rows_;
    std::vector<std::string> bms_labels_;
    std::vector<std::string> subject_ids_;
    std::string ep_method_name_ = "none";
    json tables_ = json::array();
    json diagnostics_ = json::object();
};

int exit_code_for(const PipelineReport& report) {
    bool any_ok = false;
    bool any_config = false;
    bool any_failed = false;
    for (const auto& s : report.stages) {
        if (s.status == "ok") any_ok = true;
        if (s.status == "failed" || s.status == "skipped") any_failed = true;
        if (s.status == "failed" && s.error_kind == "config") any_config = true;
    }
    if (any_config) return kExitConfig;
    if (!any_failed) return kExitOk;
    return any_ok ? kExitPartial : kExitNumeric;
}

} // namespace

std::string stage_name(Stage stage) {
    switch (stage) {
    case kStageCvLme:
        return "cvlme";
    case kStageAnc:
        return "anc";
    case kStageLfe:
        return "lfe";
    case kStageBms:
        return "bms";
    case kStageEp:
        return "ep";
    case kStageBma:
        return "bma";
    case kStageAll:
        break;
    }
    return "all";
}

unsigned parse_stages(const std::string& list) {
    unsigned mask = 0;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "all") {
            mask |= kStageAll;
            continue;
        }
        if (item == "bms-group") item = "bms";
        bool found = false;
        for (Stage s : kStageOrder) {
            if (stage_name(s) == item) {
                mask |= s;
                found = true;
            }
        }
        if (!found) throw ConfigError("unknown stage '" + item + "'");
    }
    return mask;
}

unsigned resolve_stage_dependencies(unsigned mask) {
    if (mask & kStageEp) mask |= kStageBms;
    if (mask & (kStageAnc | kStageLfe | kStageBma | kStageBms)) mask |= kStageCvLme;
    return mask;
}

unsigned applicable_stages(const ModelSpaceConfig& config) {
    unsigned mask = 0;
    if (config.has_models()) {
        mask |= kStageCvLme | kStageAnc;
        if (!config.families.empty()) mask |= kStageLfe;
        if (config.bma) mask |= kStageBma;
    }
    if (config.has_group()) mask |= kStageBms | kStageEp;
    return mask;
}

cv::CvResult compute_cv(const ModelSpaceConfig& config, unsigned threads, Index chunk_size) {
    return compute_cv_loaded(load_model_space(config), threads, chunk_size);
}

PipelineReport run_pipeline(const PipelineOptions& options, unsigned stages) {
    PipelineReport report;
    json manifest;
    manifest["tool"] = "evidencer";
    manifest["versions"] = {{"evidencer", kVersion},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)}};
    manifest["config"] = options.config_path.filename().string();

    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec || !fs::is_directory(options.out_dir)) {
        report.exit_code = kExitConfig;
        report.error = "cannot create output directory " + options.out_dir.string();
        return report;
    }

    Run run(options, report);
    try {
        run.execute(stages);
        report.exit_code = exit_code_for(report);
        manifest.update(run.manifest_body());
    } catch (const std::exception& e) {
        report.exit_code = kExitConfig;
        report.error = e.what();
        manifest["error"] = e.what();
    }

    json stage_json = json::object();
    for (const auto& s : report.stages) {
        json entry = {{"status", s.status}};
        if (!s.error.empty()) entry["error"] = s.error;
        stage_json[s.name] = entry;
    }
    manifest["stages"] = stage_json;
    manifest["exit_code"] = report.exit_code;

    std::ofstream out(options.out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << '\n';
    report.outputs.push_back("manifest.json");

    if (options.write_timings) {
        std::ofstream t(options.out_dir / "timings.csv", std::ios::binary | std::ios::trunc);
        t << "stage,seconds\n";
        for (const auto& s : report.stages) {
            if (s.status == "ok") t << s.name << ',' << format_double(s.seconds) << '\n';
        }
        report.outputs.push_back("timings.csv");
    }
    return report;
}

} // namespace evidencer::io
