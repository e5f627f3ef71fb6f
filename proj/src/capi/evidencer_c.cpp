/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/evidencer.h"

#include "evidencer/bma.hpp"
#include "evidencer/cv_engine.hpp"
#include "evidencer/errors.hpp"
#include "evidencer/family.hpp"
#include "evidencer/pipeline.hpp"
#include "evidencer/rfx_bms.hpp"
#include "evidencer/version.hpp"

#include <new>
#include <string>
#include <vector>

using namespace evidencer;

namespace {

thread_local std::string g_last_error;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix read_rows(const double* data, size_t rows, size_t cols) {
    return Eigen::Map<const RowMajor>(data, static_cast<Index>(rows), static_cast<Index>(cols));
}

void write_rows(const Matrix& m, double* out) {
    Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m;
}

evd_status fail(evd_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void require(bool condition, const char* message) {
    if (!condition) throw InvalidArgument(message);
}

template <class F>
evd_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return EVD_OK;
    } catch (const InvalidArgument& e) {
        return fail(EVD_ERR_INVALID_ARGUMENT, e.what());
    } catch (const DomainError& e) {
        return fail(EVD_ERR_DOMAIN, e.what());
    } catch (const DecompositionError& e) {
        return fail(EVD_ERR_DECOMPOSITION, e.what());
    } catch (const EstimationError& e) {
        return fail(EVD_ERR_ESTIMATION, e.what());
    } catch (const LayoutError& e) {
        return fail(EVD_ERR_LAYOUT, e.what());
    } catch (const ParseError& e) {
        return fail(EVD_ERR_PARSE, e.what());
    } catch (const ConfigError& e) {
        return fail(EVD_ERR_CONFIG, e.what());
    } catch (const NumericError& e) {
        return fail(EVD_ERR_NUMERIC, e.what());
    } catch (const IoError& e) {
        return fail(EVD_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(EVD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(EVD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(EVD_ERR_INTERNAL, "unknown error");
    }
}

bma::BetaStack read_betas(const double* const* betas, size_t models, size_t sessions,
                          size_t voxels) {
    require(betas != nullptr, "betas is null");
    bma::BetaStack stack;
    for (size_t m = 0; m < models; ++m) {
        require(betas[m] != nullptr, "betas entry is null");
        stack.beta_hat.push_back(read_rows(betas[m], sessions, voxels));
    }
    return stack;
}

} // namespace

struct evd_cv_model {
    Index regressors;
    Index voxels;
    std::vector<glm::GlmSpec> sessions;
    cv::ModelCv result;
    bool computed = false;
};

struct evd_rfx_result {
    rfx::DirichletPosterior posterior;
};

struct evd_pipeline {
    io::PipelineOptions options;
    io::PipelineReport report;
};

extern "C" {

const char* evd_version(void) {
    return kVersion;
}

const char* evd_last_error(void) {
    return g_last_error.c_str();
}

const char* evd_status_string(evd_status status) {
    switch (status) {
    case EVD_OK:
        return "ok";
    case EVD_ERR_DOMAIN:
        return "domain error";
    case EVD_ERR_DECOMPOSITION:
        return "decomposition error";
    case EVD_ERR_ESTIMATION:
        return "estimation error";
    case EVD_ERR_LAYOUT:
        return "layout error";
    case EVD_ERR_PARSE:
        return "parse error";
    case EVD_ERR_CONFIG:
        return "config error";
    case EVD_ERR_NUMERIC:
        return "numeric error";
    case EVD_ERR_IO:
        return "io error";
    case EVD_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case EVD_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

evd_status evd_cv_model_create(size_t regressors, size_t voxels, evd_cv_model** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        require(regressors > 0 && voxels > 0, "regressors and voxels must be positive");
        *out = new evd_cv_model{static_cast<Index>(regressors), static_cast<Index>(voxels), {}, {}};
    });
}

void evd_cv_model_destroy(evd_cv_model* model) {
    delete model;
}

static evd_status add_session(evd_cv_model* model, size_t scans, const double* y,
                              const double* x, glm::Precision (*make)(const double*, size_t),
                              const double* p) {
    return guarded([&] {
        require(model != nullptr && y != nullptr && x != nullptr, "null argument");
        glm::GlmSpec spec{read_rows(y, scans, static_cast<size_t>(model->voxels)),
                          read_rows(x, scans, static_cast<size_t>(model->regressors)),
                          make(p, scans)};
        spec.validate();
        model->sessions.push_back(std::move(spec));
        model->computed = false;
    });
}

evd_status evd_cv_model_add_session(evd_cv_model* model, size_t scans, const double* y,
                                    const double* x, const double* p_diag) {
    return add_session(
        model, scans, y, x,
        [](const double* p, size_t n) {
            if (p == nullptr) return glm::Precision::identity(static_cast<Index>(n));
            return glm::Precision::diagonal(
                Eigen::Map<const Vector>(p, static_cast<Index>(n)));
        },
        p_diag);
}

evd_status evd_cv_model_add_session_full(evd_cv_model* model, size_t scans, const double* y,
                                         const double* x, const double* precision) {
    if (precision == nullptr) return fail(EVD_ERR_INVALID_ARGUMENT, "precision is null");
    return add_session(
        model, scans, y, x,
        [](const double* p, size_t n) { return glm::Precision::full(read_rows(p, n, n)); },
        precision);
}

size_t evd_cv_model_sessions(const evd_cv_model* model) {
    return model == nullptr ? 0 : model->sessions.size();
}

evd_status evd_cv_model_compute(evd_cv_model* model, double* cv_lme, double* cv_acc,
                                double* cv_com) {
    return guarded([&] {
        require(model != nullptr, "model is null");
        model->result = cv::cv_lme(std::span<const glm::GlmSpec>(model->sessions));
        model->computed = true;
        const Index v = model->voxels;
        if (cv_lme) Eigen::Map<Vector>(cv_lme, v) = model->result.cv_lme;
        if (cv_acc) Eigen::Map<Vector>(cv_acc, v) = model->result.cv_acc;
        if (cv_com) Eigen::Map<Vector>(cv_com, v) = model->result.cv_com;
    });
}

evd_status evd_cv_model_fold(const evd_cv_model* model, size_t fold, double* oos_lme,
                             double* oos_acc, double* oos_com) {
    return guarded([&] {
        require(model != nullptr, "model is null");
        require(model->computed, "evd_cv_model_compute has not been called");
        if (fold >= model->result.folds.size()) throw LayoutError("fold index out of range");
        const auto& f = model->result.folds[fold];
        const Index v = model->voxels;
        if (oos_lme) Eigen::Map<Vector>(oos_lme, v) = f.lme;
        if (oos_acc) Eigen::Map<Vector>(oos_acc, v) = f.acc;
        if (oos_com) Eigen::Map<Vector>(oos_com, v) = f.com;
    });
}

evd_status evd_log_family_evidence(const double* lme, size_t models, size_t voxels,
                                   const size_t* family_of_model, const double* weights,
                                   size_t families, double* out) {
    return guarded([&] {
        require(lme && family_of_model && out, "null argument");
        std::vector<family::Family> fams(families);
        for (size_t f = 0; f < families; ++f) fams[f].name = "f" + std::to_string(f + 1);
        for (size_t m = 0; m < models; ++m) {
            require(family_of_model[m] < families, "family index out of range");
            auto& fam = fams[family_of_model[m]];
            fam.models.push_back(m);
            if (weights) fam.weights.push_back(weights[m]);
        }
        const family::FamilyPartition partition(std::move(fams), models);
        write_rows(family::log_family_evidence(read_rows(lme, models, voxels), partition), out);
    });
}

evd_status evd_posterior_probabilities(const double* lme, size_t models, size_t voxels,
                                       const double* prior, double* pp) {
    return guarded([&] {
        require(lme && pp, "null argument");
        Vector p;
        if (prior) p = Eigen::Map<const Vector>(prior, static_cast<Index>(models));
        write_rows(bma::posterior_probabilities(read_rows(lme, models, voxels), p).pp, pp);
    });
}

evd_status evd_cv_bma(const double* const* betas, size_t models, size_t sessions, size_t voxels,
                      const double* pp, double* out) {
    return guarded([&] {
        require(pp && out, "null argument");
        const auto stack = read_betas(betas, models, sessions, voxels);
        const bma::PosteriorProbs probs{read_rows(pp, models, voxels), {}};
        Eigen::Map<Vector>(out, static_cast<Index>(voxels)) = bma::cv_bma(stack, probs);
    });
}

evd_status evd_oos_bma(const double* const* betas, size_t models, size_t sessions, size_t voxels,
                       const double* const* pp_per_session, double* out) {
    return guarded([&] {
        require(pp_per_session && out, "null argument");
        const auto stack = read_betas(betas, models, sessions, voxels);
        std::vector<bma::PosteriorProbs> probs;
        for (size_t s = 0; s < sessions; ++s) {
            require(pp_per_session[s] != nullptr, "pp_per_session entry is null");
            probs.push_back({read_rows(pp_per_session[s], models, voxels), {}});
        }
        Eigen::Map<Vector>(out, static_cast<Index>(voxels)) = bma::oos_bma(stack, probs);
    });
}

evd_status evd_rfx_estimate(const double* lme, size_t subjects, size_t models, size_t voxels,
                            double alpha0, double tol, int max_iter, evd_rfx_result** out) {
    return guarded([&] {
        require(lme && out, "null argument");
        rfx::GroupLmeStack group;
        for (size_t n = 0; n < subjects; ++n) {
            group.lme.push_back(read_rows(lme + n * models * voxels, models, voxels));
            group.subject_ids.push_back(std::to_string(n + 1));
        }
        rfx::RfxOptions options;
        options.alpha0 = alpha0;
        options.tol = tol;
        options.max_iter = max_iter;
        *out = new evd_rfx_result{rfx::estimate_rfx(group, options)};
    });
}

void evd_rfx_destroy(evd_rfx_result* result) {
    delete result;
}

size_t evd_rfx_models(const evd_rfx_result* result) {
    return result ? static_cast<size_t>(result->posterior.alpha.rows()) : 0;
}

size_t evd_rfx_voxels(const evd_rfx_result* result) {
    return result ? static_cast<size_t>(result->posterior.alpha.cols()) : 0;
}

size_t evd_rfx_non_converged(const evd_rfx_result* result) {
    return result ? result->posterior.non_converged() : 0;
}

evd_status evd_rfx_alpha(const evd_rfx_result* result, double* out) {
    return guarded([&] {
        require(result && out, "null argument");
        write_rows(result->posterior.alpha, out);
    });
}

evd_status evd_rfx_expected_freq(const evd_rfx_result* result, double* out) {
    return guarded([&] {
        require(result && out, "null argument");
        write_rows(result->posterior.expected_freq, out);
    });
}

evd_status evd_rfx_converged(const evd_rfx_result* result, unsigned char* out) {
    return guarded([&] {
        require(result && out, "null argument");
        std::copy(result->posterior.converged.begin(), result->posterior.converged.end(), out);
    });
}

evd_status evd_exceedance_probabilities(const double* alpha, size_t models, size_t voxels,
                                        evd_ep_method method, size_t samples, uint64_t seed,
                                        double* ep, double* max_sum_deviation) {
    return guarded([&] {
        require(alpha && ep, "null argument");
        rfx::EpOptions options;
        switch (method) {
        case EVD_EP_DEFAULT:
            options.method = models == 2 ? rfx::EpMethod::ClosedForm : rfx::EpMethod::Integration;
            break;
        case EVD_EP_CLOSED_FORM:
            options.method = rfx::EpMethod::ClosedForm;
            break;
        case EVD_EP_SAMPLING:
            options.method = rfx::EpMethod::Sampling;
            break;
        case EVD_EP_INTEGRATION:
            options.method = rfx::EpMethod::Integration;
            break;
        default:
            throw InvalidArgument("unknown exceedance probability method");
        }
        options.samples = samples;
        options.seed = seed;
        rfx::EpDiagnostics diag;
        write_rows(rfx::exceedance_probabilities(read_rows(alpha, models, voxels), options, 0, &diag),
                   ep);
        if (max_sum_deviation) *max_sum_deviation = diag.max_sum_deviation;
    });
}

evd_status evd_pipeline_create(const char* config_path, evd_pipeline** out) {
    return guarded([&] {
        require(config_path && out, "null argument");
        auto* p = new evd_pipeline{};
        p->options.config_path = config_path;
        *out = p;
    });
}

void evd_pipeline_destroy(evd_pipeline* pipeline) {
    delete pipeline;
}

evd_status evd_pipeline_set_out_dir(evd_pipeline* pipeline, const char* dir) {
    return guarded([&] {
        require(pipeline && dir, "null argument");
        pipeline->options.out_dir = dir;
    });
}

evd_status evd_pipeline_set_seed(evd_pipeline* pipeline, uint64_t seed) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        pipeline->options.seed = seed;
    });
}

evd_status evd_pipeline_set_threads(evd_pipeline* pipeline, unsigned threads) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        require(threads > 0, "threads must be positive");
        pipeline->options.threads = threads;
    });
}

evd_status evd_pipeline_set_ep_method(evd_pipeline* pipeline, evd_ep_method method) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        switch (method) {
        case EVD_EP_DEFAULT:
            pipeline->options.ep_method.reset();
            break;
        case EVD_EP_CLOSED_FORM:
            pipeline->options.ep_method = rfx::EpMethod::ClosedForm;
            break;
        case EVD_EP_SAMPLING:
            pipeline->options.ep_method = rfx::EpMethod::Sampling;
            break;
        case EVD_EP_INTEGRATION:
            pipeline->options.ep_method = rfx::EpMethod::Integration;
            break;
        default:
            throw InvalidArgument("unknown exceedance probability method");
        }
    });
}

evd_status evd_pipeline_set_samples(evd_pipeline* pipeline, size_t samples) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        pipeline->options.samples = samples;
    });
}

evd_status evd_pipeline_set_chunk_size(evd_pipeline* pipeline, size_t chunk_size) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        require(chunk_size > 0, "chunk size must be positive");
        pipeline->options.chunk_size = static_cast<Index>(chunk_size);
    });
}

evd_status evd_pipeline_set_timings(evd_pipeline* pipeline, int enabled) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        pipeline->options.write_timings = enabled != 0;
    });
}

evd_status evd_parse_stages(const char* list, unsigned* mask) {
    return guarded([&] {
        require(list && mask, "null argument");
        *mask = io::parse_stages(list);
    });
}

evd_status evd_pipeline_run(evd_pipeline* pipeline, unsigned stage_mask, int* exit_code) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        require((stage_mask & ~static_cast<unsigned>(EVD_STAGE_ALL)) == 0, "unknown stage bits");
        pipeline->report = io::run_pipeline(pipeline->options, stage_mask);
        if (exit_code) *exit_code = pipeline->report.exit_code;
    });
}

size_t evd_pipeline_stage_count(const evd_pipeline* pipeline) {
    return pipeline ? pipeline->report.stages.size() : 0;
}

evd_status evd_pipeline_stage(const evd_pipeline* pipeline, size_t index, const char** name,
                              const char** status, const char** error) {
    return guarded([&] {
        require(pipeline, "pipeline is null");
        require(index < pipeline->report.stages.size(), "stage index out of range");
        const auto& s = pipeline->report.stages[index];
        if (name) *name = s.name.c_str();
        if (status) *status = s.status.c_str();
        if (error) *error = s.error.c_str();
    });
}

const char* evd_pipeline_error(const evd_pipeline* pipeline) {
    return pipeline ? pipeline->report.error.c_str() : "";
}

} // extern "C"
