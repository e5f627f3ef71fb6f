/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface of the evidencer library.
 *
 * Matrices are dense, row-major arrays of double. Every function that can
 * fail returns an evd_status; on failure evd_last_error() describes the
 * problem for the calling thread. Output buffers are owned by the caller.
 */

#ifndef EVIDENCER_H
#define EVIDENCER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(EVD_BUILDING_LIBRARY)
#define EVD_API __declspec(dllexport)
#else
#define EVD_API __declspec(dllimport)
#endif
#else
#define EVD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evd_status {
    EVD_OK = 0,
    EVD_ERR_DOMAIN = 1,
    EVD_ERR_DECOMPOSITION = 2,
    EVD_ERR_ESTIMATION = 3,
    EVD_ERR_LAYOUT = 4,
    EVD_ERR_PARSE = 5,
    EVD_ERR_CONFIG = 6,
    EVD_ERR_NUMERIC = 7,
    EVD_ERR_IO = 8,
    EVD_ERR_INVALID_ARGUMENT = 9,
    EVD_ERR_INTERNAL = 10
} evd_status;

typedef enum evd_ep_method {
    EVD_EP_DEFAULT = -1, /* closed form for two models, integration otherwise */
    EVD_EP_CLOSED_FORM = 0,
    EVD_EP_SAMPLING = 1,
    EVD_EP_INTEGRATION = 2
} evd_ep_method;

enum {
    EVD_STAGE_CVLME = 1u << 0,
    EVD_STAGE_ANC = 1u << 1,
    EVD_STAGE_LFE = 1u << 2,
    EVD_STAGE_BMS = 1u << 3,
    EVD_STAGE_EP = 1u << 4,
    EVD_STAGE_BMA = 1u << 5,
    EVD_STAGE_ALL = (1u << 6) - 1
};

enum {
    EVD_EXIT_OK = 0,
    EVD_EXIT_CONFIG = 2,
    EVD_EXIT_NUMERIC = 3,
    EVD_EXIT_PARTIAL = 4
};

EVD_API const char* evd_version(void);
EVD_API const char* evd_last_error(void);
EVD_API const char* evd_status_string(evd_status status);

/* ------------------------------------------------------------------ */
/* Cross-validated evidence of one model over several sessions.        */

typedef struct evd_cv_model evd_cv_model;

EVD_API evd_status evd_cv_model_create(size_t regressors, size_t voxels, evd_cv_model** out);
EVD_API void evd_cv_model_destroy(evd_cv_model* model);

/* y: scans x voxels, x: scans x regressors. p_diag (length scans) may be
 * NULL for an identity precision. */
EVD_API evd_status evd_cv_model_add_session(evd_cv_model* model, size_t scans, const double* y,
                                            const double* x, const double* p_diag);

/* Same with a full scans x scans precision matrix. */
EVD_API evd_status evd_cv_model_add_session_full(evd_cv_model* model, size_t scans,
                                                 const double* y, const double* x,
                                                 const double* precision);

EVD_API size_t evd_cv_model_sessions(const evd_cv_model* model);

/* Runs the cross-validation. Each output has length voxels; any may be NULL. */
EVD_API evd_status evd_cv_model_compute(evd_cv_model* model, double* cv_lme, double* cv_acc,
                                        double* cv_com);

/* Per-fold results of the last evd_cv_model_compute call. */
EVD_API evd_status evd_cv_model_fold(const evd_cv_model* model, size_t fold, double* oos_lme,
                                     double* oos_acc, double* oos_com);

/* ------------------------------------------------------------------ */
/* Model comparison.                                                   */

/* lme: models x voxels. family_of_model[m] in [0, families). weights holds
 * the within-family prior of each model and may be NULL for uniform.
 * out: families x voxels. */
EVD_API evd_status evd_log_family_evidence(const double* lme, size_t models, size_t voxels,
                                           const size_t* family_of_model,
                                           const double* weights, size_t families, double* out);

/* lme and pp: models x voxels. prior (length models) may be NULL. */
EVD_API evd_status evd_posterior_probabilities(const double* lme, size_t models, size_t voxels,
                                               const double* prior, double* pp);

/* betas[m]: sessions x voxels estimates of model m. pp: models x voxels.
 * out: length voxels. */
EVD_API evd_status evd_cv_bma(const double* const* betas, size_t models, size_t sessions,
                              size_t voxels, const double* pp, double* out);

/* pp_per_session[s]: models x voxels posterior probabilities of session s. */
EVD_API evd_status evd_oos_bma(const double* const* betas, size_t models, size_t sessions,
                               size_t voxels, const double* const* pp_per_session, double* out);

/* ------------------------------------------------------------------ */
/* Random-effects Bayesian model selection.                            */

typedef struct evd_rfx_result evd_rfx_result;

/* lme: subjects x models x voxels, lme[(n * models + m) * voxels + v]. */
EVD_API evd_status evd_rfx_estimate(const double* lme, size_t subjects, size_t models,
                                    size_t voxels, double alpha0, double tol, int max_iter,
                                    evd_rfx_result** out);
EVD_API void evd_rfx_destroy(evd_rfx_result* result);
EVD_API size_t evd_rfx_models(const evd_rfx_result* result);
EVD_API size_t evd_rfx_voxels(const evd_rfx_result* result);
EVD_API size_t evd_rfx_non_converged(const evd_rfx_result* result);
/* models x voxels */
EVD_API evd_status evd_rfx_alpha(const evd_rfx_result* result, double* out);
EVD_API evd_status evd_rfx_expected_freq(const evd_rfx_result* result, double* out);
/* length voxels, 1 when the voxel converged */
EVD_API evd_status evd_rfx_converged(const evd_rfx_result* result, unsigned char* out);

/* alpha and ep: models x voxels. max_sum_deviation may be NULL; it receives
 * max |sum(ep) - 1| over voxels for the integration method. */
EVD_API evd_status evd_exceedance_probabilities(const double* alpha, size_t models,
                                                size_t voxels, evd_ep_method method,
                                                size_t samples, uint64_t seed, double* ep,
                                                double* max_sum_deviation);

/* ------------------------------------------------------------------ */
/* Config-driven pipeline writing CSV tables and manifest.json.        */

typedef struct evd_pipeline evd_pipeline;

EVD_API evd_status evd_pipeline_create(const char* config_path, evd_pipeline** out);
EVD_API void evd_pipeline_destroy(evd_pipeline* pipeline);
EVD_API evd_status evd_pipeline_set_out_dir(evd_pipeline* pipeline, const char* dir);
EVD_API evd_status evd_pipeline_set_seed(evd_pipeline* pipeline, uint64_t seed);
EVD_API evd_status evd_pipeline_set_threads(evd_pipeline* pipeline, unsigned threads);
EVD_API evd_status evd_pipeline_set_ep_method(evd_pipeline* pipeline, evd_ep_method method);
EVD_API evd_status evd_pipeline_set_samples(evd_pipeline* pipeline, size_t samples);
EVD_API evd_status evd_pipeline_set_chunk_size(evd_pipeline* pipeline, size_t chunk_size);
EVD_API evd_status evd_pipeline_set_timings(evd_pipeline* pipeline, int enabled);

/* "all" or a comma-separated list of cvlme, anc, lfe, bms, ep, bma. */
EVD_API evd_status evd_parse_stages(const char* list, unsigned* mask);

/* stage_mask 0 runs every stage the config supports. exit_code receives one
 * of the EVD_EXIT_* values; the return value is EVD_OK whenever the run
 * itself completed, including runs whose stages failed. */
EVD_API evd_status evd_pipeline_run(evd_pipeline* pipeline, unsigned stage_mask, int* exit_code);

EVD_API size_t evd_pipeline_stage_count(const evd_pipeline* pipeline);
/* Strings stay valid until the next run or destroy. */
EVD_API evd_status evd_pipeline_stage(const evd_pipeline* pipeline, size_t index,
                                      const char** name, const char** status, const char** error);
EVD_API const char* evd_pipeline_error(const evd_pipeline* pipeline);

#ifdef __cplusplus
}
#endif

#endif
