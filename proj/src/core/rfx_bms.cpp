/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/rfx_bms.hpp"

#include "evidencer/errors.hpp"
#include "evidencer/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string_view>
#include <unordered_map>

namespace evidencer::rfx {

namespace {

void require_alpha(const Vector& alpha, Index min_k) {
    if (alpha.size() < min_k) {
        throw DomainError("exceedance probabilities need at least " + std::to_string(min_k) +
                          " models, got " + std::to_string(alpha.size()));
    }
    if (!(alpha.array() > 0.0).all() || !alpha.allFinite()) {
        throw DomainError("Dirichlet concentrations must be positive and finite");
    }
}

// phi_j on one rule; prefix/suffix products avoid dividing by CDFs that may
// underflow to zero.
Vector integrate_ep(const Vector& alpha, const special::QuadratureRule& rule,
                    const std::vector<double>& log_norm) {
    const auto k = static_cast<std::size_t>(alpha.size());
    Vector phi = Vector::Zero(alpha.size());
    std::vector<double> cdf(k), prefix(k + 1), suffix(k + 1);
    for (std::size_t n = 0; n < rule.size(); ++n) {
        const double q = rule.nodes[n];
        const double log_q = std::log(q);
        for (std::size_t i = 0; i < k; ++i) {
            cdf[i] = special::reg_lower_incomplete_gamma(alpha[static_cast<Index>(i)], q);
        }
        prefix[0] = 1.0;
        for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * cdf[i];
        suffix[k] = 1.0;
        for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * cdf[i];
        for (std::size_t j = 0; j < k; ++j) {
            const double others = prefix[j] * suffix[j + 1];
            if (others == 0.0) continue;
            const double a = alpha[static_cast<Index>(j)];
            const double pdf = std::exp((a - 1.0) * log_q - q - log_norm[j]);
            phi[static_cast<Index>(j)] += rule.weights[n] * pdf * others;
        }
    }
    return phi;
}

std::string alpha_key(const Eigen::Ref<const Vector>& alpha) {
    std::string key(static_cast<std::size_t>(alpha.size()) * sizeof(double), '\0');
    for (Index i = 0; i < alpha.size(); ++i) {
        const double a = alpha[i];
        std::memcpy(key.data() + static_cast<std::size_t>(i) * sizeof(double), &a, sizeof(double));
    }
    return key;
}

} // namespace

// ---------------------------------------------------------------- estimation

void GroupLmeStack::validate() const {
    if (lme.size() < 2) throw DomainError("RFX BMS needs at least two subjects");
    if (!subject_ids.empty() && subject_ids.size() != lme.size()) {
        throw DomainError("subject id count does not match the LME stack");
    }
    const Index k = models();
    const Index v = voxels();
    if (k < 2) throw DomainError("RFX BMS needs at least two models");
    for (std::size_t n = 0; n < lme.size(); ++n) {
        if (lme[n].rows() != k || lme[n].cols() != v) {
            throw DomainError("subject " + std::to_string(n) + " LME matrix has shape " +
                              std::to_string(lme[n].rows()) + "x" + std::to_string(lme[n].cols()) +
                              ", expected " + std::to_string(k) + "x" + std::to_string(v));
        }
        if (!lme[n].allFinite()) {
            throw DomainError("subject " + std::to_string(n) + " has non-finite LMEs");
        }
    }
}

Matrix GroupLmeStack::voxel(Index v) const {
    Matrix out(subjects(), models());
    for (Index n = 0; n < subjects(); ++n) {
        out.row(n) = lme[static_cast<std::size_t>(n)].col(v).transpose();
    }
    return out;
}

std::size_t DirichletPosterior::non_converged() const {
    return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), 0));
}

RfxVoxelFit estimate_rfx_voxel(const Matrix& lme, const RfxOptions& options) {
    if (!(options.alpha0 > 0.0) || !std::isfinite(options.alpha0)) {
        throw DomainError("alpha0 must be positive");
    }
    if (!(options.tol > 0.0)) throw DomainError("RFX tolerance must be positive");
    if (!lme.allFinite()) throw DomainError("RFX BMS requires finite LMEs");
    const Index k = lme.cols();

    RfxVoxelFit fit;
    fit.alpha = Vector::Constant(k, options.alpha0);
    Eigen::ArrayXXd g(lme.rows(), k);
    Eigen::ArrayXd psi(k);
    for (int it = 1; it <= options.max_iter; ++it) {
        const double psi_sum = special::digamma(fit.alpha.sum());
        for (Index j = 0; j < k; ++j) psi(j) = special::digamma(fit.alpha(j)) - psi_sum;
        g = lme.array().rowwise() + psi.transpose();
        g.colwise() -= g.rowwise().maxCoeff();
        g = g.exp();
        g.colwise() /= g.rowwise().sum();
        const Vector next = (options.alpha0 + g.colwise().sum()).matrix().transpose();
        const double delta = (next - fit.alpha).cwiseAbs().maxCoeff();
        fit.alpha = next;
        fit.iterations = it;
        if (delta < options.tol) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

DirichletPosterior estimate_rfx(const GroupLmeStack& group, const RfxOptions& options) {
    group.validate();
    DirichletPosterior post;
    post.alpha0 = options.alpha0;
    post.alpha.resize(group.models(), group.voxels());
    post.converged.resize(static_cast<std::size_t>(group.voxels()));
    post.iterations.resize(static_cast<std::size_t>(group.voxels()));
    for (Index v = 0; v < group.voxels(); ++v) {
        const auto fit = estimate_rfx_voxel(group.voxel(v), options);
        post.alpha.col(v) = fit.alpha;
        post.converged[static_cast<std::size_t>(v)] = fit.converged ? 1 : 0;
        post.iterations[static_cast<std::size_t>(v)] = fit.iterations;
    }
    post.expected_freq = post.alpha.array().rowwise() / post.alpha.colwise().sum().array();
    return post;
}

// ---------------------------------------------------------------- exceedance

EpMethod parse_ep_method(const std::string& name) {
    if (name == "closed-form") return EpMethod::ClosedForm;
    if (name == "sampling") return EpMethod::Sampling;
    if (name == "integration") return EpMethod::Integration;
    throw DomainError("unknown EP method '" + name +
                      "' (expected closed-form, sampling or integration)");
}

std::string to_string(EpMethod method) {
    switch (method) {
    case EpMethod::ClosedForm:
        return "closed-form";
    case EpMethod::Sampling:
        return "sampling";
    case EpMethod::Integration:
        break;
    }
    return "integration";
}

Vector ep_beta_closed_form(const Vector& alpha) {
    if (alpha.size() != 2) {
        throw DomainError("closed-form exceedance probabilities require exactly two models");
    }
    require_alpha(alpha, 2);
    Vector phi(2);
    phi(0) = 1.0 - special::reg_incomplete_beta(0.5, alpha(0), alpha(1));
    phi(1) = 1.0 - phi(0);
    return phi;
}

double GammaSampler::operator()(double shape, std::mt19937_64& rng) {
    if (shape < 1.0) {
        const double u = uniform_(rng);
        return (*this)(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal_(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_(rng);
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

Vector ep_sampling(const Vector& alpha, std::size_t samples, std::mt19937_64& rng) {
    require_alpha(alpha, 2);
    if (samples < kMinSamples) {
        throw DomainError("ep_sampling needs at least " + std::to_string(kMinSamples) +
                          " samples, got " + std::to_string(samples));
    }
    const Index k = alpha.size();
    std::vector<std::size_t> wins(static_cast<std::size_t>(k), 0);
    Vector q(k);
    GammaSampler gamma;
    for (std::size_t s = 0; s < samples; ++s) {
        // Normalising by the sum does not move the argmax.
        for (Index j = 0; j < k; ++j) q(j) = gamma(alpha(j), rng);
        Index best = 0;
        for (Index j = 1; j < k; ++j) {
            if (q(j) > q(best)) best = j;
        }
        ++wins[static_cast<std::size_t>(best)];
    }
    Vector phi(k);
    for (Index j = 0; j < k; ++j) {
        phi(j) = static_cast<double>(wins[static_cast<std::size_t>(j)]) /
                 static_cast<double>(samples);
    }
    return phi;
}

Vector ep_sampling(const Vector& alpha, std::size_t samples, std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    return ep_sampling(alpha, samples, rng);
}

EpIntegration ep_integration(const Vector& alpha, double rel_tail) {
    require_alpha(alpha, 2);
    const auto k = static_cast<std::size_t>(alpha.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::vector<double> log_norm(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double a = alpha[static_cast<Index>(j)];
        const auto support = special::gamma_support(a, rel_tail);
        lo = std::min(lo, support.lower);
        hi = std::max(hi, support.upper);
        log_norm[j] = special::log_gamma(a);
    }
    std::size_t panels = special::default_panels(lo, hi, alpha.maxCoeff());
    constexpr std::size_t kMaxPanels = std::size_t{1} << 16;

    Vector previous = integrate_ep(alpha, special::log_uniform_rule(lo, hi, panels), log_norm);
    for (;;) {
        if (panels * 2 > kMaxPanels) {
            throw NumericError("exceedance probability quadrature did not converge");
        }
        panels *= 2;
        Vector current = integrate_ep(alpha, special::log_uniform_rule(lo, hi, panels), log_norm);
        const double change = (current - previous).cwiseAbs().maxCoeff();
        previous = std::move(current);
        if (change < kEpIntegrationTol) break;
    }
    EpIntegration out;
    out.sum_deviation = previous.sum() - 1.0;
    out.ep = std::move(previous);
    out.panels = panels;
    return out;
}

Matrix exceedance_probabilities(const Matrix& alpha, const EpOptions& options,
                                std::uint64_t stream, EpDiagnostics* diagnostics) {
    const Index k = alpha.rows();
    const Index voxels = alpha.cols();
    Matrix ep(k, voxels);
    EpDiagnostics local;
    switch (options.method) {
    case EpMethod::ClosedForm:
        for (Index v = 0; v < voxels; ++v) ep.col(v) = ep_beta_closed_form(alpha.col(v));
        break;
    case EpMethod::Sampling: {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                          static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32)};
        std::mt19937_64 rng(seq);
        for (Index v = 0; v < voxels; ++v) {
            ep.col(v) = ep_sampling(alpha.col(v), options.samples, rng);
            ++local.sampling_calls;
        }
        break;
    }
    case EpMethod::Integration: {
        std::unordered_map<std::string, EpIntegration> cache;
        for (Index v = 0; v < voxels; ++v) {
            auto key = alpha_key(alpha.col(v));
            auto it = cache.find(key);
            if (it == cache.end()) {
                it = cache.emplace(std::move(key), ep_integration(alpha.col(v), options.rel_tail))
                         .first;
            } else {
                ++local.cache_hits;
            }
            ep.col(v) = it->second.ep;
            local.max_sum_deviation =
                std::max(local.max_sum_deviation, std::fabs(it->second.sum_deviation));
        }
        break;
    }
    }
    if (diagnostics) *diagnostics = local;
    return ep;
}

} // namespace evidencer::rfx
