/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

// Command-line front end. Talks to the library only through the C API.

#include "evidencer/evidencer.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

struct Flags {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::string threads;
    std::string ep_method;
    std::string samples = "1e6";
    std::size_t chunk_size = 4096;
    bool timings = false;
    std::string stages = "all";
};

std::optional<unsigned> parse_threads(const std::string& text) {
    if (text == "auto") return std::max(1u, std::thread::hardware_concurrency());
    try {
        std::size_t used = 0;
        const long n = std::stol(text, &used);
        if (used == text.size() && n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

std::optional<std::size_t> parse_samples(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && v >= 1 && v <= 1e15 && v == std::floor(v)) {
            return static_cast<std::size_t>(v);
        }
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

int usage_error(const std::string& message) {
    std::cerr << "evidencer: " << message << '\n';
    return EVD_EXIT_CONFIG;
}

int run(const Flags& flags, const std::string& stage_list) {
    std::string threads_text = flags.threads;
    if (threads_text.empty()) {
        const char* env = std::getenv("EVIDENCER_THREADS");
        threads_text = env && *env ? env : "1";
    }
    const auto threads = parse_threads(threads_text);
    if (!threads) return usage_error("--threads must be a positive integer or 'auto'");
    const auto samples = parse_samples(flags.samples);
    if (!samples) return usage_error("--samples must be a positive integer");

    evd_ep_method method = EVD_EP_DEFAULT;
    if (flags.ep_method == "closed-form") {
        method = EVD_EP_CLOSED_FORM;
    } else if (flags.ep_method == "sampling") {
        method = EVD_EP_SAMPLING;
    } else if (flags.ep_method == "integration") {
        method = EVD_EP_INTEGRATION;
    } else if (!flags.ep_method.empty()) {
        return usage_error("unknown --ep-method '" + flags.ep_method + "'");
    }

    unsigned mask = 0;
    if (stage_list != "all" && evd_parse_stages(stage_list.c_str(), &mask) != EVD_OK) {
        return usage_error(evd_last_error());
    }

    evd_pipeline* p = nullptr;
    if (evd_pipeline_create(flags.config.c_str(), &p) != EVD_OK) {
        return usage_error(evd_last_error());
    }
    evd_pipeline_set_out_dir(p, flags.out.c_str());
    evd_pipeline_set_seed(p, flags.seed);
    evd_pipeline_set_threads(p, *threads);
    evd_pipeline_set_ep_method(p, method);
    evd_pipeline_set_samples(p, *samples);
    if (evd_pipeline_set_chunk_size(p, flags.chunk_size) != EVD_OK) {
        evd_pipeline_destroy(p);
        return usage_error(evd_last_error());
    }
    evd_pipeline_set_timings(p, flags.timings ? 1 : 0);

    int exit_code = EVD_EXIT_NUMERIC;
    if (evd_pipeline_run(p, mask, &exit_code) != EVD_OK) {
        std::cerr << "evidencer: " << evd_last_error() << '\n';
        evd_pipeline_destroy(p);
        return EVD_EXIT_NUMERIC;
    }
    if (*evd_pipeline_error(p)) std::cerr << "evidencer: " << evd_pipeline_error(p) << '\n';
    for (std::size_t i = 0; i < evd_pipeline_stage_count(p); ++i) {
        const char* name = nullptr;
        const char* status = nullptr;
        const char* error = nullptr;
        evd_pipeline_stage(p, i, &name, &status, &error);
        if (std::string(status) == "not_requested") continue;
        std::cout << name << ": " << status;
        if (*error) std::cout << " (" << error << ')';
        std::cout << '\n';
    }
    evd_pipeline_destroy(p);
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-validated Bayesian model assessment for mass-univariate GLMs"};
    app.set_version_flag("--version", std::string("evidencer ") + evd_version());
    app.require_subcommand(1);
    app.fallthrough();

    Flags flags;
    app.add_option("--config", flags.config, "Model-space config (JSON)")->required();
    app.add_option("--out", flags.out, "Output directory");
    app.add_option("--seed", flags.seed, "Seed for exceedance probability sampling");
    app.add_option("--threads", flags.threads, "Worker threads: n or auto (env EVIDENCER_THREADS)");
    app.add_option("--ep-method", flags.ep_method, "closed-form, sampling or integration")
        ->check(CLI::IsMember({"closed-form", "sampling", "integration"}));
    app.add_option("--samples", flags.samples, "Dirichlet draws for sampling EPs (default 1e6)");
    app.add_option("--chunk-size", flags.chunk_size, "Voxels per work chunk");
    app.add_flag("--timings", flags.timings, "Write per-stage wall times to timings.csv");

    struct Command {
        const char* name;
        const char* stage;
        const char* help;
    };
    const Command commands[] = {
        {"cvlme", "cvlme", "Cross-validated and out-of-sample log model evidence"},
        {"anc", "anc", "Accuracy and complexity of the cross-validated evidence"},
        {"lfe", "lfe", "Log family evidence"},
        {"bms-group", "bms", "Random-effects model selection over subjects"},
        {"ep", "ep", "Exceedance probabilities"},
        {"bma", "bma", "Cross-validated Bayesian model averaging"},
    };
    std::string selected;
    for (const auto& c : commands) {
        app.add_subcommand(c.name, c.help)->final_callback([&selected, &c] { selected = c.stage; });
    }
    auto* pipeline = app.add_subcommand("pipeline", "Run several stages in one go");
    pipeline->add_option("--stages", flags.stages, "all or a comma-separated stage list");
    pipeline->final_callback([&] { selected = flags.stages; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? EVD_EXIT_OK : EVD_EXIT_CONFIG;
    }
    return run(flags, selected);
}
