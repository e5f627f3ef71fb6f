/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/config.hpp"

#include "evidencer/errors.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace evidencer::io {

using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: " + p.string());
}

const json& require(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + key + "'");
    return j.at(key);
}

std::vector<fs::path> path_list(const json& j, const fs::path& base, const std::string& ctx) {
    if (!j.is_array()) throw ConfigError(ctx + " must be an array of paths");
    std::vector<fs::path> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw ConfigError(ctx + " must contain strings");
        out.push_back(resolve(base, e.get<std::string>()));
        require_file(out.back(), ctx + " file");
    }
    return out;
}

std::vector<double> weight_list(const json& j, const std::string& ctx) {
    if (!j.is_array()) throw ConfigError(ctx + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) throw ConfigError(ctx + " must contain numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void parse_models(ModelSpaceConfig& cfg, const json& root, const fs::path& base) {
    if (!root.contains("models")) return;
    std::set<std::string> names;
    for (const auto& m : root.at("models")) {
        ModelEntry entry;
        entry.name = require(m, "name", "model").get<std::string>();
        if (!names.insert(entry.name).second) {
            throw ConfigError("duplicate model name '" + entry.name + "'");
        }
        entry.designs = path_list(require(m, "designs", "model " + entry.name), base,
                                  "designs of model " + entry.name);
        cfg.models.push_back(std::move(entry));
    }
    if (cfg.models.empty()) return;

    cfg.data = path_list(require(root, "data", "config"), base, "data");
    if (root.contains("sessions")) {
        const auto& s = root.at("sessions");
        const auto mode = s.value("mode", std::string("multi"));
        if (mode == "single") {
            cfg.session_mode = SessionMode::Single;
            cfg.single_scans = s.value("scans", Index{0});
            cfg.min_split_scans = s.value("min_scans", Index{40});
        } else if (mode != "multi") {
            throw ConfigError("sessions.mode must be 'multi' or 'single'");
        }
    }
    if (cfg.session_mode == SessionMode::Single && cfg.data.size() != 1) {
        throw ConfigError("single-session mode expects exactly one data file");
    }
    if (cfg.session_mode == SessionMode::Multi && cfg.data.size() < 2) {
        throw ConfigError("multi-session mode needs at least two data files");
    }
    for (const auto& m : cfg.models) {
        if (m.designs.size() != cfg.data.size()) {
            throw ConfigError("model '" + m.name + "' has " + std::to_string(m.designs.size()) +
                              " design files for " + std::to_string(cfg.data.size()) + " sessions");
        }
    }
    if (root.contains("precision")) {
        const auto& p = root.at("precision");
        if (p.is_string()) {
            if (p.get<std::string>() != "identity") {
                throw ConfigError("precision must be \"identity\" or a list of files");
            }
        } else {
            cfg.precision = path_list(p, base, "precision");
            if (cfg.precision.size() != cfg.data.size()) {
                throw ConfigError("need one precision file per session");
            }
        }
    }
}

} // namespace

std::vector<std::string> ModelSpaceConfig::model_names() const {
    if (!models.empty()) {
        std::vector<std::string> out;
        for (const auto& m : models) out.push_back(m.name);
        return out;
    }
    return group_models;
}

std::size_t ModelSpaceConfig::model_index(const std::string& name) const {
    const auto names = model_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw ConfigError("unknown model name '" + name + "'");
}

ModelSpaceConfig ModelSpaceConfig::parse(const std::string& text, const fs::path& base,
                                         const fs::path& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");

    ModelSpaceConfig cfg;
    cfg.source = source;
    cfg.raw_text = text;
    try {
        parse_models(cfg, root, base);

        if (root.contains("group")) {
            const auto& g = root.at("group");
            if (g.contains("models")) {
                for (const auto& n : g.at("models")) cfg.group_models.push_back(n.get<std::string>());
            }
            cfg.group_level = g.value("level", std::string("model"));
            if (cfg.group_level != "model" && cfg.group_level != "family") {
                throw ConfigError("group.level must be 'model' or 'family'");
            }
            std::set<std::string> ids;
            for (const auto& s : require(g, "subjects", "group")) {
                SubjectEntry entry;
                entry.id = require(s, "id", "group subject").get<std::string>();
                if (!ids.insert(entry.id).second) {
                    throw ConfigError("duplicate subject id '" + entry.id + "'");
                }
                if (s.contains("cvlme")) {
                    entry.cvlme = resolve(base, s.at("cvlme").get<std::string>());
                    require_file(entry.cvlme, "cvLME of subject " + entry.id);
                } else if (s.contains("config")) {
                    entry.config = resolve(base, s.at("config").get<std::string>());
                    require_file(entry.config, "config of subject " + entry.id);
                } else {
                    throw ConfigError("subject '" + entry.id + "' needs 'cvlme' or 'config'");
                }
                cfg.subjects.push_back(std::move(entry));
            }
        }

        if (root.contains("families")) {
            std::set<std::string> names;
            for (const auto& f : root.at("families")) {
                FamilyEntry entry;
                entry.name = require(f, "name", "family").get<std::string>();
                if (!names.insert(entry.name).second) {
                    throw ConfigError("duplicate family name '" + entry.name + "'");
                }
                for (const auto& m : require(f, "models", "family " + entry.name)) {
                    entry.models.push_back(m.get<std::string>());
                }
                if (f.contains("weights")) {
                    entry.weights = weight_list(f.at("weights"), "weights of family " + entry.name);
                }
                cfg.families.push_back(std::move(entry));
            }
        }

        if (root.contains("priors")) {
            const auto& p = root.at("priors");
            if (p.contains("models")) cfg.model_prior = weight_list(p.at("models"), "priors.models");
        }

        if (root.contains("bma")) {
            const auto& b = root.at("bma");
            BmaEntry entry;
            entry.regressor = b.value("regressor", std::string("beta"));
            entry.variant = b.value("variant", std::string("cv"));
            if (entry.variant != "cv" && entry.variant != "oos") {
                throw ConfigError("bma.variant must be 'cv' or 'oos'");
            }
            for (const auto& [name, path] : require(b, "betas", "bma").items()) {
                entry.betas[name] = resolve(base, path.get<std::string>());
                require_file(entry.betas[name], "betas of model " + name);
            }
            cfg.bma = std::move(entry);
        }

        if (root.contains("rfx")) {
            const auto& r = root.at("rfx");
            cfg.rfx.alpha0 = r.value("alpha0", cfg.rfx.alpha0);
            cfg.rfx.tol = r.value("tol", cfg.rfx.tol);
            cfg.rfx.max_iter = r.value("max_iter", cfg.rfx.max_iter);
            if (!(cfg.rfx.alpha0 > 0.0) || !(cfg.rfx.tol > 0.0) || cfg.rfx.max_iter < 1) {
                throw ConfigError("rfx options must be positive");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!cfg.has_models() && !cfg.has_group()) {
        throw ConfigError("config defines neither 'models' nor 'group'");
    }
    return cfg;
}

ModelSpaceConfig ModelSpaceConfig::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.parent_path(), path);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace evidencer::io
