/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#include "evidencer/csv.hpp"
#include "fixtures.hpp"

#include <json.hpp>

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

using namespace evidencer;
using namespace evidencer::testing;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& log, const std::string& env = "") {
    const std::string cmd = env + " '" EVIDENCER_CLI_PATH "' " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) {
    return "'" + p.string() + "'";
}

} // namespace

TEST_CASE("command line surface") {
    const auto dir = scratch_dir("cli");
    const auto log = dir / "log.txt";
    const auto fx = write_subject(dir / "subject", 201);
    const auto group = write_group(dir / "group", 202, 6, 4, 5);

    CHECK(run_cli("--help", log) == 0);
    CHECK(read_text(log).find("bms-group") != std::string::npos);
    CHECK(run_cli("--version", log) == 0);
    CHECK(read_text(log).find("evidencer 1.") != std::string::npos);

    SUBCASE("one subcommand per stage") {
        CHECK(run_cli("cvlme --config " + q(fx.config) + " --out " + q(dir / "o1"), log) == 0);
        CHECK(fs::exists(dir / "o1" / "cvLME.csv"));
        CHECK_FALSE(fs::exists(dir / "o1" / "cvAcc.csv"));
        CHECK(run_cli("anc --config " + q(fx.config) + " --out " + q(dir / "o2"), log) == 0);
        CHECK(fs::exists(dir / "o2" / "cvCom.csv"));
        CHECK(run_cli("lfe --config " + q(fx.config) + " --out " + q(dir / "o3"), log) == 0);
        CHECK(fs::exists(dir / "o3" / "LFE.csv"));
        CHECK(run_cli("bma --config " + q(fx.config) + " --out " + q(dir / "o4"), log) == 0);
        CHECK(fs::exists(dir / "o4" / "BMA.csv"));
        CHECK(run_cli("bms-group --config " + q(group) + " --out " + q(dir / "o5"), log) == 0);
        CHECK(fs::exists(dir / "o5" / "alpha.csv"));
        CHECK_FALSE(fs::exists(dir / "o5" / "EP.csv"));
        CHECK(run_cli("ep --config " + q(group) + " --out " + q(dir / "o6") +
                          " --ep-method sampling --samples 2e4 --seed 3",
                      log) == 0);
        CHECK(fs::exists(dir / "o6" / "EP.csv"));
        const auto manifest = nlohmann::json::parse(read_text(dir / "o6" / "manifest.json"));
        CHECK(manifest["ep_method"] == "sampling");
        CHECK(manifest["samples"] == 20000);
        CHECK(manifest["seed"] == 3);
    }

    SUBCASE("pipeline with a stage list and options after the subcommand") {
        CHECK(run_cli("pipeline --stages cvlme,lfe --config " + q(fx.config) + " --out " + q(dir / "p") +
                          " --threads auto --timings",
                      log) == 0);
        CHECK(fs::exists(dir / "p" / "LFE.csv"));
        CHECK(fs::exists(dir / "p" / "timings.csv"));
        CHECK_FALSE(fs::exists(dir / "p" / "BMA.csv"));
        CHECK(read_text(log).find("lfe: ok") != std::string::npos);
    }

    SUBCASE("thread count from the environment") {
        CHECK(run_cli("--config " + q(fx.config) + " --out " + q(dir / "e") + " pipeline", log,
                      "EVIDENCER_THREADS=3") == 0);
        CHECK(run_cli("--config " + q(fx.config) + " --out " + q(dir / "e") + " pipeline", log,
                      "EVIDENCER_THREADS=zero") == 2);
    }

    SUBCASE("exit codes") {
        CHECK(run_cli("cvlme --config " + q(dir / "none.json") + " --out " + q(dir / "x"), log) == 2);
        CHECK(fs::exists(dir / "x" / "manifest.json"));
        CHECK(run_cli("frobnicate --config " + q(fx.config), log) == 2);
        CHECK(run_cli("cvlme", log) == 2);
        CHECK(run_cli("ep --config " + q(group) + " --ep-method magic", log) == 2);
        CHECK(run_cli("ep --config " + q(group) + " --out " + q(dir / "y") + " --samples 0", log) == 2);
        CHECK(run_cli("pipeline --stages cvlme,nope --config " + q(fx.config), log) == 2);

        Matrix x = io::load_matrix(dir / "subject" / "x2_1.csv").values;
        x.col(2) = x.col(1);
        io::write_matrix(dir / "subject" / "x2_1.csv", x);
        CHECK(run_cli("cvlme --config " + q(fx.config) + " --out " + q(dir / "z"), log) == 3);
        CHECK(read_text(log).find("cvlme: failed") != std::string::npos);
    }
}
