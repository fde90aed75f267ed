// Copyright 2026 The photonsub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "photonsub/cli.hpp"
#include "photonsub/errors.hpp"
#include "photonsub/scenario.hpp"

using namespace photonsub;
using nlohmann::json;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), "photonsub");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
   public:
    TempDir() : path_(std::filesystem::temp_directory_path() / ("photonsub_test_" + std::to_string(counter_++))) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::filesystem::remove_all(path_);
    }
    std::filesystem::path write(const std::string &name, const std::string &text) const {
        std::ofstream(path_ / name) << text;
        return path_ / name;
    }
    const std::filesystem::path &path() const {
        return path_;
    }

   private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

// Kurtosis-only view of a preset: fast, and still exercises the channel and the basis.
std::vector<double> preset_kurtosis(const std::string &name) {
    ScenarioConfig cfg = load_scenario(name);
    cfg.analyses = {Analysis::kurtosis};
    for (auto &m : cfg.measurements) {
        m.samples = 0;
        m.tomography.reset();
    }
    nlohmann::ordered_json report = run_scenario(cfg);
    std::vector<double> out;
    for (const auto &m : report["measurements"]) out.push_back(m["excess_kurtosis"]["analytic"].get<double>());
    return out;
}

int argmin(const std::vector<double> &v) {
    return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
}

const char *kSmall = R"({
  "schema": "photonsub.scenario/1",
  "name": "small",
  "state": {"squeeze_db": [[1.8, -1.8]]},
  "subtraction": {"mode": 0, "channel": "ideal"},
  "measurements": [{"mode": "HG0", "samples": 2000}],
  "analyses": ["W0", "purity", "kurtosis"]
})";

}  // namespace

TEST_CASE("configs parse with defaults") {
    ScenarioConfig cfg = parse_scenario(kSmall);
    CHECK(cfg.name == "small");
    CHECK(cfg.modes() == 1);
    REQUIRE(cfg.subtraction);
    CHECK(cfg.subtraction->is_ideal());
    REQUIRE(cfg.measurements.size() == 1);
    CHECK(cfg.measurements[0].samples == 2000);
    CHECK(cfg.measurements[0].eta == 1.0);
    CHECK(cfg.wants(Analysis::kurtosis));
    CHECK_FALSE(cfg.wants(Analysis::wigner));
}

TEST_CASE("config errors carry a line, a column and the field") {
    try {
        parse_scenario("{\n  \"schema\": \"photonsub.scenario/1\",\n  \"state\": \"paper-ED3\",\n  \"colour\": 1\n}");
        FAIL("expected a ConfigError");
    } catch (const ConfigError &e) {
        CHECK(e.line() == 4);
        CHECK(e.column() > 0);
        CHECK(e.field() == "/colour");
    }
    try {
        parse_scenario("{\n  \"schema\": \"photonsub.scenario/1\",\n  \"state\": [1, \n}");
        FAIL("expected a ConfigError");
    } catch (const ConfigError &e) {
        CHECK(e.line() == 4);
    }
    auto rejects = [](const std::string &text) { CHECK_THROWS_AS(parse_scenario(text), ConfigError); };
    const std::string head = R"({"schema": "photonsub.scenario/1", "state": "paper-ED3", )";
    rejects(R"({"schema": "photonsub.scenario/2", "state": "paper-ED3", "analyses": ["duan"]})");
    rejects(head + R"("basis": "LC", "measurements": [{"mode": "LC7"}], "analyses": ["kurtosis"]})");
    rejects(head + R"("measurements": [{"mode": 0, "samples": 10}], "analyses": ["kurtosis"]})");
    rejects(head + R"("measurements": [{"mode": 0, "eta": 1.5}], "analyses": ["kurtosis"]})");
    rejects(head + R"("subtraction": {"mode": 0, "channel": {"w0": 0.1, "p0": 0.1, "N": 4}}, "analyses": ["kurtosis"]})");
    rejects(head + R"("analyses": ["kurtosis"]})");
    rejects(head + R"("analyses": []})");
    rejects(head + R"("measurements": [{"mode": 0}], "analyses": ["fidelity"]})");
    rejects(head + R"("basis": "EPR", "analyses": ["nullifiers"]})");
}

TEST_CASE("presets load and cover the figures") {
    std::vector<std::string> names = preset_names();
    for (const char *want : {"fig2a-subtract-HG0", "fig2b-epr", "fig3a-subtract-LC3", "fig3b-subtract-SC0",
                             "ed1-loss-corrected", "ed2-mode-mismatch", "vacuum"}) {
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    }
    for (const auto &name : names) {
        INFO(name);
        CHECK(is_preset(name));
        CHECK_NOTHROW(parse_scenario(preset_json(name)));
    }
}

TEST_CASE("presets reproduce the figure patterns") {
    std::vector<double> hg0 = preset_kurtosis("fig2a-subtract-HG0");
    REQUIRE(hg0.size() == 3);
    CHECK(hg0[0] < 0.0);
    CHECK(hg0[1] >= 0.0);
    CHECK(hg0[2] >= 0.0);

    CHECK(argmin(preset_kurtosis("fig3a-subtract-LC3")) == 2);
    CHECK(argmin(preset_kurtosis("fig3a-subtract-LC2")) == 3);
    CHECK(argmin(preset_kurtosis("fig3b-subtract-SC0")) == 2);
    CHECK(preset_kurtosis("fig3a-subtract-superposition")[3] < preset_kurtosis("fig3a-subtract-LC2")[3]);

    std::vector<double> epr = preset_kurtosis("fig2b-epr");
    REQUIRE(epr.size() == 2);
    CHECK(epr[1] < -0.1);
    CHECK(epr[1] < epr[0]);
}

TEST_CASE("reports are deterministic and cross-validate") {
    ScenarioConfig cfg = parse_scenario(kSmall);
    RunOptions options;
    options.cross_validate = true;
    nlohmann::ordered_json a = run_scenario(cfg, options);
    nlohmann::ordered_json b = run_scenario(cfg, options);
    CHECK(a.dump() == b.dump());
    CHECK(a["cross_validation"]["pass"].get<bool>());
    CHECK(a["provenance"]["config_hash"].get<std::string>().rfind("fnv1a:", 0) == 0);

    const auto &m = a["measurements"][0];
    CHECK(m["W0"]["oracle"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(m["excess_kurtosis"]["analytic"].get<double>() ==
          doctest::Approx(m["excess_kurtosis"]["oracle"].get<double>()).epsilon(1e-6));

    options.seed = 99;
    nlohmann::ordered_json c = run_scenario(cfg, options);
    CHECK(c["measurements"][0]["sampled"]["excess_kurtosis"] != a["measurements"][0]["sampled"]["excess_kurtosis"]);
}

TEST_CASE("criteria from the reference covariance") {
    nlohmann::ordered_json epr = evaluate_criteria(load_scenario("ed3-criteria-epr"));
    CHECK(epr["duan"]["value"].get<double>() == doctest::Approx(2.705).epsilon(0.01 / 2.705));
    CHECK(epr["epr"]["value"].get<double>() == doctest::Approx(0.953).epsilon(0.01 / 0.953));
    for (const char *name : {"ed3-criteria-lc", "ed3-criteria-sc"}) {
        nlohmann::ordered_json r = evaluate_criteria(load_scenario(name));
        CHECK(r["nullifiers"]["satisfied"].get<bool>());
    }
}

TEST_CASE("fnv1a hashes") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("cli exit codes and diagnostics") {
    TempDir dir;
    CliResult bad = cli({"simulate", dir.write("bad.json", "{\n  \"schema\": \"photonsub.scenario/1\",\n  oops\n}").string()});
    CHECK(bad.code == kExitConfig);
    CHECK(bad.err.find("config error") != std::string::npos);
    CHECK(bad.err.find("line 3") != std::string::npos);

    CHECK(cli({"simulate", (dir.path() / "missing.json").string()}).code == kExitConfig);
    CHECK(cli({"frobnicate"}).code == kExitConfig);
    CHECK(cli({"simulate", "vacuum", "--format", "yaml"}).code == kExitConfig);

    CliResult list = cli({"presets", "list"});
    CHECK(list.code == 0);
    for (const char *want : {"fig2a-subtract-HG0", "fig2b-epr", "fig3a-input", "fig3b-subtract-SC0",
                             "ed1-loss-corrected", "ed2-mode-mismatch"}) {
        CHECK(list.out.find(want) != std::string::npos);
    }
    CliResult show = cli({"presets", "show", "vacuum"});
    CHECK(show.code == 0);
    CHECK(json::parse(show.out)["name"] == "vacuum");
    CHECK(cli({"presets", "show", "nonesuch"}).code == kExitConfig);
}

TEST_CASE("cli simulate writes a report") {
    TempDir dir;
    auto config = dir.write("small.json", kSmall);
    CliResult first = cli({"simulate", config.string(), "--out-dir", dir.path().string()});
    REQUIRE(first.code == 0);
    json report = json::parse(first.out);
    CHECK(report["schema"] == kReportSchema);
    CHECK(report["measurements"][0]["excess_kurtosis"]["analytic"].get<double>() < 0.0);
    CliResult second = cli({"simulate", config.string(), "--out-dir", dir.path().string()});
    CHECK(first.out == second.out);

    CliResult crit = cli({"criteria", "ed3-criteria-epr"});
    REQUIRE(crit.code == 0);
    CHECK(json::parse(crit.out)["duan"]["value"].get<double>() == doctest::Approx(2.705).epsilon(0.004));
}

TEST_CASE("cli wigner on the vacuum preset") {
    TempDir dir;
    auto out = dir.path() / "vac.csv";
    CliResult r = cli({"wigner", "vacuum", "--mode", "0", "--out", out.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,p,W");
    double sum = 0.0, origin = 0.0;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        double x = 0.0, p = 0.0, w = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream row(line);
        row >> x >> c1 >> p >> c2 >> w;
        sum += w;
        if (std::abs(x) < 1e-12 && std::abs(p) < 1e-12) origin = w;
        if (xs.empty() || xs.back() != x) xs.push_back(x);
    }
    REQUIRE(xs.size() > 2);
    const double step = xs[1] - xs[0];
    CHECK(sum * step * step == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(origin == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-9));

    auto binary = dir.path() / "vac.json";
    REQUIRE(cli({"wigner", "vacuum", "--mode", "0", "--out", binary.string()}).code == 0);
    CHECK(read_wigner_binary(binary).values.size() == 161u * 161u);
    CHECK(cli({"wigner", "vacuum", "--mode", "3", "--out", out.string()}).code == kExitConfig);
}

TEST_CASE("cli tomography on a written dataset") {
    TempDir dir;
    FockDensity vac = gaussian_to_fock(CovarianceMatrix::vacuum(1), 6);
    write_dataset(sample_quadratures(vac, CoefficientVector::unit(1, 0), PhaseSchedule::uniform(), 5000, 1.0, 3),
                  dir.path() / "vac.csv");
    CliResult r = cli({"tomography", (dir.path() / "vac.csv").string(), "--cutoff", "6"});
    REQUIRE(r.code == 0);
    json report = json::parse(r.out);
    CHECK(report.dump().find("log_likelihood") != std::string::npos);
    CHECK(cli({"tomography", (dir.path() / "none.csv").string()}).code != 0);
}
