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

#include "photonsub/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "photonsub/scenario.hpp"

namespace photonsub {

namespace {

using ojson = nlohmann::ordered_json;

struct Shared {
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "json";
    bool cross_validate = false;
};

std::filesystem::path resolve_out_dir(const Shared &s) {
    return s.out_dir.empty() ? default_out_dir() : std::filesystem::path(s.out_dir);
}

std::string cell(const ojson &j, std::initializer_list<const char *> path) {
    const ojson *cur = &j;
    for (const char *key : path) {
        if (!cur->is_object() || !cur->contains(key)) return "";
        cur = &(*cur)[key];
    }
    return cur->is_number() ? cur->dump() : "";
}

void write_measurement_csv(const ojson &report, std::ostream &out) {
    out << "label,eta,kurtosis_analytic,kurtosis_oracle,kurtosis_sampled,kurtosis_se,W0,purity,fidelity\n";
    for (const auto &m : report["measurements"]) {
        std::string w0 = cell(m, {"W0", "oracle"});
        if (w0.empty()) w0 = cell(m, {"W0", "analytic"});
        std::string purity = cell(m, {"purity", "oracle"});
        if (purity.empty()) purity = cell(m, {"purity", "analytic"});
        out << m["label"].get<std::string>() << ',' << m["eta"].dump() << ','
            << cell(m, {"excess_kurtosis", "analytic"}) << ',' << cell(m, {"excess_kurtosis", "oracle"}) << ','
            << cell(m, {"sampled", "excess_kurtosis"}) << ',' << cell(m, {"sampled", "standard_error"}) << ',' << w0
            << ',' << purity << ',' << cell(m, {"fidelity", "value"}) << '\n';
    }
}

void write_criteria_csv(const ojson &criteria, std::ostream &out) {
    out << "criterion,value,bound,satisfied\n";
    for (const char *key : {"duan", "epr"}) {
        if (!criteria.contains(key)) continue;
        const auto &c = criteria[key];
        out << key << ',' << c["value"].dump() << ',' << c["bound"].dump() << ',' << c["satisfied"].dump() << '\n';
    }
    if (criteria.contains("nullifiers")) {
        const auto &c = criteria["nullifiers"];
        for (std::size_t k = 0; k < c["values"].size(); ++k) {
            out << "nullifier" << k << ',' << c["values"][k].dump() << ',' << c["bound"].dump() << ','
                << (c["values"][k].get<double>() < 1.0 ? "true" : "false") << '\n';
        }
    }
}

void emit(const std::string &text, const std::filesystem::path &file, std::ostream &out) {
    out << text;
    if (file.empty()) return;
    std::ofstream f(file, std::ios::binary);
    if (!f) throw StageError("output", "cannot write " + file.string());
    f << text;
}

int simulate(const std::string &source, const Shared &s, std::ostream &out) {
    ScenarioConfig cfg = load_scenario(source);
    RunOptions opts;
    opts.seed = s.seed;
    opts.cross_validate = s.cross_validate;
    opts.out_dir = resolve_out_dir(s);
    ojson report = run_scenario(cfg, opts);

    std::filesystem::path file;
    if (!opts.out_dir.empty()) file = opts.out_dir / (cfg.name + (s.format == "csv" ? ".summary.csv" : ".report.json"));
    std::ostringstream text;
    if (s.format == "csv") {
        write_measurement_csv(report, text);
    } else {
        text << report.dump(2) << '\n';
    }
    emit(text.str(), file, out);
    if (s.cross_validate && !report["cross_validation"]["pass"].get<bool>()) {
        throw StageError("cross-validation", "analytic and oracle results disagree beyond tolerance");
    }
    return 0;
}

int criteria(const std::string &source, const Shared &s, std::ostream &out) {
    ScenarioConfig cfg = load_scenario(source);
    ojson c = evaluate_criteria(cfg);
    std::ostringstream text;
    if (s.format == "csv") {
        write_criteria_csv(c, text);
    } else {
        text << c.dump(2) << '\n';
    }
    std::filesystem::path dir = resolve_out_dir(s);
    emit(text.str(), dir.empty() ? dir : dir / (cfg.name + ".criteria." + s.format), out);
    return 0;
}

int wigner(const std::string &source, int mode, const std::string &path, const Shared &s, std::ostream &out) {
    ScenarioConfig cfg = load_scenario(source);
    if (mode < 0 || mode >= cfg.modes()) {
        throw ConfigError("--mode", "mode " + std::to_string(mode) + " outside 0.." + std::to_string(cfg.modes() - 1));
    }
    MeasurementConfig m;
    m.mode = CoefficientVector::unit(cfg.modes(), mode);
    m.label = cfg.basis.label + std::to_string(mode);
    cfg.measurements = {m};
    FockDensity rho = measured_state(cfg, 0);
    WignerGrid grid = wigner_grid(rho, cfg.wigner_x, cfg.wigner_p);

    std::filesystem::path file = path;
    if (file.is_relative() && file.parent_path().empty()) {
        std::filesystem::path dir = resolve_out_dir(s);
        if (!dir.empty()) file = dir / file;
    }
    if (!file.parent_path().empty()) std::filesystem::create_directories(file.parent_path());
    const bool csv = s.format == "csv" || file.extension() == ".csv";
    if (csv) {
        std::ofstream f(file, std::ios::binary);
        if (!f) throw StageError("output", "cannot write " + file.string());
        write_wigner_csv(grid, f);
    } else {
        write_wigner_binary(grid, file);
    }
    out << ojson{{"file", file.string()},
                 {"mode", m.label},
                 {"format", csv ? "csv" : "binary"},
                 {"integral", grid.integral()},
                 {"W0", parity_w0(rho)}}
               .dump(2)
        << '\n';
    return 0;
}

ojson density_json(const FockDensity &rho) {
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i) {
        ojson row = ojson::array();
        for (Eigen::Index j = 0; j < rho.matrix.cols(); ++j) row.push_back({rho.matrix(i, j).real(), rho.matrix(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

int tomography(const std::string &dataset, std::optional<double> eta, std::optional<int> cutoff, const Shared &s,
               std::ostream &out) {
    QuadratureDataset data;
    try {
        data = read_dataset(dataset);
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError("input", e.what());
    }
    TomographyConfig cfg;
    cfg.eta = eta.value_or(data.efficiency);
    if (cutoff) cfg.cutoff = *cutoff;
    TomographyResult t;
    try {
        t = reconstruct(data, cfg);
    } catch (const std::exception &e) {
        throw StageError("tomography", e.what());
    }
    StateObservables obs = report_observables(t.state);
    ojson report{{"schema", "photonsub.tomography/1"},
                 {"provenance", {{"version", kVersion}, {"dataset", std::filesystem::path(dataset).filename().string()}}},
                 {"samples", data.records.size()},
                 {"cutoff", cfg.cutoff},
                 {"eta", cfg.eta},
                 {"iterations", t.iterations},
                 {"converged", t.converged},
                 {"operators", t.operators},
                 {"log_likelihood", t.log_likelihood.empty() ? 0.0 : t.log_likelihood.back()},
                 {"W0", obs.w0},
                 {"purity", obs.purity},
                 {"excess_kurtosis", obs.kurtosis},
                 {"photon_distribution", photon_distribution(t.state)},
                 {"density_matrix", density_json(t.state)}};
    std::ostringstream text;
    if (s.format == "csv") {
        text << "n,m,re,im\n";
        for (Eigen::Index i = 0; i < t.state.matrix.rows(); ++i) {
            for (Eigen::Index j = 0; j < t.state.matrix.cols(); ++j) {
                text << i << ',' << j << ',' << ojson(t.state.matrix(i, j).real()).dump() << ','
                     << ojson(t.state.matrix(i, j).imag()).dump() << '\n';
            }
        }
    } else {
        text << report.dump(2) << '\n';
    }
    std::filesystem::path dir = resolve_out_dir(s);
    std::string stem = std::filesystem::path(dataset).stem().string();
    emit(text.str(), dir.empty() ? dir : dir / (stem + ".tomography." + s.format), out);
    return 0;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Photon subtraction from multimode Gaussian states: simulation, sampling and tomography.", "photonsub"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Shared shared;
    auto add_shared = [&](CLI::App *sub, bool seeded) {
        if (seeded) sub->add_option("--seed", shared.seed, "Override the scenario seed");
        sub->add_option("--out-dir", shared.out_dir, "Directory for reports and data files (default: $PHOTONSUB_OUT_DIR)");
        sub->add_option("--format", shared.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    };

    std::string source;
    auto *sim = app.add_subcommand("simulate", "Run a scenario config or preset and print its report");
    sim->add_option("config", source, "Scenario JSON file or preset name")->required();
    sim->add_flag("--cross-validate", shared.cross_validate, "Run the Fock oracle alongside the analytic path");
    add_shared(sim, true);

    std::optional<double> eta;
    std::optional<int> cutoff;
    auto *tomo = app.add_subcommand("tomography", "Maximum-likelihood reconstruction from a quadrature dataset");
    tomo->add_option("dataset", source, "CSV dataset (theta,x)")->required();
    tomo->add_option("--eta", eta, "Detection efficiency in the measurement operators")->check(CLI::Range(1e-6, 1.0));
    tomo->add_option("--cutoff", cutoff, "Fock cutoff of the reconstruction")->check(CLI::Range(5, 60));
    add_shared(tomo, false);

    auto *crit = app.add_subcommand("criteria", "Evaluate Duan, EPR and nullifier criteria of a scenario's input");
    crit->add_option("config", source, "Scenario JSON file or preset name")->required();
    add_shared(crit, false);

    int mode = 0;
    std::string wigner_out;
    auto *wig = app.add_subcommand("wigner", "Write the Wigner grid of one mode after the scenario's channel");
    wig->add_option("config", source, "Scenario JSON file or preset name")->required();
    wig->add_option("--mode", mode, "Mode index in the scenario's basis")->required();
    wig->add_option("--out", wigner_out, "Output path (.csv for text, otherwise JSON header + .bin)")->required();
    add_shared(wig, false);

    std::string preset_action;
    std::string preset_name;
    auto *pre = app.add_subcommand("presets", "List, show or export the built-in scenarios");
    pre->add_option("action", preset_action, "list | show | write")
        ->required()
        ->check(CLI::IsMember({"list", "show", "write"}));
    pre->add_option("name", preset_name, "Preset name (show) or target directory (write)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*sim) return simulate(source, shared, out);
        if (*crit) return criteria(source, shared, out);
        if (*wig) return wigner(source, mode, wigner_out, shared, out);
        if (*tomo) return tomography(source, eta, cutoff, shared, out);
        if (preset_action == "list") {
            for (const auto &name : preset_names()) out << name << '\n';
        } else if (preset_action == "show") {
            if (preset_name.empty()) throw ConfigError("name", "presets show needs a preset name");
            out << preset_json(preset_name);
        } else {
            std::filesystem::path dir = preset_name.empty() ? std::filesystem::path("presets") : std::filesystem::path(preset_name);
            std::filesystem::create_directories(dir);
            for (const auto &name : preset_names()) {
                std::ofstream f(dir / (name + ".json"), std::ios::binary);
                if (!f) throw StageError("output", "cannot write " + (dir / (name + ".json")).string());
                f << preset_json(name);
            }
            out << preset_names().size() << " presets written to " << dir.string() << '\n';
        }
        return 0;
    } catch (const ConfigError &e) {
        err << "photonsub: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const StageError &e) {
        err << "photonsub: " << e.what() << '\n';
        return kExitStage;
    } catch (const std::exception &e) {
        err << "photonsub: stage 'run': " << e.what() << '\n';
        return kExitStage;
    }
}

}  // namespace photonsub
