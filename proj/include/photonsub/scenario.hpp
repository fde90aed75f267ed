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

#ifndef PHOTONSUB_SCENARIO_HPP
#define PHOTONSUB_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "photonsub/errors.hpp"
#include "photonsub/fock.hpp"
#include "photonsub/gaussian.hpp"
#include "photonsub/homodyne.hpp"
#include "photonsub/mode_basis.hpp"
#include "photonsub/subtraction.hpp"
#include "photonsub/tomography.hpp"
#include "photonsub/wigner.hpp"

namespace photonsub {

inline constexpr const char *kScenarioSchema = "photonsub.scenario/1";
inline constexpr const char *kReportSchema = "photonsub.report/1";
inline constexpr const char *kVersion = "0.1.0";

/// An error raised while running one stage of a scenario; `stage` names the stage.
class StageError : public Error {
   public:
    StageError(std::string stage, const std::string &what)
        : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {
    }
    const std::string &stage() const noexcept {
        return stage_;
    }

   private:
    std::string stage_;
};

enum class Analysis { wigner, w0, purity, fidelity, kurtosis, duan, epr, nullifiers };
std::string_view to_string(Analysis a);

enum class OracleUse { automatic, always, never };

struct MeasurementConfig {
    std::string label;
    /// Measured mode relative to the analysis basis.
    CoefficientVector mode;
    PhaseSchedule phases;
    int samples = 0;
    double eta = 1.0;
    std::optional<TomographyConfig> tomography;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    /// Covariance over the internal modes (HG_k, with a factor i on odd k).
    Eigen::MatrixXd covariance;
    std::string state_label;
    ModeTransform basis;
    std::optional<SubtractionSpec> subtraction;
    std::string channel_label = "none";
    std::vector<MeasurementConfig> measurements;
    std::vector<Analysis> analyses;
    std::uint64_t seed = 0;
    /// Per-mode box cutoffs; when empty the oracle caps the total photon number instead.
    std::vector<int> cutoffs;
    /// Total-photon cap of the oracle (0 picks a default from the mode count).
    int max_photons = 0;
    double leak_bound = kDefaultLeakBound;
    OracleUse oracle = OracleUse::automatic;
    int bootstrap = 1000;
    GridAxis wigner_x{-8.0, 8.0, 161};
    GridAxis wigner_p{-8.0, 8.0, 161};
    FidelityKind fidelity = FidelityKind::uhlmann;
    std::optional<std::pair<int, int>> duan_pair;
    std::optional<std::pair<int, int>> epr_pair;
    std::optional<Eigen::MatrixXi> nullifier_graph;
    std::string graph_label;
    /// The configuration as parsed, used for the provenance hash.
    nlohmann::json source;

    bool wants(Analysis a) const;
    int modes() const {
        return static_cast<int>(covariance.rows() / 2);
    }
};

/// Parses a scenario document; throws ConfigError carrying the offending field, line and column.
ScenarioConfig parse_scenario(std::string_view text);

/// Reads a config file, or a built-in preset when no such file exists.
ScenarioConfig load_scenario(const std::string &path_or_preset);

std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
/// Preset document, pretty-printed.
std::string preset_json(std::string_view name);

struct RunOptions {
    bool cross_validate = false;
    std::optional<std::uint64_t> seed;
    /// When set, datasets and Wigner grids are also written here.
    std::filesystem::path out_dir;
};

nlohmann::ordered_json run_scenario(const ScenarioConfig &config, const RunOptions &options = {});

/// Entanglement witnesses of the Gaussian input in the analysis basis.
nlohmann::ordered_json evaluate_criteria(const ScenarioConfig &config);

/// Single-mode state seen by measurement `index` (after the channel and detection loss).
FockDensity measured_state(const ScenarioConfig &config, int index);

/// 64-bit FNV-1a of the text.
std::uint64_t fnv1a(std::string_view text);

/// Directory from PHOTONSUB_OUT_DIR, or empty.
std::filesystem::path default_out_dir();

}  // namespace photonsub

#endif
