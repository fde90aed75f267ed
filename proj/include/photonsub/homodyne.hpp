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

#ifndef PHOTONSUB_HOMODYNE_HPP
#define PHOTONSUB_HOMODYNE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photonsub/fock.hpp"
#include "photonsub/mode_basis.hpp"

namespace photonsub {

struct QuadratureRecord {
    double theta = 0.0;
    double x = 0.0;
};

struct QuadratureDataset {
    std::vector<QuadratureRecord> records;
    CoefficientVector mode;
    double efficiency = 1.0;
    std::uint64_t seed = 0;
    std::string source;
};

/// How LO phases are assigned to records: drawn uniformly, or cycled through a fixed list.
struct PhaseSchedule {
    enum class Kind { uniform, fixed };
    Kind kind = Kind::uniform;
    std::vector<double> phases;

    static PhaseSchedule uniform() {
        return {};
    }
    static PhaseSchedule fixed(std::vector<double> phases);
};

/// Oscillator eigenfunctions psi_0..psi_{count-1} at x, scaled so the vacuum has variance 1.
Eigen::VectorXd oscillator_functions(double x, int count);

/// <x_theta|rho|x_theta> for x_theta = cos(theta) x + sin(theta) p.
double quadrature_density(const FockDensity &rho, double theta, double x);

struct QuadratureCurve {
    std::vector<double> x;
    std::vector<double> density;
    double mass = 0.0;
};

/// Density on `points` evenly spaced values in [lo, hi]; throws Error when more than 1e-4 of the
/// probability falls outside the range.
QuadratureCurve quadrature_pdf(const FockDensity &rho, double theta, double lo, double hi, int points = 4096);

/// Beam splitter loss with transmission eta on a single-mode state.
FockDensity apply_fock_loss(const FockDensity &rho, double eta);

/// Inverse-CDF sampler for all quadratures of one single-mode state.
class QuadratureSampler {
   public:
    explicit QuadratureSampler(const FockDensity &rho, int points = 4096, double span_sigmas = 8.0);

    /// Quadrature value at the given LO phase for a uniform variate u in [0, 1).
    double draw(double theta, double u) const;

    double lower() const noexcept {
        return lo_;
    }
    double upper() const noexcept {
        return hi_;
    }

   private:
    double cdf_at(int i, const std::vector<Complex> &phases) const;

    int cutoff_;
    int points_;
    double lo_;
    double hi_;
    double step_;
    /// Cumulative integrals of the phase-Fourier components, grid-major.
    std::vector<Complex> cumulative_;
};

/// Reduces `state` to mode u, applies detection efficiency eta, and draws `count` records.
QuadratureDataset sample_quadratures(const FockDensity &state, const CoefficientVector &u, const PhaseSchedule &schedule,
                                     int count, double eta, std::uint64_t seed);

/// Pooled estimator mean(x^4) / mean(x^2)^2 - 3.
double excess_kurtosis(std::span<const double> x);

struct KurtosisEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

KurtosisEstimate kurtosis_estimate(const QuadratureDataset &data, int bootstrap = 1000, std::uint64_t seed = 0);
KurtosisEstimate kurtosis_estimate(std::span<const double> x, int bootstrap = 1000, std::uint64_t seed = 0);

void write_dataset_csv(const QuadratureDataset &data, std::ostream &out);
/// CSV next to a JSON sidecar (same stem, .json).
void write_dataset(const QuadratureDataset &data, const std::filesystem::path &csv);
/// Reads the CSV and, when present, the sidecar metadata.
QuadratureDataset read_dataset(const std::filesystem::path &csv);
QuadratureDataset read_dataset_csv(std::istream &in);

/// Deterministic 64-bit mixer used to derive per-record generator states.
std::uint64_t mix_seed(std::uint64_t x);
/// Uniform double in [0, 1) from the high 53 bits.
double unit_interval(std::uint64_t bits);

}  // namespace photonsub

#endif
