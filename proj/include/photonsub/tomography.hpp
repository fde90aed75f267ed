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

#ifndef PHOTONSUB_TOMOGRAPHY_HPP
#define PHOTONSUB_TOMOGRAPHY_HPP

#include <optional>
#include <vector>

#include "photonsub/fock.hpp"
#include "photonsub/homodyne.hpp"

namespace photonsub {

struct TomographyConfig {
    int cutoff = 10;
    /// Detection efficiency folded into the measurement operators.
    double eta = 1.0;
    int max_iters = 5000;
    /// Stop once one iteration raises the log-likelihood by less than this.
    double tolerance = 1e-7;
    bool binned = true;
    int phase_bins = 30;
    double x_bin_width = 0.05;
};

struct TomographyResult {
    FockDensity state;
    std::vector<double> log_likelihood;
    int iterations = 0;
    bool converged = false;
    /// Number of distinct measurement operators used.
    int operators = 0;
};

/// Maximum-likelihood state estimate by the iteration rho -> N[R rho R], diluted when a full step would
/// lower the likelihood.
TomographyResult reconstruct(const QuadratureDataset &data, const TomographyConfig &config);

enum class FidelityKind { uhlmann, overlap };

struct StateObservables {
    double w0 = 0.0;
    double purity = 0.0;
    double kurtosis = 0.0;
    std::optional<double> fidelity;
};

StateObservables report_observables(const FockDensity &rho, const FockDensity *reference = nullptr,
                                    FidelityKind kind = FidelityKind::uhlmann);

}  // namespace photonsub

#endif
