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

#ifndef PHOTONSUB_SUBTRACTION_HPP
#define PHOTONSUB_SUBTRACTION_HPP

#include <vector>

#include <Eigen/Dense>

#include "photonsub/mode_basis.hpp"

namespace photonsub {

/// Heralded single-photon subtraction: with probability w0 the herald fires on background
/// light and the state passes through; otherwise a photon is removed from the target mode with
/// purity p0, the remainder spread incoherently over `background_modes` modes.
struct SubtractionSpec {
    CoefficientVector mode;
    double w0 = 0.0;
    double p0 = 1.0;
    int background_modes = 1;

    double coherent_weight() const;
    double incoherent_weight() const;
    bool is_ideal() const noexcept {
        return w0 == 0.0 && p0 == 1.0;
    }
};

/// Validates all fields; throws UnphysicalError or DimensionError.
SubtractionSpec make_spec(const CoefficientVector &mode, double w0, double p0, int background_modes);

SubtractionSpec ideal_spec(const CoefficientVector &mode);
SubtractionSpec ideal_spec(const Eigen::VectorXcd &mode);

/// Defaults measured for the heralding path of the experiment.
inline constexpr double kPaperW0 = 0.0094;
inline constexpr double kPaperP0 = 0.95;
inline constexpr int kPaperBackgroundModes = 4;

SubtractionSpec paper_spec(const CoefficientVector &mode);

enum class TermKind { passthrough, coherent, single_mode };

/// One unnormalized piece of the heralded map: weight * L rho L^dagger with L = sum_k coefficients_k a_k,
/// or weight * rho for passthrough.
struct ChannelTerm {
    double weight = 0.0;
    TermKind kind = TermKind::passthrough;
    int mode = -1;
    Eigen::VectorXcd coefficients;
};

/// Emits the passthrough, coherent and per-mode terms that carry positive weight. With `modes` >= 0 the
/// coefficients are cut to that many modes (the rest are vacuum and contribute nothing) and terms that
/// become empty are dropped.
std::vector<ChannelTerm> channel_terms(const SubtractionSpec &spec, int modes = -1);

/// Re-expresses terms for a state whose mode operators were changed by b = W a.
std::vector<ChannelTerm> transform_terms(const std::vector<ChannelTerm> &terms, const Eigen::MatrixXcd &w);

}  // namespace photonsub

#endif
