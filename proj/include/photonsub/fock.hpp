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

#ifndef PHOTONSUB_FOCK_HPP
#define PHOTONSUB_FOCK_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "photonsub/gaussian.hpp"
#include "photonsub/subtraction.hpp"
#include "photonsub/wick.hpp"

namespace photonsub {

/// Product of per-mode number bases truncated at n_k < cutoff_k. Mode 0 is the most significant digit.
class FockSpace {
   public:
    /// Box of occupations below each cutoff, optionally restricted to at most `max_total` photons in all.
    explicit FockSpace(std::vector<int> cutoffs, int max_total = -1);

    /// All occupations of `modes` modes with at most `max_total` photons; closed under passive transforms.
    static FockSpace capped(int modes, int max_total);

    int modes() const noexcept {
        return static_cast<int>(cutoffs_.size());
    }
    const std::vector<int> &cutoffs() const noexcept {
        return cutoffs_;
    }
    /// Total-photon cap, or -1 when only the per-mode cutoffs apply.
    int max_total() const noexcept {
        return max_total_;
    }
    int dim() const noexcept {
        return dim_;
    }
    int index(std::span<const int> occupation) const;
    std::vector<int> occupation(int index) const;

    bool operator==(const FockSpace &other) const {
        return cutoffs_ == other.cutoffs_ && max_total_ == other.max_total_;
    }

   private:
    std::vector<int> cutoffs_;
    std::vector<int> strides_;
    int max_total_ = -1;
    int dim_ = 1;
    std::vector<int> from_box_;
    std::vector<int> to_box_;
};

struct FockDensity {
    FockSpace space{std::vector<int>{1}};
    Eigen::MatrixXcd matrix;
    /// Probability weight dropped by truncation before renormalization.
    double leak = 0.0;

    int modes() const noexcept {
        return space.modes();
    }
    double trace() const {
        return matrix.trace().real();
    }
};

/// Cutoff per mode used when none is configured.
int default_cutoff(int modes);
/// Default total-photon cap for a capped space of `modes` modes.
int default_max_photons(int modes);
inline constexpr double kDefaultLeakBound = 1e-4;

FockDensity fock_from_matrix(std::vector<int> cutoffs, Eigen::MatrixXcd matrix);

/// Same state with a single-mode cutoff changed: zero-padded when growing, truncated and renormalized
/// when shrinking.
FockDensity with_cutoff(const FockDensity &rho, int cutoff);

FockDensity number_state(std::span<const int> occupation, std::vector<int> cutoffs);
FockDensity thermal_state(double mean_photons, int cutoff);

/// Gaussian state with covariance v, truncated per mode. Throws TruncationError when more than
/// `leak_bound` of the probability falls outside the truncation.
FockDensity gaussian_to_fock(const CovarianceMatrix &v, const FockSpace &space,
                             double leak_bound = kDefaultLeakBound);
FockDensity gaussian_to_fock(const CovarianceMatrix &v, std::vector<int> cutoffs,
                             double leak_bound = kDefaultLeakBound);
FockDensity gaussian_to_fock(const CovarianceMatrix &v, int cutoff = 0, double leak_bound = kDefaultLeakBound);

/// Pure squeezed single-photon state (a^dag applied to squeezed vacuum), squeeze r acting as x -> e^r x.
Eigen::VectorXcd squeezed_number_ket(double r, int photons, int cutoff);

struct ChannelOutput {
    FockDensity state;
    /// Trace of the unnormalized map minus the passthrough weight.
    double heralding_weight = 0.0;
    double norm = 0.0;
};

ChannelOutput apply_channel(const FockDensity &rho, const std::vector<ChannelTerm> &terms);
ChannelOutput apply_channel(const FockDensity &rho, const SubtractionSpec &spec);

/// rho -> G(W) rho G(W)^dag for the mode change b = W a; weight pushed past the cutoffs is added to leak.
FockDensity transform_modes(const FockDensity &rho, const Eigen::MatrixXcd &w);

FockDensity partial_trace(const FockDensity &rho, std::span<const int> keep);

/// Reduced state of the mode b = sum_k u_k a_k.
FockDensity reduce_to_mode(const FockDensity &rho, const CoefficientVector &u);

double purity(const FockDensity &rho);
/// Uhlmann fidelity (tr sqrt(sqrt(r1) r2 sqrt(r1)))^2.
double fidelity(const FockDensity &a, const FockDensity &b);
/// tr(r1 r2); agrees with the Uhlmann value when either state is pure.
double overlap_fidelity(const FockDensity &a, const FockDensity &b);
double trace_distance(const FockDensity &a, const FockDensity &b);
double min_eigenvalue(const FockDensity &rho);

/// 2 pi W(0, 0) of a single-mode state, i.e. its parity.
double parity_w0(const FockDensity &rho);

/// tr(rho * word), exact for the truncated state.
Complex fock_moment(const FockDensity &rho, const OperatorWord &word);

/// Photon-number distribution of a single-mode state.
std::vector<double> photon_distribution(const FockDensity &rho);

PhaseAveragedMoments fock_phase_moments(const FockDensity &single_mode);

}  // namespace photonsub

#endif
