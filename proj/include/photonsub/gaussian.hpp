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

#ifndef PHOTONSUB_GAUSSIAN_HPP
#define PHOTONSUB_GAUSSIAN_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photonsub/mode_basis.hpp"

namespace photonsub {

/// Covariance matrix of a zero-mean Gaussian state.
///
/// Quadratures are ordered (x_0, p_0, x_1, p_1, ...) with x = a + a^dagger and
/// p = (a - a^dagger)/i, so the vacuum is the identity. Construction checks
/// symmetry (1e-10), positive definiteness and V + i*Omega >= -1e-8.
class CovarianceMatrix {
   public:
    explicit CovarianceMatrix(Eigen::MatrixXd matrix);

    static CovarianceMatrix vacuum(int modes);

    const Eigen::MatrixXd &matrix() const noexcept {
        return matrix_;
    }
    int modes() const noexcept {
        return static_cast<int>(matrix_.rows() / 2);
    }
    double operator()(int i, int j) const {
        return matrix_(i, j);
    }
    Eigen::Matrix2d block(int j, int k) const {
        return matrix_.block<2, 2>(2 * j, 2 * k);
    }

    /// Covariance of the listed modes only.
    CovarianceMatrix reduced(std::span<const int> keep) const;

   private:
    Eigen::MatrixXd matrix_;
};

/// Per-mode quadrature variances in dB relative to vacuum (variance = 10^(dB/10)).
struct ModeSqueeze {
    double x_db = 0.0;
    double p_db = 0.0;
};

/// Diagonal covariance from dB values. Throws UnphysicalError if x_dB + p_dB < -1e-9.
CovarianceMatrix covariance_from_squeeze(std::span<const ModeSqueeze> spec);

/// The four-mode input state used throughout: (2.8, -1.8), (2.1, -1.6),
/// (1.6, -1.0), (1.4, -0.7) dB in the internal (all p-squeezed) modes.
std::vector<ModeSqueeze> paper_squeeze_db();
CovarianceMatrix paper_covariance();

/// 2N x 2N symplectic form, blocks [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int modes);

/// Real symplectic matrix of the passive map a -> U a.
Eigen::MatrixXd passive_symplectic(const Eigen::MatrixXcd &u);

/// V' = S V S^T for the operator-level unitary `u` over the modes of V.
CovarianceMatrix change_basis(const CovarianceMatrix &v, const Eigen::MatrixXcd &u);
/// Basis change into `basis` (expressed via its internal matrix).
CovarianceMatrix change_basis(const CovarianceMatrix &v, const ModeTransform &basis);

/// Pure-loss channel with transmissions eta_k in (0, 1].
CovarianceMatrix apply_loss(const CovarianceMatrix &v, std::span<const double> eta);
CovarianceMatrix apply_loss(const CovarianceMatrix &v, double eta);

/// Var(x_i - x_j) + Var(p_i + p_j); entangled below 4.
double duan_value(const CovarianceMatrix &v, int i, int j);

/// Product of the conditional variances of x_i given x_j and p_i given p_j,
/// with optimal real gains. Entangled (steerable) below 1.
double epr_value(const CovarianceMatrix &v, int conditioned, int conditioning);

/// Var(x_k - sum_l A_kl p_l) divided by its vacuum value 1 + deg(k).
std::vector<double> nullifier_variances(const CovarianceMatrix &v, const Eigen::MatrixXi &adjacency);

Eigen::MatrixXi chain_adjacency(int n);
Eigen::MatrixXi ring_adjacency(int n);

/// Symplectic eigenvalues (each >= 1 for a physical state), ascending.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd &v);

struct ValidationReport {
    double symmetry_deviation = 0.0;
    double min_uncertainty_eigenvalue = 0.0;
    double min_eigenvalue = 0.0;
    /// 1/sqrt(det) of each diagonal 2x2 block (purity of the reduced mode).
    std::vector<double> mode_purities;
    bool physical = false;

    std::string summary() const;
};

ValidationReport validate(const Eigen::MatrixXd &v);
inline ValidationReport validate(const CovarianceMatrix &v) {
    return validate(v.matrix());
}

}  // namespace photonsub

#endif
