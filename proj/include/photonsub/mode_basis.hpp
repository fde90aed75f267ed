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

#ifndef PHOTONSUB_MODE_BASIS_HPP
#define PHOTONSUB_MODE_BASIS_HPP

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace photonsub {

using Complex = std::complex<double>;

/// Named mode bases with printed unitaries over the Hermite-Gauss modes.
enum class BasisName { HG, EPR, LC, SC };

BasisName parse_basis_name(std::string_view name);
std::string_view to_string(BasisName name);

/// Which set of modes the rows of a ModeTransform are written against.
///
/// `hermite_gauss` is the raw HG_k family, in which odd modes carry
/// x-squeezed vacua. `internal` is HG_k for even k and i*HG_k for odd k,
/// where every default squeezed vacuum is p-squeezed. All covariance
/// matrices in this library live in the internal reference.
enum class ModeReference { hermite_gauss, internal };

/// Phase that maps raw HG_k onto internal mode k: 1 for even k, i for odd k.
Complex internal_phase(int k);

/// Normalized complex mode coefficients.
class CoefficientVector {
   public:
    CoefficientVector() = default;

    /// Normalizes `entries`; throws UnphysicalError on a zero vector.
    explicit CoefficientVector(Eigen::VectorXcd entries);

    static CoefficientVector unit(int size, int k);

    const Eigen::VectorXcd &entries() const noexcept {
        return entries_;
    }
    int size() const noexcept {
        return static_cast<int>(entries_.size());
    }
    Complex operator[](int k) const {
        return entries_(k);
    }

    /// Index k when the vector is (up to phase) the k-th unit vector, else -1.
    int unit_index(double tol = 1e-12) const;

   private:
    Eigen::VectorXcd entries_;
};

/// Unitary defining a new mode basis. Row j holds the coefficients of
/// new mode j over the reference modes, so b_j = sum_k U_jk a_k.
struct ModeTransform {
    Eigen::MatrixXcd matrix;
    std::string label;
    ModeReference reference = ModeReference::hermite_gauss;
    /// Global local-oscillator phase applied to every new mode (b_j -> e^{i phase} b_j).
    double lo_phase = 0.0;
    /// Largest entry change made by the unitarity cleanup.
    double cleanup_deviation = 0.0;

    int dim() const noexcept {
        return static_cast<int>(matrix.rows());
    }

    /// Operator-level matrix over the internal modes, including lo_phase.
    Eigen::MatrixXcd internal_matrix() const;

    /// Direct sum with the identity up to `n` modes (identity in the same reference).
    ModeTransform embedded(int n) const;
};

/// Builds a ModeTransform from printed entries. The nearest unitary (polar
/// factor) replaces the input when it deviates by more than 1e-12.
ModeTransform make_mode_transform(Eigen::MatrixXcd matrix, std::string label,
                                  ModeReference reference = ModeReference::hermite_gauss, double lo_phase = 0.0);

/// HG (identity, any n), EPR (n = 2), LC and SC (n = 4) with the printed entries.
ModeTransform builtin_basis(BasisName name, int n);

/// Coefficients over the reference modes of sum_j w_j (new mode j), normalized.
CoefficientVector superpose(const ModeTransform &basis, const CoefficientVector &weights);

/// Gate mode that realizes subtraction in c: entry k is (-1)^k c_k.
CoefficientVector gate_mode(const CoefficientVector &c);

/// Converts raw-HG coefficients to internal-mode coefficients.
Eigen::VectorXcd hg_to_internal(const Eigen::VectorXcd &v);

/// Unitary whose first row is `first_row` (normalized), completed by Gram-Schmidt
/// against the standard basis.
Eigen::MatrixXcd complete_to_unitary(const Eigen::VectorXcd &first_row);

/// max |(U U^dagger - I)_jk|.
double unitarity_deviation(const Eigen::MatrixXcd &u);

/// Unitary polar factor of a square matrix.
Eigen::MatrixXcd polar_unitary(const Eigen::MatrixXcd &m);

}  // namespace photonsub

#endif
