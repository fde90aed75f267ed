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

#ifndef PHOTONSUB_SYMPLECTIC_HPP
#define PHOTONSUB_SYMPLECTIC_HPP

#include <vector>

#include <Eigen/Dense>

namespace photonsub {

/// V = S diag(nu_0, nu_0, nu_1, nu_1, ...) S^T with S symplectic.
struct WilliamsonDecomposition {
    Eigen::MatrixXd symplectic;
    std::vector<double> nu;
};

WilliamsonDecomposition williamson(const Eigen::MatrixXd &v);

/// S = P(first) Z(squeeze) P(second), P(U) the passive map a -> U a and
/// Z the single-mode squeezers x_k -> e^{r_k} x_k, p_k -> e^{-r_k} p_k.
struct BlochMessiahDecomposition {
    Eigen::MatrixXcd first;
    std::vector<double> squeeze;
    Eigen::MatrixXcd second;
};

BlochMessiahDecomposition bloch_messiah(const Eigen::MatrixXd &s);

/// Unitary U of an orthogonal symplectic matrix in interleaved ordering.
Eigen::MatrixXcd passive_unitary(const Eigen::MatrixXd &o);

/// Real matrix of x_k -> e^{r_k} x_k, p_k -> e^{-r_k} p_k.
Eigen::MatrixXd squeezer_symplectic(const std::vector<double> &r);

}  // namespace photonsub

#endif
