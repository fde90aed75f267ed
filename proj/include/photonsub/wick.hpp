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

#ifndef PHOTONSUB_WICK_HPP
#define PHOTONSUB_WICK_HPP

#include <vector>

#include <Eigen/Dense>

#include "photonsub/gaussian.hpp"
#include "photonsub/mode_basis.hpp"
#include "photonsub/subtraction.hpp"

namespace photonsub {

/// Normal-ordered second moments of a zero-mean Gaussian state: m(j,k) = <a_j a_k>, q(j,k) = <a_j^dag a_k>.
struct ComplexSecondMoments {
    Eigen::MatrixXcd m;
    Eigen::MatrixXcd q;

    int modes() const noexcept {
        return static_cast<int>(m.rows());
    }

    static ComplexSecondMoments from_covariance(const CovarianceMatrix &v);
};

struct LadderOp {
    int mode = 0;
    bool dagger = false;
};

using OperatorWord = std::vector<LadderOp>;

/// sum_k annihilation_k a_k + creation_k a_k^dag
struct LinearForm {
    Eigen::VectorXcd annihilation;
    Eigen::VectorXcd creation;

    static LinearForm lowering(const Eigen::VectorXcd &coefficients);
    static LinearForm raising(const Eigen::VectorXcd &coefficients);
    static LinearForm from(const LadderOp &op, int modes);

    LinearForm adjoint() const;
};

/// Longest product the pairing expansion accepts.
inline constexpr int kMaxWordLength = 16;

Complex two_point(const ComplexSecondMoments &g, const LinearForm &left, const LinearForm &right);

Complex gaussian_moment(const ComplexSecondMoments &g, const std::vector<LinearForm> &word);
Complex gaussian_moment(const ComplexSecondMoments &g, const OperatorWord &word);

/// Trace of the unnormalized heralded state.
double heralding_probability(const CovarianceMatrix &v, const SubtractionSpec &spec);
double heralding_probability(const CovarianceMatrix &v, const std::vector<ChannelTerm> &terms);

Complex subtracted_moment(const CovarianceMatrix &v, const SubtractionSpec &spec,
                          const std::vector<LinearForm> &word);
Complex subtracted_moment(const CovarianceMatrix &v, const SubtractionSpec &spec, const OperatorWord &word);
Complex subtracted_moment(const CovarianceMatrix &v, const std::vector<ChannelTerm> &terms,
                          const std::vector<LinearForm> &word);

/// Second and fourth moments of the quadrature of one mode, averaged over a uniform LO phase.
struct PhaseAveragedMoments {
    double m2 = 1.0;
    double m4 = 3.0;

    double excess_kurtosis() const {
        return m4 / (m2 * m2) - 3.0;
    }

    /// Moments after a beam splitter of transmission eta that mixes in vacuum.
    PhaseAveragedMoments with_loss(double eta) const;
};

PhaseAveragedMoments gaussian_phase_moments(const CovarianceMatrix &v, const CoefficientVector &measured);
PhaseAveragedMoments subtracted_phase_moments(const CovarianceMatrix &v, const SubtractionSpec &spec,
                                              const CoefficientVector &measured);
PhaseAveragedMoments subtracted_phase_moments(const CovarianceMatrix &v, const std::vector<ChannelTerm> &terms,
                                              const CoefficientVector &measured);

double excess_kurtosis_analytic(const CovarianceMatrix &v, const SubtractionSpec &spec,
                                const CoefficientVector &measured);

}  // namespace photonsub

#endif
