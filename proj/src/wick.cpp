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

#include "photonsub/wick.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "photonsub/errors.hpp"

namespace photonsub {

namespace {

const Complex kI(0.0, 1.0);

struct PairingTable {
    std::vector<Complex> pair;
    int n;

    Complex at(int i, int j) const {
        return pair[i * n + j];
    }
};

Complex pairing_sum(const PairingTable &t, unsigned remaining, std::vector<Complex> &memo, std::vector<char> &seen) {
    if (remaining == 0) return 1.0;
    if (seen[remaining]) return memo[remaining];
    int first = std::countr_zero(remaining);
    unsigned rest = remaining & ~(1u << first);
    Complex total = 0.0;
    for (unsigned scan = rest; scan != 0; scan &= scan - 1) {
        int j = std::countr_zero(scan);
        Complex p = t.at(first, j);
        if (p == Complex(0.0)) continue;
        total += p * pairing_sum(t, rest & ~(1u << j), memo, seen);
    }
    seen[remaining] = 1;
    memo[remaining] = total;
    return total;
}

std::vector<LinearForm> to_forms(const OperatorWord &word, int modes) {
    std::vector<LinearForm> out;
    out.reserve(word.size());
    for (const auto &op : word) out.push_back(LinearForm::from(op, modes));
    return out;
}

void check_form(const LinearForm &f, int modes) {
    if (f.annihilation.size() != modes || f.creation.size() != modes) {
        throw DimensionError("linear form has " + std::to_string(f.annihilation.size()) + " modes, state has " +
                             std::to_string(modes));
    }
}

}  // namespace

ComplexSecondMoments ComplexSecondMoments::from_covariance(const CovarianceMatrix &v) {
    const int n = v.modes();
    Eigen::MatrixXcd g = v.matrix().cast<Complex>() + kI * symplectic_form(n).cast<Complex>();
    ComplexSecondMoments out;
    out.m.resize(n, n);
    out.q.resize(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            Complex xx = g(2 * j, 2 * k), xp = g(2 * j, 2 * k + 1);
            Complex px = g(2 * j + 1, 2 * k), pp = g(2 * j + 1, 2 * k + 1);
            out.m(j, k) = 0.25 * (xx + kI * xp + kI * px - pp);
            out.q(j, k) = 0.25 * (xx + kI * xp - kI * px + pp);
        }
    }
    return out;
}

LinearForm LinearForm::lowering(const Eigen::VectorXcd &coefficients) {
    return {coefficients, Eigen::VectorXcd::Zero(coefficients.size())};
}

LinearForm LinearForm::raising(const Eigen::VectorXcd &coefficients) {
    return {Eigen::VectorXcd::Zero(coefficients.size()), coefficients};
}

LinearForm LinearForm::from(const LadderOp &op, int modes) {
    if (op.mode < 0 || op.mode >= modes) {
        throw DimensionError("operator on mode " + std::to_string(op.mode) + " for a " + std::to_string(modes) +
                             "-mode state");
    }
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(modes);
    e(op.mode) = 1.0;
    return op.dagger ? raising(e) : lowering(e);
}

LinearForm LinearForm::adjoint() const {
    return {creation.conjugate(), annihilation.conjugate()};
}

Complex two_point(const ComplexSecondMoments &g, const LinearForm &l, const LinearForm &r) {
    Eigen::MatrixXcd anti = g.q.transpose() + Eigen::MatrixXcd::Identity(g.modes(), g.modes());
    return (l.annihilation.transpose() * g.m * r.annihilation).value() +
           (l.annihilation.transpose() * anti * r.creation).value() +
           (l.creation.transpose() * g.q * r.annihilation).value() +
           (l.creation.transpose() * g.m.conjugate() * r.creation).value();
}

Complex gaussian_moment(const ComplexSecondMoments &g, const std::vector<LinearForm> &word) {
    const int n = static_cast<int>(word.size());
    if (n > kMaxWordLength) {
        throw DimensionError("word length " + std::to_string(n) + " exceeds " + std::to_string(kMaxWordLength));
    }
    for (const auto &f : word) check_form(f, g.modes());
    if (n % 2 != 0) return 0.0;
    PairingTable t{std::vector<Complex>(n * n, 0.0), n};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) t.pair[i * n + j] = two_point(g, word[i], word[j]);
    }
    std::vector<Complex> memo(std::size_t{1} << n);
    std::vector<char> seen(std::size_t{1} << n, 0);
    return pairing_sum(t, (1u << n) - 1u, memo, seen);
}

Complex gaussian_moment(const ComplexSecondMoments &g, const OperatorWord &word) {
    return gaussian_moment(g, to_forms(word, g.modes()));
}

namespace {

/// Weighted sum over channel terms of <L^dag O L>, or <O> for passthrough.
Complex channel_sum(const ComplexSecondMoments &g, const std::vector<ChannelTerm> &terms,
                    const std::vector<LinearForm> &word) {
    Complex total = 0.0;
    for (const auto &t : terms) {
        if (t.kind == TermKind::passthrough) {
            total += t.weight * gaussian_moment(g, word);
            continue;
        }
        LinearForm l = LinearForm::lowering(t.coefficients);
        std::vector<LinearForm> sandwiched;
        sandwiched.reserve(word.size() + 2);
        sandwiched.push_back(l.adjoint());
        sandwiched.insert(sandwiched.end(), word.begin(), word.end());
        sandwiched.push_back(l);
        total += t.weight * gaussian_moment(g, sandwiched);
    }
    return total;
}

double heralded_norm(const ComplexSecondMoments &g, const std::vector<ChannelTerm> &terms) {
    double norm = channel_sum(g, terms, {}).real();
    if (norm < 1e-14) {
        throw HeraldingError("heralding probability " + std::to_string(norm) +
                             " vanishes; the state cannot be photon-subtracted");
    }
    return norm;
}

}  // namespace

double heralding_probability(const CovarianceMatrix &v, const std::vector<ChannelTerm> &terms) {
    auto g = ComplexSecondMoments::from_covariance(v);
    return channel_sum(g, terms, {}).real();
}

double heralding_probability(const CovarianceMatrix &v, const SubtractionSpec &spec) {
    return heralding_probability(v, channel_terms(spec, v.modes()));
}

Complex subtracted_moment(const CovarianceMatrix &v, const std::vector<ChannelTerm> &terms,
                          const std::vector<LinearForm> &word) {
    auto g = ComplexSecondMoments::from_covariance(v);
    return channel_sum(g, terms, word) / heralded_norm(g, terms);
}

Complex subtracted_moment(const CovarianceMatrix &v, const SubtractionSpec &spec,
                          const std::vector<LinearForm> &word) {
    return subtracted_moment(v, channel_terms(spec, v.modes()), word);
}

Complex subtracted_moment(const CovarianceMatrix &v, const SubtractionSpec &spec, const OperatorWord &word) {
    return subtracted_moment(v, spec, to_forms(word, v.modes()));
}

PhaseAveragedMoments PhaseAveragedMoments::with_loss(double eta) const {
    if (!(eta > 0.0 && eta <= 1.0)) throw UnphysicalError("efficiency must lie in (0, 1]");
    double loss = 1.0 - eta;
    return {eta * m2 + loss, eta * eta * m4 + 6.0 * eta * loss * m2 + 3.0 * loss * loss};
}

namespace {

/// Phase averaging keeps the words with equally many b and b^dag.
template <typename Moment>
PhaseAveragedMoments phase_moments(int modes, const CoefficientVector &measured, Moment moment) {
    if (measured.size() != modes) {
        throw DimensionError("measured mode has " + std::to_string(measured.size()) + " entries, state has " +
                             std::to_string(modes));
    }
    LinearForm b = LinearForm::lowering(measured.entries());
    LinearForm bd = b.adjoint();
    PhaseAveragedMoments out;
    out.m2 = (moment({b, bd}) + moment({bd, b})).real();
    Complex m4 = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        if (std::popcount(static_cast<unsigned>(mask)) != 2) continue;
        std::vector<LinearForm> word;
        for (int k = 0; k < 4; ++k) word.push_back((mask >> k) & 1 ? bd : b);
        m4 += moment(word);
    }
    out.m4 = m4.real();
    return out;
}

}  // namespace

PhaseAveragedMoments gaussian_phase_moments(const CovarianceMatrix &v, const CoefficientVector &measured) {
    auto g = ComplexSecondMoments::from_covariance(v);
    return phase_moments(v.modes(), measured,
                         [&](const std::vector<LinearForm> &w) { return gaussian_moment(g, w); });
}

PhaseAveragedMoments subtracted_phase_moments(const CovarianceMatrix &v, const std::vector<ChannelTerm> &terms,
                                              const CoefficientVector &measured) {
    auto g = ComplexSecondMoments::from_covariance(v);
    const double norm = heralded_norm(g, terms);
    return phase_moments(v.modes(), measured,
                         [&](const std::vector<LinearForm> &w) { return channel_sum(g, terms, w) / norm; });
}

PhaseAveragedMoments subtracted_phase_moments(const CovarianceMatrix &v, const SubtractionSpec &spec,
                                              const CoefficientVector &measured) {
    return subtracted_phase_moments(v, channel_terms(spec, v.modes()), measured);
}

double excess_kurtosis_analytic(const CovarianceMatrix &v, const SubtractionSpec &spec,
                                const CoefficientVector &measured) {
    return subtracted_phase_moments(v, spec, measured).excess_kurtosis();
}

}  // namespace photonsub
