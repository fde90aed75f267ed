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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "brute_force.hpp"
#include "photonsub/errors.hpp"
#include "photonsub/gaussian.hpp"
#include "photonsub/subtraction.hpp"
#include "photonsub/symplectic.hpp"
#include "photonsub/wick.hpp"

using namespace photonsub;

namespace {

const Complex I{0.0, 1.0};

CovarianceMatrix diag(std::vector<double> d) {
    return CovarianceMatrix(Eigen::VectorXd::Map(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal());
}

LinearForm x_form(int mode, int modes) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Unit(modes, mode);
    return {e, e};
}

struct Case {
    const char *name;
    BasisName basis;
    int dim;
    std::vector<Complex> subtract;  // empty means no subtraction
    std::vector<double> kurtosis;
};

// Phase-averaged excess kurtosis of the reference state per basis mode, frozen from the
// brute-force number-basis oracle in brute_force.hpp.
const std::vector<Case> &frozen_cases() {
    static const std::vector<Case> cases = {
        {"HG input", BasisName::HG, 4, {}, {0.352940984, 0.242351489, 0.126764009, 0.084373164}},
        {"HG0", BasisName::HG, 4, {1, 0, 0, 0}, {-0.528937577, 0.244738641, 0.128525307, 0.085803038}},
        {"HG1", BasisName::HG, 4, {0, 1, 0, 0}, {0.361800146, -0.601220341, 0.129550828, 0.086683171}},
        {"HG2", BasisName::HG, 4, {0, 0, 1, 0}, {0.362674686, 0.246223343, -0.343767605, 0.087188258}},
        {"EPR input", BasisName::EPR, 2, {}, {0.006242015, 0.006242015}},
        {"EPR0", BasisName::EPR, 2, {1, 0}, {-0.061487970, -0.732535765}},
        {"LC3", BasisName::LC, 4, {0, 0, 0, 1}, {-0.000480519, -0.003952167, -0.359152197, -0.027584163}},
        {"LC2", BasisName::LC, 4, {0, 0, 1, 0}, {-0.035347906, -0.106653974, -0.069687399, -0.269318814}},
        {"LC superposition",
         BasisName::LC,
         4,
         {-0.4 * I, -0.4, 0.8 * I, 0.2},
         {0.000173214, 0.010715238, 0.041221766, -0.482113690}},
        {"SC0", BasisName::SC, 4, {1, 0, 0, 0}, {-0.035136958, -0.103016793, -0.257720051, -0.103016793}},
    };
    return cases;
}

Eigen::VectorXcd padded(const std::vector<Complex> &c) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    for (std::size_t k = 0; k < c.size(); ++k) v(static_cast<Eigen::Index>(k)) = c[k];
    return v;
}

std::vector<double> brute_kurtosis(brute::ProductState &state, const Case &c) {
    Eigen::MatrixXcd w = builtin_basis(c.basis, c.dim).embedded(4).internal_matrix();
    std::vector<brute::Jump> jumps{{1.0, Eigen::VectorXcd()}};
    if (!c.subtract.empty()) jumps = brute::noisy_channel(w.transpose() * padded(c.subtract), 0.0094, 0.95, 4);
    std::vector<double> out;
    for (int j = 0; j < c.dim; ++j) {
        out.push_back(brute::kurtosis(state, jumps, w.transpose() * Eigen::VectorXcd::Unit(4, j)));
    }
    return out;
}

std::vector<double> library_kurtosis(const Case &c) {
    ModeTransform basis = builtin_basis(c.basis, c.dim).embedded(4);
    CovarianceMatrix v = change_basis(paper_covariance(), basis);
    std::vector<ChannelTerm> terms;
    if (!c.subtract.empty()) {
        terms = channel_terms(paper_spec(CoefficientVector(padded(c.subtract))), 4);
        for (auto &t : terms) {
            if (t.kind == TermKind::single_mode) t.coefficients = basis.internal_matrix().conjugate() * t.coefficients;
        }
    }
    std::vector<double> out;
    for (int j = 0; j < c.dim; ++j) {
        CoefficientVector u = CoefficientVector::unit(4, j);
        out.push_back(terms.empty() ? gaussian_phase_moments(v, u).excess_kurtosis()
                                    : subtracted_phase_moments(v, terms, u).excess_kurtosis());
    }
    return out;
}

CovarianceMatrix random_state(std::mt19937_64 &rng, int n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
    }
    std::vector<double> r(n);
    for (auto &x : r) x = (unit(rng) - 0.5) * 0.7;
    Eigen::MatrixXd s = passive_symplectic(Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ()) *
                        squeezer_symplectic(r);
    Eigen::MatrixXd thermal = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) thermal.block<2, 2>(2 * k, 2 * k) *= 1.0 + 0.4 * unit(rng);
    return CovarianceMatrix(s * thermal * s.transpose());
}

Eigen::VectorXcd random_unit(std::mt19937_64 &rng, int n) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(n);
    for (int k = 0; k < n; ++k) v(k) = {g(rng), g(rng)};
    return v.normalized();
}

}  // namespace

TEST_CASE("channel weights follow the background-noise mixture") {
    CoefficientVector hg0 = CoefficientVector::unit(4, 0);
    SubtractionSpec paper = paper_spec(hg0);
    CHECK(paper.coherent_weight() == doctest::Approx(0.92456).epsilon(1e-6));
    CHECK(paper.incoherent_weight() == doctest::Approx(0.016510).epsilon(1e-6));

    std::vector<ChannelTerm> terms = channel_terms(paper);
    REQUIRE(terms.size() == 6);
    CHECK(terms[0].kind == TermKind::passthrough);
    CHECK(terms[0].weight == doctest::Approx(0.0094));
    CHECK(terms[1].kind == TermKind::coherent);
    double sum = 0.0;
    for (const auto &t : terms) sum += t.weight;
    CHECK(sum == doctest::Approx(0.0094 + 0.92456 + 4 * 0.016510).epsilon(1e-9));
    for (int k = 0; k < 4; ++k) {
        CHECK(terms[2 + k].kind == TermKind::single_mode);
        CHECK(terms[2 + k].mode == k);
    }

    std::vector<ChannelTerm> ideal = channel_terms(ideal_spec(hg0));
    REQUIRE(ideal.size() == 1);
    CHECK(ideal[0].weight == doctest::Approx(1.0));
    CHECK(make_spec(hg0, 0.0, 1.0, 4).is_ideal());

    std::vector<ChannelTerm> uniform = channel_terms(make_spec(hg0, 0.0, 0.25, 4));
    REQUIRE(uniform.size() == 4);
    for (const auto &t : uniform) {
        CHECK(t.kind == TermKind::single_mode);
        CHECK(t.weight == doctest::Approx(0.25));
    }
}

TEST_CASE("ideal specs normalize superposed modes") {
    Eigen::VectorXcd c(2);
    c << 1.0, -I;
    SubtractionSpec s = ideal_spec(c);
    CHECK(s.is_ideal());
    CHECK(std::abs(s.mode[1] + I / std::numbers::sqrt2) < 1e-15);
    Eigen::VectorXcd three(3);
    three << 1.0, I, 1.0;
    CHECK(std::abs(ideal_spec(three).mode[2] - 1.0 / std::sqrt(3.0)) < 1e-15);
    CHECK_THROWS_AS(ideal_spec(Eigen::VectorXcd(Eigen::VectorXcd::Zero(2))), UnphysicalError);
}

TEST_CASE("invalid channel parameters are rejected") {
    CoefficientVector hg0 = CoefficientVector::unit(4, 0);
    CHECK_THROWS(channel_terms(make_spec(hg0, 0.0, 0.2, 4)));
    CHECK_THROWS(make_spec(hg0, 1.5, 0.95, 4));
    CHECK_THROWS(make_spec(hg0, 0.1, -0.1, 4));
    CHECK_THROWS(make_spec(hg0, 0.1, 0.95, 0));
    CHECK_THROWS_AS(paper_spec(CoefficientVector::unit(5, 0)), DimensionError);
}

TEST_CASE("Gaussian moments by Wick pairing") {
    ComplexSecondMoments vac = ComplexSecondMoments::from_covariance(CovarianceMatrix::vacuum(1));
    CHECK(std::abs(gaussian_moment(vac, OperatorWord{{0, true}, {0, false}})) < 1e-15);
    CHECK(std::abs(gaussian_moment(vac, OperatorWord{{0, false}, {0, true}}) - 1.0) < 1e-15);

    ComplexSecondMoments g = ComplexSecondMoments::from_covariance(diag({2.0, 0.5}));
    CHECK(std::abs(gaussian_moment(g, OperatorWord{{0, true}, {0, false}}) - 0.125) < 1e-14);
    CHECK(std::abs(gaussian_moment(g, OperatorWord{{0, false}, {0, false}}) - 0.375) < 1e-14);
    CHECK(std::abs(gaussian_moment(g, OperatorWord{{0, true}, {0, true}, {0, false}, {0, false}}) - 0.171875) <
          1e-14);
    CHECK(std::abs(gaussian_moment(g, OperatorWord{{0, true}, {0, false}, {0, false}})) == 0.0);
    CHECK_THROWS_AS(gaussian_moment(g, OperatorWord{{1, true}, {0, false}}), DimensionError);
}

TEST_CASE("Gaussian moments agree with a number-basis product state") {
    ModeSqueeze spec[2] = {{2.8, -1.8}, {1.1, -0.6}};
    CovarianceMatrix v = covariance_from_squeeze(spec);
    ComplexSecondMoments g = ComplexSecondMoments::from_covariance(v);
    brute::ProductState state({brute::squeezed_thermal(v(0, 0), v(1, 1)), brute::squeezed_thermal(v(2, 2), v(3, 3))});
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int length = 2 + 2 * (trial % 3);
        std::vector<brute::Factor> factors;
        std::vector<LinearForm> forms;
        for (int i = 0; i < length; ++i) {
            Eigen::VectorXcd c = random_unit(rng, 2);
            const bool dagger = (rng() & 1u) != 0;
            factors.push_back({c, dagger});
            forms.push_back(dagger ? LinearForm::raising(c.conjugate()) : LinearForm::lowering(c));
        }
        Complex expected = state.expect(factors);
        CHECK(std::abs(gaussian_moment(g, forms) - expected) < 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("subtracted moments") {
    CoefficientVector m0 = CoefficientVector::unit(1, 0);
    CHECK_THROWS_AS(subtracted_moment(CovarianceMatrix::vacuum(1), ideal_spec(m0), OperatorWord{{0, true}, {0, false}}),
                    HeraldingError);

    CovarianceMatrix sq = diag({2.0, 0.5});
    std::vector<LinearForm> xx{x_form(0, 1), x_form(0, 1)};
    CHECK(std::abs(subtracted_moment(sq, ideal_spec(m0), xx) - 6.0) < 1e-12);

    CovarianceMatrix two = diag({1.9, 0.66, 1.6, 0.7});
    ComplexSecondMoments g = ComplexSecondMoments::from_covariance(two);
    SubtractionSpec in0 = ideal_spec(CoefficientVector::unit(2, 0));
    for (const OperatorWord &w : {OperatorWord{{1, true}, {1, false}}, OperatorWord{{1, false}, {1, false}},
                                  OperatorWord{{1, true}, {1, true}, {1, false}, {1, false}}}) {
        CHECK(std::abs(subtracted_moment(two, in0, w) - gaussian_moment(g, w)) < 1e-12);
    }

    SubtractionSpec passthrough = make_spec(CoefficientVector::unit(2, 0), 1.0, 0.95, 4);
    CHECK(std::abs(subtracted_moment(two, passthrough, OperatorWord{{0, true}, {0, false}}) -
                   gaussian_moment(g, OperatorWord{{0, true}, {0, false}})) < 1e-14);
}

TEST_CASE("heralding probability is the mean photon number of the jump mode") {
    CovarianceMatrix sq = diag({2.0, 0.5});
    CHECK(heralding_probability(sq, ideal_spec(CoefficientVector::unit(1, 0))) == doctest::Approx(0.125));
    CHECK(heralding_probability(CovarianceMatrix::vacuum(2), paper_spec(CoefficientVector::unit(2, 0))) ==
          doctest::Approx(0.0094));
}

TEST_CASE("analytic excess kurtosis examples") {
    CoefficientVector m0 = CoefficientVector::unit(1, 0);
    CHECK(excess_kurtosis_analytic(CovarianceMatrix::vacuum(1), make_spec(m0, 1.0, 1.0, 1), m0) ==
          doctest::Approx(0.0).scale(1.0));
    CovarianceMatrix sq = diag({2.0, 0.5});
    CHECK(gaussian_phase_moments(sq, m0).excess_kurtosis() == doctest::Approx(0.54).epsilon(1e-12));
    CHECK(excess_kurtosis_analytic(sq, ideal_spec(m0), m0) == doctest::Approx(-31.0 / 30.0).epsilon(1e-12));
    CHECK_THROWS_AS(excess_kurtosis_analytic(CovarianceMatrix::vacuum(1), ideal_spec(m0), m0), HeraldingError);

    const double v = std::pow(10.0, 0.18);
    CovarianceMatrix pure = diag({v, 1.0 / v});
    brute::ProductState state({brute::squeezed_thermal(v, 1.0 / v)});
    Eigen::VectorXcd e = Eigen::VectorXcd::Unit(1, 0);
    const double brute_lossless = brute::kurtosis(state, {{1.0, e}}, e);
    const double brute_lossy = brute::kurtosis(state, {{1.0, e}}, e, 0.875);
    CHECK(brute_lossless == doctest::Approx(-1.205111685).epsilon(1e-8));
    CHECK(brute_lossy == doctest::Approx(-1.106090127).epsilon(1e-8));
    PhaseAveragedMoments m = subtracted_phase_moments(pure, ideal_spec(m0), m0);
    CHECK(m.excess_kurtosis() == doctest::Approx(brute_lossless).epsilon(1e-9));
    CHECK(m.with_loss(0.875).excess_kurtosis() == doctest::Approx(brute_lossy).epsilon(1e-9));
}

TEST_CASE("frozen paper-state kurtosis values match the number-basis oracle") {
    brute::ProductState state = brute::paper_state();
    for (const Case &c : frozen_cases()) {
        INFO(c.name);
        std::vector<double> got = brute_kurtosis(state, c);
        for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == doctest::Approx(c.kurtosis[j]).epsilon(1e-8));
    }
}

TEST_CASE("analytic engine reproduces the frozen paper-state kurtosis values") {
    for (const Case &c : frozen_cases()) {
        INFO(c.name);
        std::vector<double> got = library_kurtosis(c);
        for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == doctest::Approx(c.kurtosis[j]).epsilon(1e-8));
    }
}

TEST_CASE("Gaussian states never show negative excess kurtosis") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 4;
        CovarianceMatrix v = random_state(rng, n);
        CoefficientVector u(random_unit(rng, n));
        CHECK(gaussian_phase_moments(v, u).excess_kurtosis() >= -1e-9);
    }
}

TEST_CASE("subtraction is covariant under a global phase of the mode") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        CovarianceMatrix v = random_state(rng, 2);
        Eigen::VectorXcd c = random_unit(rng, 2);
        CoefficientVector u(random_unit(rng, 2));
        const double k = subtracted_phase_moments(v, paper_spec(CoefficientVector(c)), u).excess_kurtosis();
        const double rotated =
            subtracted_phase_moments(v, paper_spec(CoefficientVector(std::polar(1.0, 0.7) * c)), u).excess_kurtosis();
        CHECK(k == doctest::Approx(rotated).epsilon(1e-12));
    }
}

TEST_CASE("terms transform with the basis") {
    std::mt19937_64 rng(8);
    CovarianceMatrix v = random_state(rng, 2);
    Eigen::MatrixXcd u = builtin_basis(BasisName::EPR, 2).internal_matrix();
    CovarianceMatrix rotated = change_basis(v, u);
    Eigen::VectorXcd c = random_unit(rng, 2);
    std::vector<ChannelTerm> before = channel_terms(paper_spec(CoefficientVector(c)), 2);
    std::vector<ChannelTerm> after = transform_terms(before, u);
    CHECK(heralding_probability(v, before) == doctest::Approx(heralding_probability(rotated, after)).epsilon(1e-12));
    Eigen::VectorXcd probe = random_unit(rng, 2);
    const double k_before = subtracted_phase_moments(v, before, CoefficientVector(probe)).excess_kurtosis();
    const double k_after =
        subtracted_phase_moments(rotated, after, CoefficientVector(u.conjugate() * probe)).excess_kurtosis();
    CHECK(k_before == doctest::Approx(k_after).epsilon(1e-10));
    CHECK_THROWS_AS(transform_terms(before, Eigen::MatrixXcd::Identity(3, 3)), DimensionError);
}
