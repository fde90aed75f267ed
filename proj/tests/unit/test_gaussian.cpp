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
#include <random>
#include <vector>

#include "photonsub/errors.hpp"
#include "photonsub/gaussian.hpp"
#include "photonsub/symplectic.hpp"

using namespace photonsub;

namespace {

CovarianceMatrix in_basis(const CovarianceMatrix &v, BasisName name, int n) {
    return change_basis(v, builtin_basis(name, n).embedded(v.modes()));
}

CovarianceMatrix two_mode_squeezed(double db) {
    const double c = 0.5 * (std::pow(10.0, db / 10.0) + std::pow(10.0, -db / 10.0));
    const double s = std::sqrt(c * c - 1.0);
    Eigen::MatrixXd m = c * Eigen::MatrixXd::Identity(4, 4);
    m(0, 2) = m(2, 0) = s;
    m(1, 3) = m(3, 1) = -s;
    return CovarianceMatrix(m);
}

// Random mixed Gaussian state: thermal occupations dressed by a random symplectic.
CovarianceMatrix random_gaussian(std::mt19937_64 &rng, int n, double max_db) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n), b(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = {g(rng), g(rng)};
            b(i, j) = {g(rng), g(rng)};
        }
    }
    std::vector<double> r(n);
    for (auto &x : r) x = (unit(rng) - 0.5) * max_db / (10.0 * std::log10(std::exp(2.0)));
    Eigen::MatrixXd s = passive_symplectic(Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ()) *
                        squeezer_symplectic(r) *
                        passive_symplectic(Eigen::HouseholderQR<Eigen::MatrixXcd>(b).householderQ());
    Eigen::MatrixXd thermal = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) thermal.block<2, 2>(2 * k, 2 * k) *= 1.0 + 0.5 * unit(rng);
    return CovarianceMatrix(s * thermal * s.transpose());
}

}  // namespace

TEST_CASE("squeeze specs convert decibels to variances") {
    ModeSqueeze zero[2] = {};
    CHECK(covariance_from_squeeze(zero).matrix().isIdentity(0.0));

    CovarianceMatrix paper = paper_covariance();
    CHECK(paper.modes() == 4);
    CHECK(paper(0, 0) == doctest::Approx(1.9055).epsilon(1e-4));
    CHECK(paper(1, 1) == doctest::Approx(0.6607).epsilon(1e-4));

    ModeSqueeze factor2[1] = {{3.0103, -3.0103}};
    CovarianceMatrix v = covariance_from_squeeze(factor2);
    CHECK(v(0, 0) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(v(1, 1) == doctest::Approx(0.5).epsilon(1e-4));

    ModeSqueeze unphysical[1] = {{-1.0, -1.0}};
    CHECK_THROWS_AS(covariance_from_squeeze(unphysical), UnphysicalError);
}

TEST_CASE("covariance matrices reject asymmetric or non-physical input") {
    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
    asym(0, 1) = 0.3;
    CHECK_THROWS(CovarianceMatrix(asym));
    CHECK_THROWS_AS(CovarianceMatrix(Eigen::MatrixXd::Identity(3, 3)), DimensionError);
    CHECK_THROWS(CovarianceMatrix(Eigen::MatrixXd(Eigen::Vector2d(0.5, 0.5).asDiagonal())));
}

TEST_CASE("basis changes leave vacuum alone and preserve symplectic spectra") {
    CovarianceMatrix vac = CovarianceMatrix::vacuum(4);
    for (BasisName name : {BasisName::HG, BasisName::LC, BasisName::SC}) {
        CHECK((in_basis(vac, name, 4).matrix() - vac.matrix()).norm() < 1e-12);
    }
    CovarianceMatrix paper = paper_covariance();
    CovarianceMatrix hg = in_basis(paper, BasisName::HG, 4);
    for (int k = 0; k < 4; ++k) {
        const bool odd = k % 2 == 1;
        CHECK(hg(2 * k, 2 * k) == doctest::Approx(odd ? paper(2 * k + 1, 2 * k + 1) : paper(2 * k, 2 * k)));
        CHECK(hg(2 * k + 1, 2 * k + 1) == doctest::Approx(odd ? paper(2 * k, 2 * k) : paper(2 * k + 1, 2 * k + 1)));
    }

    std::vector<double> before = symplectic_eigenvalues(paper.matrix());
    for (BasisName name : {BasisName::LC, BasisName::SC}) {
        std::vector<double> after = symplectic_eigenvalues(in_basis(paper, name, 4).matrix());
        REQUIRE(after.size() == before.size());
        for (std::size_t k = 0; k < before.size(); ++k) CHECK(after[k] == doctest::Approx(before[k]).epsilon(1e-10));
    }
}

TEST_CASE("loss is an affine map toward vacuum") {
    ModeSqueeze one[1] = {{2.8, -1.8}};
    CovarianceMatrix v = covariance_from_squeeze(one);
    CHECK((apply_loss(v, 1.0).matrix() - v.matrix()).norm() == 0.0);
    CHECK(apply_loss(v, 0.875)(1, 1) == doctest::Approx(0.7031).epsilon(2e-4));
    CHECK(apply_loss(CovarianceMatrix::vacuum(2), 0.875).matrix().isIdentity(1e-15));

    CovarianceMatrix tms = two_mode_squeezed(3.0);
    const double eta[2] = {0.81, 0.64};
    CovarianceMatrix lossy = apply_loss(tms, eta);
    CHECK(lossy(0, 2) == doctest::Approx(0.72 * tms(0, 2)));
    CHECK(lossy(2, 2) == doctest::Approx(0.64 * tms(2, 2) + 0.36));
    CHECK_THROWS(apply_loss(v, 0.0));
    CHECK_THROWS(apply_loss(v, 1.5));
}

TEST_CASE("Duan sums") {
    CHECK(duan_value(CovarianceMatrix::vacuum(2), 0, 1) == doctest::Approx(4.0));
    CHECK(duan_value(in_basis(paper_covariance(), BasisName::EPR, 2), 0, 1) ==
          doctest::Approx(2.705).epsilon(0.01 / 2.705));

    ModeSqueeze p_squeezed[2] = {{3.0103, -3.0103}, {3.0103, -3.0103}};
    CovarianceMatrix epr = in_basis(covariance_from_squeeze(p_squeezed), BasisName::EPR, 2);
    CHECK(duan_value(epr, 0, 1) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK_THROWS_AS(duan_value(epr, 1, 1), DimensionError);
}

TEST_CASE("EPR conditional variance products") {
    CHECK(epr_value(CovarianceMatrix::vacuum(2), 1, 0) == doctest::Approx(1.0));
    CHECK(epr_value(in_basis(paper_covariance(), BasisName::EPR, 2), 1, 0) ==
          doctest::Approx(0.953).epsilon(0.01 / 0.953));
    CHECK(epr_value(two_mode_squeezed(10.0), 1, 0) < 0.2);
    CHECK_THROWS_AS(epr_value(two_mode_squeezed(1.0), 0, 0), DimensionError);
}

TEST_CASE("cluster nullifiers are below vacuum") {
    for (double v : nullifier_variances(CovarianceMatrix::vacuum(4), ring_adjacency(4))) {
        CHECK(v == doctest::Approx(1.0));
    }
    for (double v : nullifier_variances(in_basis(paper_covariance(), BasisName::LC, 4), chain_adjacency(4))) {
        CHECK(v < 1.0);
    }
    for (double v : nullifier_variances(in_basis(paper_covariance(), BasisName::SC, 4), ring_adjacency(4))) {
        CHECK(v < 1.0);
    }
    Eigen::MatrixXi looped = chain_adjacency(4);
    looped(1, 1) = 1;
    CHECK_THROWS(nullifier_variances(CovarianceMatrix::vacuum(4), looped));
    CHECK_THROWS_AS(nullifier_variances(CovarianceMatrix::vacuum(4), chain_adjacency(3)), DimensionError);
}

TEST_CASE("validation reports purity and physicality") {
    ValidationReport vac = validate(CovarianceMatrix::vacuum(2));
    CHECK(vac.physical);
    for (double p : vac.mode_purities) CHECK(p == doctest::Approx(1.0));

    ValidationReport paper = validate(paper_covariance());
    CHECK(paper.physical);
    CHECK(paper.mode_purities[0] == doctest::Approx(0.891).epsilon(1e-3));

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 0) = -0.5;
    ValidationReport neg = validate(bad);
    CHECK_FALSE(neg.physical);
    CHECK(neg.min_eigenvalue < 0.0);

    Eigen::MatrixXd heisenberg = Eigen::MatrixXd::Identity(2, 2) * 0.5;
    CHECK_FALSE(validate(heisenberg).physical);
}

TEST_CASE("Williamson and Bloch-Messiah reassemble their inputs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 3;
        CovarianceMatrix v = random_gaussian(rng, n, 3.0);
        CHECK(validate(v).physical);

        WilliamsonDecomposition w = williamson(v.matrix());
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        for (int k = 0; k < n; ++k) d(2 * k, 2 * k) = d(2 * k + 1, 2 * k + 1) = w.nu[k];
        CHECK((w.symplectic * d * w.symplectic.transpose() - v.matrix()).norm() < 1e-9);
        Eigen::MatrixXd omega = symplectic_form(n);
        CHECK((w.symplectic * omega * w.symplectic.transpose() - omega).norm() < 1e-9);

        BlochMessiahDecomposition bm = bloch_messiah(w.symplectic);
        Eigen::MatrixXd rebuilt =
            passive_symplectic(bm.first) * squeezer_symplectic(bm.squeeze) * passive_symplectic(bm.second);
        CHECK((rebuilt - w.symplectic).norm() < 1e-8);
    }
}

TEST_CASE("passive symplectics round-trip through their unitaries") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a(i, j) = {g(rng), g(rng)};
    }
    Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
    CHECK((passive_unitary(passive_symplectic(u)) - u).norm() < 1e-12);
}
