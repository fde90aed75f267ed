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
#include <vector>

#include "photonsub/fock.hpp"
#include "photonsub/gaussian.hpp"
#include "photonsub/homodyne.hpp"
#include "photonsub/subtraction.hpp"
#include "photonsub/tomography.hpp"

using namespace photonsub;

namespace {

const CoefficientVector kSingle = CoefficientVector::unit(1, 0);

FockDensity subtracted_state(double db) {
    const double v = std::pow(10.0, db / 10.0);
    FockDensity sq = gaussian_to_fock(CovarianceMatrix(Eigen::Vector2d(1.0 / v, v).asDiagonal()), 30);
    return apply_channel(sq, ideal_spec(kSingle)).state;
}

bool monotone(const std::vector<double> &values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[i - 1] - 1e-9 * std::abs(values[i - 1])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("vacuum data reconstructs the vacuum") {
    FockDensity vac = gaussian_to_fock(CovarianceMatrix::vacuum(1), 10);
    QuadratureDataset data = sample_quadratures(vac, kSingle, PhaseSchedule::uniform(), 20000, 1.0, 1);
    TomographyResult r = reconstruct(data, {});
    CHECK(r.state.matrix(0, 0).real() > 0.99);
    CHECK(monotone(r.log_likelihood));
    CHECK(r.operators > 0);

    StateObservables obs = report_observables(vac, &vac);
    CHECK(obs.w0 == doctest::Approx(1.0));
    CHECK(obs.purity == doctest::Approx(1.0));
    CHECK(obs.kurtosis == doctest::Approx(0.0).scale(1.0));
    REQUIRE(obs.fidelity);
    CHECK(*obs.fidelity == doctest::Approx(1.0));
}

TEST_CASE("Gaussian data never reconstructs to negative kurtosis") {
    FockDensity sq = gaussian_to_fock(CovarianceMatrix(Eigen::Vector2d(1.9055, 0.6607).asDiagonal()), 30);
    QuadratureDataset data = sample_quadratures(sq, kSingle, PhaseSchedule::uniform(), 20000, 1.0, 5);
    TomographyResult r = reconstruct(data, {});
    KurtosisEstimate k = kurtosis_estimate(data, 200, 5);
    CHECK(report_observables(r.state).kurtosis >= -3.0 * k.standard_error);
    CHECK(monotone(r.log_likelihood));
}

TEST_CASE("fidelity improves with the sample count") {
    FockDensity truth = with_cutoff(subtracted_state(1.8), 10);
    double previous = 0.0;
    for (int samples : {10000, 30000}) {
        QuadratureDataset data = sample_quadratures(truth, kSingle, PhaseSchedule::uniform(), samples, 1.0, 77);
        TomographyResult r = reconstruct(data, {});
        const double f = fidelity(r.state, truth);
        CHECK(f > previous);
        previous = f;
    }
    CHECK(previous > 0.99);
}

TEST_CASE("ignoring detector loss pulls W0 toward zero") {
    FockDensity truth = subtracted_state(1.8);
    QuadratureDataset data = sample_quadratures(truth, kSingle, PhaseSchedule::uniform(), 30000, 0.875, 21);
    TomographyConfig corrected;
    corrected.eta = 0.875;
    TomographyResult with_loss = reconstruct(data, corrected);
    TomographyResult without = reconstruct(data, {});
    const double w_corrected = report_observables(with_loss.state).w0;
    const double w_plain = report_observables(without.state).w0;
    CHECK(w_corrected < w_plain);
    CHECK(w_plain < 0.0);
    CHECK(monotone(with_loss.log_likelihood));
}

TEST_CASE("unbinned reconstruction uses one operator per record") {
    FockDensity vac = gaussian_to_fock(CovarianceMatrix::vacuum(1), 6);
    QuadratureDataset data = sample_quadratures(vac, kSingle, PhaseSchedule::uniform(), 400, 1.0, 2);
    TomographyConfig cfg;
    cfg.binned = false;
    cfg.cutoff = 5;
    TomographyResult r = reconstruct(data, cfg);
    CHECK(r.operators == 400);
    CHECK(r.state.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(monotone(r.log_likelihood));
}
