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

#include "photonsub/tomography.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "photonsub/errors.hpp"

namespace photonsub {

namespace {

struct Operator {
    double theta;
    double x;
    /// Half-width of the phase bin the operator averages over; zero for a sharp phase.
    double half_width;
    double count;
};

std::vector<Operator> collect_operators(const QuadratureDataset &data, const TomographyConfig &config) {
    std::vector<Operator> ops;
    if (!config.binned) {
        ops.reserve(data.records.size());
        for (const auto &r : data.records) ops.push_back({r.theta, r.x, 0.0, 1.0});
        return ops;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const double phase_width = two_pi / config.phase_bins;
    std::map<std::pair<int, long long>, int> bins;
    for (const auto &r : data.records) {
        double wrapped = std::fmod(r.theta, two_pi);
        if (wrapped < 0.0) wrapped += two_pi;
        int pb = std::min(config.phase_bins - 1, static_cast<int>(wrapped / phase_width));
        auto xb = static_cast<long long>(std::floor(r.x / config.x_bin_width));
        ++bins[{pb, xb}];
    }
    ops.reserve(bins.size());
    for (const auto &[key, count] : bins) {
        ops.push_back({(key.first + 0.5) * phase_width, (static_cast<double>(key.second) + 0.5) * config.x_bin_width,
                       0.5 * phase_width, static_cast<double>(count)});
    }
    return ops;
}

/// Rows are the flattened (m, n) entries of each lossy quadrature projector.
Eigen::MatrixXcd operator_table(const std::vector<Operator> &ops, int d, double eta) {
    Eigen::MatrixXd loss = Eigen::MatrixXd::Zero(d, d);
    for (int m = 0; m < d; ++m) {
        for (int k = 0; k <= m; ++k) {
            double log_c = 0.5 * (std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0));
            log_c += 0.5 * (m - k) * std::log(eta);
            if (k > 0) log_c += 0.5 * k * std::log1p(-eta);
            loss(m, k) = eta == 1.0 && k > 0 ? 0.0 : std::exp(log_c);
        }
    }
    Eigen::MatrixXcd table(static_cast<Eigen::Index>(ops.size()), d * d);
    for (std::size_t j = 0; j < ops.size(); ++j) {
        const Operator &op = ops[j];
        Eigen::VectorXd psi = oscillator_functions(op.x, d);
        Eigen::MatrixXd projector = Eigen::MatrixXd::Zero(d, d);
        for (int k = 0; k < d; ++k) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
            for (int m = k; m < d; ++m) v(m) = loss(m, k) * psi(m - k);
            if (v.squaredNorm() == 0.0) continue;
            projector.noalias() += v * v.transpose();
        }
        for (int m = 0; m < d; ++m) {
            for (int n = 0; n < d; ++n) {
                const int diff = m - n;
                double smear = 1.0;
                if (diff != 0 && op.half_width > 0.0) smear = std::sin(diff * op.half_width) / (diff * op.half_width);
                table(static_cast<Eigen::Index>(j), m * d + n) = projector(m, n) * smear * std::polar(1.0, op.theta * diff);
            }
        }
    }
    return table;
}

Eigen::VectorXcd flatten_transpose(const Eigen::MatrixXcd &rho) {
    const int d = static_cast<int>(rho.rows());
    Eigen::VectorXcd out(d * d);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) out(m * d + n) = rho(n, m);
    }
    return out;
}

double log_likelihood(const Eigen::VectorXd &probabilities, const Eigen::VectorXd &counts) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < counts.size(); ++j) total += counts(j) * std::log(std::max(probabilities(j), 1e-300));
    return total;
}

Eigen::VectorXd probabilities(const Eigen::MatrixXcd &table, const Eigen::MatrixXcd &rho) {
    return (table * flatten_transpose(rho)).real();
}

}  // namespace

TomographyResult reconstruct(const QuadratureDataset &data, const TomographyConfig &config) {
    if (config.cutoff < 5) throw DimensionError("tomography cutoff must be at least 5");
    if (!(config.eta > 0.0 && config.eta <= 1.0)) throw UnphysicalError("tomography efficiency must lie in (0, 1]");
    if (!(config.tolerance > 0.0)) throw Error("tomography tolerance must be positive");
    if (config.binned && (config.phase_bins < 1 || !(config.x_bin_width > 0.0))) {
        throw Error("tomography bins must be positive");
    }
    if (data.records.empty()) throw Error("tomography needs at least one record");

    const int d = config.cutoff;
    std::vector<Operator> ops = collect_operators(data, config);
    Eigen::MatrixXcd table = operator_table(ops, d, config.eta);
    Eigen::VectorXd counts(static_cast<Eigen::Index>(ops.size()));
    for (std::size_t j = 0; j < ops.size(); ++j) counts(static_cast<Eigen::Index>(j)) = ops[j].count;
    const double total = counts.sum();

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
    Eigen::VectorXd prob = probabilities(table, rho);
    double like = log_likelihood(prob, counts);

    TomographyResult result;
    result.operators = static_cast<int>(ops.size());
    result.log_likelihood.push_back(like);
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(d, d);
    for (int it = 0; it < config.max_iters; ++it) {
        Eigen::VectorXcd weights(prob.size());
        for (Eigen::Index j = 0; j < prob.size(); ++j) weights(j) = counts(j) / (total * std::max(prob(j), 1e-300));
        Eigen::VectorXcd flat = table.transpose() * weights;
        Eigen::MatrixXcd r(d, d);
        for (int m = 0; m < d; ++m) {
            for (int n = 0; n < d; ++n) r(m, n) = flat(m * d + n);
        }
        r = 0.5 * (r + r.adjoint()).eval();

        // Full step first, then diluted steps (I + eps R) until the likelihood does not drop.
        bool accepted = false;
        double step = 0.0;
        for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
            Eigen::MatrixXcd a = attempt == 0 ? r : identity + step * r;
            Eigen::MatrixXcd next = a * rho * a.adjoint();
            next = 0.5 * (next + next.adjoint()).eval();
            next /= next.trace().real();
            Eigen::VectorXd next_prob = probabilities(table, next);
            double next_like = log_likelihood(next_prob, counts);
            if (next_like >= like) {
                double gain = next_like - like;
                rho = std::move(next);
                prob = std::move(next_prob);
                like = next_like;
                result.log_likelihood.push_back(like);
                accepted = true;
                if (gain < config.tolerance) result.converged = true;
            }
            step = attempt == 0 ? 1.0 : 0.5 * step;
        }
        result.iterations = it + 1;
        if (!accepted) result.converged = true;
        if (result.converged) break;
    }
    result.state = fock_from_matrix({d}, rho);
    return result;
}

StateObservables report_observables(const FockDensity &rho, const FockDensity *reference, FidelityKind kind) {
    if (rho.modes() != 1) throw DimensionError("observables are reported for single-mode states");
    StateObservables out;
    out.w0 = parity_w0(rho);
    out.purity = purity(rho);
    out.kurtosis = fock_phase_moments(rho).excess_kurtosis();
    if (reference != nullptr) {
        if (reference->modes() != 1) throw DimensionError("reference state must be single-mode");
        const int d = std::max(rho.space.dim(), reference->space.dim());
        FockDensity a = with_cutoff(rho, d), b = with_cutoff(*reference, d);
        out.fidelity = kind == FidelityKind::uhlmann ? fidelity(a, b) : overlap_fidelity(a, b);
    }
    return out;
}

}  // namespace photonsub
