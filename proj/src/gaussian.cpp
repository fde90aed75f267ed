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

#include "photonsub/gaussian.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "photonsub/errors.hpp"

namespace photonsub {

namespace {

double max_abs(const Eigen::MatrixXd &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void check_mode_index(const CovarianceMatrix &v, int k, const char *what) {
    if (k < 0 || k >= v.modes()) {
        throw DimensionError(std::string(what) + ": mode " + std::to_string(k) + " out of range for " +
                             std::to_string(v.modes()) + " modes");
    }
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols() || matrix_.rows() % 2 != 0) {
        throw DimensionError("covariance matrix must be 2N x 2N with N >= 1");
    }
    if (!matrix_.allFinite()) {
        throw UnphysicalError("covariance matrix has non-finite entries");
    }
    ValidationReport report = validate(matrix_);
    if (report.symmetry_deviation > 1e-10 * std::max(1.0, max_abs(matrix_))) {
        throw UnphysicalError("covariance matrix is not symmetric (deviation " +
                              std::to_string(report.symmetry_deviation) + ")");
    }
    if (!report.physical) {
        throw UnphysicalError("covariance matrix violates the uncertainty relation: " + report.summary());
    }
    matrix_ = 0.5 * (matrix_ + matrix_.transpose()).eval();
}

CovarianceMatrix CovarianceMatrix::vacuum(int modes) {
    if (modes < 1) throw DimensionError("vacuum needs at least one mode");
    return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * modes, 2 * modes));
}

CovarianceMatrix CovarianceMatrix::reduced(std::span<const int> keep) const {
    const int n = static_cast<int>(keep.size());
    if (n == 0) throw DimensionError("reduced covariance needs at least one mode");
    Eigen::MatrixXd out(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        check_mode_index(*this, keep[a], "reduced");
        for (int b = 0; b < n; ++b) {
            out.block<2, 2>(2 * a, 2 * b) = block(keep[a], keep[b]);
        }
    }
    return CovarianceMatrix(out);
}

CovarianceMatrix covariance_from_squeeze(std::span<const ModeSqueeze> spec) {
    if (spec.empty()) throw DimensionError("squeeze spec needs at least one mode");
    const int n = static_cast<int>(spec.size());
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        const auto &m = spec[k];
        if (!std::isfinite(m.x_db) || !std::isfinite(m.p_db)) {
            throw UnphysicalError("squeeze spec for mode " + std::to_string(k) + " is not finite");
        }
        if (m.x_db + m.p_db < -1e-9) {
            std::ostringstream msg;
            msg << "mode " << k << " variances (" << m.x_db << " dB, " << m.p_db
                << " dB) violate the uncertainty relation (x_dB + p_dB < 0)";
            throw UnphysicalError(msg.str());
        }
        v(2 * k, 2 * k) = std::pow(10.0, m.x_db / 10.0);
        v(2 * k + 1, 2 * k + 1) = std::pow(10.0, m.p_db / 10.0);
    }
    return CovarianceMatrix(v);
}

std::vector<ModeSqueeze> paper_squeeze_db() {
    return {{2.8, -1.8}, {2.1, -1.6}, {1.6, -1.0}, {1.4, -0.7}};
}

CovarianceMatrix paper_covariance() {
    auto spec = paper_squeeze_db();
    return covariance_from_squeeze(spec);
}

Eigen::MatrixXd symplectic_form(int modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    for (int k = 0; k < modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

Eigen::MatrixXd passive_symplectic(const Eigen::MatrixXcd &u) {
    const int n = static_cast<int>(u.rows());
    Eigen::MatrixXd s(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            double a = u(j, k).real();
            double b = u(j, k).imag();
            s(2 * j, 2 * k) = a;
            s(2 * j, 2 * k + 1) = -b;
            s(2 * j + 1, 2 * k) = b;
            s(2 * j + 1, 2 * k + 1) = a;
        }
    }
    return s;
}

CovarianceMatrix change_basis(const CovarianceMatrix &v, const Eigen::MatrixXcd &u) {
    if (u.rows() != v.modes() || u.cols() != v.modes()) {
        throw DimensionError("change_basis: " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                             " transform for a " + std::to_string(v.modes()) + "-mode state");
    }
    double dev = unitarity_deviation(u);
    if (dev > 1e-8) {
        throw UnphysicalError("change_basis: transform is not unitary (deviation " + std::to_string(dev) + ")");
    }
    Eigen::MatrixXd s = passive_symplectic(u);
    Eigen::MatrixXd out = s * v.matrix() * s.transpose();
    return CovarianceMatrix(0.5 * (out + out.transpose()));
}

CovarianceMatrix change_basis(const CovarianceMatrix &v, const ModeTransform &basis) {
    return change_basis(v, basis.internal_matrix());
}

CovarianceMatrix apply_loss(const CovarianceMatrix &v, std::span<const double> eta) {
    if (static_cast<int>(eta.size()) != v.modes()) {
        throw DimensionError("apply_loss: " + std::to_string(eta.size()) + " efficiencies for " +
                             std::to_string(v.modes()) + " modes");
    }
    Eigen::VectorXd scale(2 * v.modes());
    for (int k = 0; k < v.modes(); ++k) {
        if (!(eta[k] > 0.0 && eta[k] <= 1.0)) {
            throw UnphysicalError("apply_loss: efficiency " + std::to_string(eta[k]) + " outside (0, 1]");
        }
        scale(2 * k) = scale(2 * k + 1) = std::sqrt(eta[k]);
    }
    Eigen::MatrixXd out = scale.asDiagonal() * v.matrix() * scale.asDiagonal();
    for (int k = 0; k < v.modes(); ++k) {
        out(2 * k, 2 * k) += 1.0 - eta[k];
        out(2 * k + 1, 2 * k + 1) += 1.0 - eta[k];
    }
    return CovarianceMatrix(out);
}

CovarianceMatrix apply_loss(const CovarianceMatrix &v, double eta) {
    std::vector<double> all(v.modes(), eta);
    return apply_loss(v, all);
}

double duan_value(const CovarianceMatrix &v, int i, int j) {
    check_mode_index(v, i, "duan_value");
    check_mode_index(v, j, "duan_value");
    if (i == j) throw DimensionError("duan_value needs two distinct modes");
    const auto &m = v.matrix();
    double xs = m(2 * i, 2 * i) + m(2 * j, 2 * j) - 2.0 * m(2 * i, 2 * j);
    double ps = m(2 * i + 1, 2 * i + 1) + m(2 * j + 1, 2 * j + 1) + 2.0 * m(2 * i + 1, 2 * j + 1);
    return xs + ps;
}

double epr_value(const CovarianceMatrix &v, int conditioned, int conditioning) {
    check_mode_index(v, conditioned, "epr_value");
    check_mode_index(v, conditioning, "epr_value");
    if (conditioned == conditioning) throw DimensionError("epr_value needs two distinct modes");
    const auto &m = v.matrix();
    double product = 1.0;
    for (int q = 0; q < 2; ++q) {
        int a = 2 * conditioned + q;
        int b = 2 * conditioning + q;
        if (!(m(b, b) > 1e-300)) throw UnphysicalError("epr_value: conditioning variance is zero");
        product *= m(a, a) - m(a, b) * m(a, b) / m(b, b);
    }
    return product;
}

std::vector<double> nullifier_variances(const CovarianceMatrix &v, const Eigen::MatrixXi &adjacency) {
    const int n = v.modes();
    if (adjacency.rows() != n || adjacency.cols() != n) {
        throw DimensionError("adjacency must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    for (int k = 0; k < n; ++k) {
        if (adjacency(k, k) != 0) throw Error("adjacency must have a zero diagonal");
        for (int l = 0; l < n; ++l) {
            if (adjacency(k, l) != adjacency(l, k) || (adjacency(k, l) != 0 && adjacency(k, l) != 1)) {
                throw Error("adjacency must be a symmetric 0/1 matrix");
            }
        }
    }
    std::vector<double> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n);
        c(2 * k) = 1.0;
        int degree = 0;
        for (int l = 0; l < n; ++l) {
            if (adjacency(k, l)) {
                c(2 * l + 1) = -1.0;
                ++degree;
            }
        }
        out.push_back(c.dot(v.matrix() * c) / (1.0 + degree));
    }
    return out;
}

Eigen::MatrixXi chain_adjacency(int n) {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) a(k, k + 1) = a(k + 1, k) = 1;
    return a;
}

Eigen::MatrixXi ring_adjacency(int n) {
    Eigen::MatrixXi a = chain_adjacency(n);
    if (n > 2) a(0, n - 1) = a(n - 1, 0) = 1;
    return a;
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd &v) {
    const int n = static_cast<int>(v.rows() / 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (v + v.transpose()));
    Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd root = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXcd h = Complex(0.0, 1.0) * (root * symplectic_form(n) * root).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(0.5 * (h + h.adjoint()));
    std::vector<double> nu;
    // Eigenvalues come in +-nu pairs; keep the positive half.
    for (int k = n; k < 2 * n; ++k) nu.push_back(hs.eigenvalues()(k));
    return nu;
}

ValidationReport validate(const Eigen::MatrixXd &v) {
    ValidationReport r;
    if (v.rows() == 0 || v.rows() != v.cols() || v.rows() % 2 != 0 || !v.allFinite()) {
        r.physical = false;
        r.symmetry_deviation = INFINITY;
        r.min_eigenvalue = -INFINITY;
        r.min_uncertainty_eigenvalue = -INFINITY;
        return r;
    }
    const int n = static_cast<int>(v.rows() / 2);
    r.symmetry_deviation = max_abs(v - v.transpose());
    Eigen::MatrixXd sym = 0.5 * (v + v.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = es.eigenvalues()(0);
    Eigen::MatrixXcd h = sym.cast<Complex>() + Complex(0.0, 1.0) * symplectic_form(n).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h, Eigen::EigenvaluesOnly);
    r.min_uncertainty_eigenvalue = hs.eigenvalues()(0);
    for (int k = 0; k < n; ++k) {
        double det = sym.block<2, 2>(2 * k, 2 * k).determinant();
        r.mode_purities.push_back(det > 0.0 ? 1.0 / std::sqrt(det) : INFINITY);
    }
    r.physical = r.symmetry_deviation <= 1e-10 * std::max(1.0, max_abs(v)) && r.min_eigenvalue > 0.0 &&
                 r.min_uncertainty_eigenvalue >= -1e-8;
    return r;
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    out << (physical ? "physical" : "unphysical") << " (symmetry deviation " << symmetry_deviation
        << ", min eigenvalue " << min_eigenvalue << ", min eigenvalue of V+i*Omega " << min_uncertainty_eigenvalue
        << ")";
    return out.str();
}

}  // namespace photonsub
