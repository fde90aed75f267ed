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

#include "photonsub/mode_basis.hpp"

#include <cmath>
#include <numbers>

#include "photonsub/errors.hpp"

namespace photonsub {

namespace {

constexpr Complex I{0.0, 1.0};

Eigen::MatrixXcd linear_cluster_printed() {
    Eigen::MatrixXcd u(4, 4);
    u << -0.344 * I, -0.421 * I, 0.531 * I, 0.650 * I,
         0.344, -0.765, -0.531, 0.119,
         -0.765 * I, -0.344 * I, -0.119 * I, -0.531 * I,
         0.421, -0.344, 0.650, -0.531;
    return u;
}

Eigen::MatrixXcd square_cluster_printed() {
    Eigen::MatrixXcd u(4, 4);
    u << -0.316, 0.632, 0.707, 0.000,
         0.632 * I, 0.316 * I, 0.000, -0.707 * I,
         -0.316, 0.632, -0.707, 0.000,
         0.632 * I, 0.316 * I, 0.000, 0.707 * I;
    return u;
}

}  // namespace

BasisName parse_basis_name(std::string_view name) {
    if (name == "HG") return BasisName::HG;
    if (name == "EPR") return BasisName::EPR;
    if (name == "LC") return BasisName::LC;
    if (name == "SC") return BasisName::SC;
    throw Error("unknown basis name '" + std::string(name) + "' (expected HG, EPR, LC or SC)");
}

std::string_view to_string(BasisName name) {
    switch (name) {
        case BasisName::HG:
            return "HG";
        case BasisName::EPR:
            return "EPR";
        case BasisName::LC:
            return "LC";
        case BasisName::SC:
            return "SC";
    }
    return "?";
}

Complex internal_phase(int k) {
    return (k % 2 == 0) ? Complex{1.0, 0.0} : I;
}

CoefficientVector::CoefficientVector(Eigen::VectorXcd entries) : entries_(std::move(entries)) {
    double norm = entries_.norm();
    if (entries_.size() == 0 || !(norm > 0.0) || !std::isfinite(norm)) {
        throw UnphysicalError("coefficient vector must be nonzero and finite");
    }
    entries_ /= norm;
}

CoefficientVector CoefficientVector::unit(int size, int k) {
    if (k < 0 || k >= size) {
        throw DimensionError("unit vector index " + std::to_string(k) + " out of range for size " +
                             std::to_string(size));
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
    v(k) = 1.0;
    return CoefficientVector(v);
}

int CoefficientVector::unit_index(double tol) const {
    int found = -1;
    for (int k = 0; k < size(); ++k) {
        if (std::abs(entries_(k)) > tol) {
            if (found >= 0) return -1;
            found = k;
        }
    }
    return found;
}

Eigen::MatrixXcd ModeTransform::internal_matrix() const {
    Eigen::MatrixXcd w = matrix;
    if (reference == ModeReference::hermite_gauss) {
        for (int k = 0; k < w.cols(); ++k) {
            w.col(k) *= std::conj(internal_phase(k));
        }
    }
    if (lo_phase != 0.0) {
        w *= std::exp(I * lo_phase);
    }
    return w;
}

ModeTransform ModeTransform::embedded(int n) const {
    if (n < dim()) {
        throw DimensionError("cannot embed a " + std::to_string(dim()) + "-mode basis into " + std::to_string(n) +
                             " modes");
    }
    if (n == dim()) return *this;
    ModeTransform out = *this;
    out.matrix = Eigen::MatrixXcd::Identity(n, n);
    out.matrix.topLeftCorner(dim(), dim()) = matrix;
    // The identity tail keeps the reference but must not pick up the LO phase.
    if (lo_phase != 0.0) {
        out.matrix.bottomRightCorner(n - dim(), n - dim()) *= std::exp(-I * lo_phase);
    }
    return out;
}

double unitarity_deviation(const Eigen::MatrixXcd &u) {
    if (u.rows() != u.cols()) return INFINITY;
    Eigen::MatrixXcd d = u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd polar_unitary(const Eigen::MatrixXcd &m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

ModeTransform make_mode_transform(Eigen::MatrixXcd matrix, std::string label, ModeReference reference,
                                  double lo_phase) {
    if (matrix.rows() < 1 || matrix.rows() != matrix.cols()) {
        throw DimensionError("mode transform must be a non-empty square matrix");
    }
    if (!matrix.allFinite()) {
        throw UnphysicalError("mode transform '" + label + "' has non-finite entries");
    }
    ModeTransform t;
    t.label = std::move(label);
    t.reference = reference;
    t.lo_phase = lo_phase;
    if (unitarity_deviation(matrix) > 1e-12) {
        Eigen::MatrixXcd u = polar_unitary(matrix);
        t.cleanup_deviation = (u - matrix).cwiseAbs().maxCoeff();
        // A rounded unitary sits within a few 1e-3; anything larger is not a unitary at all.
        if (t.cleanup_deviation > 0.05) {
            throw UnphysicalError("mode transform '" + t.label + "' is not unitary (polar cleanup moved an entry by " +
                                  std::to_string(t.cleanup_deviation) + ")");
        }
        t.matrix = std::move(u);
    } else {
        t.matrix = std::move(matrix);
    }
    return t;
}

ModeTransform builtin_basis(BasisName name, int n) {
    switch (name) {
        case BasisName::HG:
            if (n < 1) break;
            return make_mode_transform(Eigen::MatrixXcd::Identity(n, n), "HG");
        case BasisName::EPR: {
            if (n != 2) break;
            Eigen::MatrixXcd u(2, 2);
            double s = std::numbers::sqrt2 / 2.0;
            u << s, s, s, -s;
            return make_mode_transform(u, "EPR");
        }
        case BasisName::LC:
            if (n != 4) break;
            return make_mode_transform(linear_cluster_printed(), "LC", ModeReference::hermite_gauss,
                                       -std::numbers::pi / 2.0);
        case BasisName::SC:
            if (n != 4) break;
            return make_mode_transform(square_cluster_printed(), "SC", ModeReference::hermite_gauss,
                                       -std::numbers::pi / 2.0);
    }
    throw DimensionError("basis " + std::string(to_string(name)) + " is not defined for " + std::to_string(n) +
                         " modes (EPR needs 2, LC and SC need 4)");
}

CoefficientVector superpose(const ModeTransform &basis, const CoefficientVector &weights) {
    if (weights.size() != basis.dim()) {
        throw DimensionError("superpose: " + std::to_string(weights.size()) + " weights for a " +
                             std::to_string(basis.dim()) + "-mode basis");
    }
    return CoefficientVector(basis.matrix.transpose() * weights.entries());
}

CoefficientVector gate_mode(const CoefficientVector &c) {
    Eigen::VectorXcd v = c.entries();
    for (int k = 1; k < v.size(); k += 2) v(k) = -v(k);
    return CoefficientVector(v);
}

Eigen::VectorXcd hg_to_internal(const Eigen::VectorXcd &v) {
    Eigen::VectorXcd out = v;
    for (int k = 0; k < out.size(); ++k) out(k) *= std::conj(internal_phase(k));
    return out;
}

Eigen::MatrixXcd complete_to_unitary(const Eigen::VectorXcd &first_row) {
    const int n = static_cast<int>(first_row.size());
    double norm = first_row.norm();
    if (n == 0 || !(norm > 0.0)) throw UnphysicalError("cannot complete a zero vector to a unitary");
    // Rows are orthonormal vectors; work with conjugates so that row-orthogonality
    // is the usual inner product.
    std::vector<Eigen::VectorXcd> rows;
    rows.push_back(first_row / norm);
    for (int k = 0; k < n && static_cast<int>(rows.size()) < n; ++k) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Unit(n, k);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &r : rows) v -= r * r.dot(v);
        }
        double vn = v.norm();
        if (vn > 1e-8) rows.push_back(v / vn);
    }
    Eigen::MatrixXcd u(n, n);
    for (int j = 0; j < n; ++j) u.row(j) = rows[j].transpose();
    return u;
}

}  // namespace photonsub
