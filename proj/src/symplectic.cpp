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

#include "photonsub/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "photonsub/errors.hpp"
#include "photonsub/gaussian.hpp"

namespace photonsub {

WilliamsonDecomposition williamson(const Eigen::MatrixXd &v) {
    if (v.rows() == 0 || v.rows() != v.cols() || v.rows() % 2 != 0) {
        throw DimensionError("williamson: matrix must be 2N x 2N");
    }
    const int n = static_cast<int>(v.rows() / 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (v + v.transpose()));
    if (es.eigenvalues()(0) <= 0.0) throw UnphysicalError("williamson: matrix is not positive definite");
    const Eigen::MatrixXd &q = es.eigenvectors();
    Eigen::MatrixXd root = q * es.eigenvalues().cwiseSqrt().asDiagonal() * q.transpose();
    Eigen::MatrixXd inv_root = q * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();

    Eigen::MatrixXd a = inv_root * symplectic_form(n) * inv_root;
    a = 0.5 * (a - a.transpose()).eval();
    Eigen::RealSchur<Eigen::MatrixXd> schur(a);
    Eigen::MatrixXd k = schur.matrixU();
    const Eigen::MatrixXd &t = schur.matrixT();

    WilliamsonDecomposition out;
    Eigen::VectorXd scale(2 * n);
    for (int j = 0; j < n; ++j) {
        double upper = t(2 * j, 2 * j + 1);
        double lower = t(2 * j + 1, 2 * j);
        double rate = 0.5 * (upper - lower);
        if (rate < 0.0) {
            k.col(2 * j).swap(k.col(2 * j + 1));
            rate = -rate;
        }
        if (!(rate > 0.0)) throw UnphysicalError("williamson: degenerate symplectic spectrum");
        double nu = 1.0 / rate;
        out.nu.push_back(nu);
        scale(2 * j) = scale(2 * j + 1) = 1.0 / std::sqrt(nu);
    }
    out.symplectic = root * k * scale.asDiagonal();
    return out;
}

Eigen::MatrixXcd passive_unitary(const Eigen::MatrixXd &o) {
    const int n = static_cast<int>(o.rows() / 2);
    Eigen::MatrixXcd u(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) u(j, k) = Complex(o(2 * j, 2 * k), o(2 * j + 1, 2 * k));
    }
    return u;
}

Eigen::MatrixXd squeezer_symplectic(const std::vector<double> &r) {
    const int n = static_cast<int>(r.size());
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int k = 0; k < n; ++k) {
        z(2 * k, 2 * k) = std::exp(r[k]);
        z(2 * k + 1, 2 * k + 1) = std::exp(-r[k]);
    }
    return z;
}

BlochMessiahDecomposition bloch_messiah(const Eigen::MatrixXd &s) {
    if (s.rows() == 0 || s.rows() != s.cols() || s.rows() % 2 != 0) {
        throw DimensionError("bloch_messiah: matrix must be 2N x 2N");
    }
    const int n = static_cast<int>(s.rows() / 2);
    const Eigen::MatrixXd omega = symplectic_form(n);
    Eigen::MatrixXd gram = s.transpose() * s;
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);

    // Pick N stretched directions, largest first; the Omega partner of each is the matching
    // compressed direction. Symplectic Gram-Schmidt sorts out the unsqueezed subspace.
    std::vector<Eigen::VectorXd> stretched, partner;
    for (int idx = 2 * n - 1; idx >= 0 && static_cast<int>(stretched.size()) < n; --idx) {
        Eigen::VectorXd w = es.eigenvectors().col(idx);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < stretched.size(); ++j) {
                w -= stretched[j].dot(w) * stretched[j];
                w -= partner[j].dot(w) * partner[j];
            }
        }
        double norm = w.norm();
        if (norm < 1e-6) continue;
        w /= norm;
        stretched.push_back(w);
        partner.push_back(omega.transpose() * w);
    }
    if (static_cast<int>(stretched.size()) != n) {
        throw UnphysicalError("bloch_messiah: input is not symplectic");
    }

    Eigen::MatrixXd o2(2 * n, 2 * n);
    std::vector<double> r(n);
    for (int j = 0; j < n; ++j) {
        o2.row(2 * j) = stretched[j].transpose();
        o2.row(2 * j + 1) = partner[j].transpose();
        double stretch = stretched[j].dot(gram * stretched[j]);
        r[j] = 0.5 * std::log(std::max(stretch, 1e-300));
    }
    Eigen::VectorXd inv_z(2 * n);
    for (int j = 0; j < n; ++j) {
        inv_z(2 * j) = std::exp(-r[j]);
        inv_z(2 * j + 1) = std::exp(r[j]);
    }
    Eigen::MatrixXd o1 = s * o2.transpose() * inv_z.asDiagonal();

    BlochMessiahDecomposition out;
    out.first = passive_unitary(o1);
    out.second = passive_unitary(o2);
    out.squeeze = r;
    return out;
}

}  // namespace photonsub
