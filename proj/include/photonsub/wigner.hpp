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

#ifndef PHOTONSUB_WIGNER_HPP
#define PHOTONSUB_WIGNER_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "photonsub/fock.hpp"

namespace photonsub {

struct GridAxis {
    double min = -5.0;
    double max = 5.0;
    int points = 101;

    double step() const {
        return points > 1 ? (max - min) / (points - 1) : 0.0;
    }
    double at(int i) const {
        return min + i * step();
    }
};

/// Samples of W(x, p); values are stored with x as the outer (row) index.
struct WignerGrid {
    GridAxis x;
    GridAxis p;
    std::vector<double> values;

    double at(int ix, int ip) const {
        return values[static_cast<std::size_t>(ix) * p.points + ip];
    }
    /// Riemann sum over the grid.
    double integral() const;
};

/// <n|D(beta)|m> for n, m < cutoff.
Eigen::MatrixXcd displacement_matrix(Complex beta, int cutoff);

double wigner_point(const FockDensity &rho, double x, double p);
/// Joint Wigner function of a multimode state at one phase-space point.
double wigner_point(const FockDensity &rho, std::span<const double> x, std::span<const double> p);

/// Throws Error when `check` is set and the grid integral misses 1 by more than 1e-3.
WignerGrid wigner_grid(const FockDensity &rho, const GridAxis &x, const GridAxis &p, bool check = true);

void write_wigner_csv(const WignerGrid &grid, std::ostream &out);
/// JSON header at `header` and raw little-endian doubles next to it (same stem, .bin).
void write_wigner_binary(const WignerGrid &grid, const std::filesystem::path &header);
WignerGrid read_wigner_binary(const std::filesystem::path &header);

}  // namespace photonsub

#endif
