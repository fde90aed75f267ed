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

#include "photonsub/wigner.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "photonsub/errors.hpp"

namespace photonsub {

namespace {

Eigen::MatrixXcd displacement_closed_form(Complex beta, int cutoff) {
    const double x = std::norm(beta);
    const double log_abs = x > 0.0 ? 0.5 * std::log(x) : 0.0;
    const Complex unit = x > 0.0 ? beta / std::sqrt(x) : Complex(1.0, 0.0);
    Eigen::MatrixXcd out(cutoff, cutoff);
    for (int alpha = 0; alpha < cutoff; ++alpha) {
        // Generalized Laguerre polynomials L_lo^(alpha)(x), upward in lo.
        const Complex up = std::pow(unit, alpha);
        const Complex down = std::pow(-std::conj(unit), alpha);
        double prev = 0.0, cur = 1.0;
        for (int lo = 0; lo + alpha < cutoff; ++lo) {
            if (lo > 0) {
                const double next = ((2 * lo - 1 + alpha - x) * cur - (lo - 1 + alpha) * prev) / lo;
                prev = cur;
                cur = next;
            }
            const int hi = lo + alpha;
            double log_scale = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) - 0.5 * x;
            if (alpha > 0) {
                if (x == 0.0) {
                    out(hi, lo) = out(lo, hi) = 0.0;
                    continue;
                }
                log_scale += alpha * log_abs;
            }
            const double scale = std::exp(log_scale) * cur;
            out(hi, lo) = scale * up;
            if (alpha > 0) out(lo, hi) = scale * down;
        }
    }
    return out;
}

/// Displaced parity kernel: entry (n, m) is (-1)^m <n|D(2 alpha)|m> with alpha = (x + i p) / 2.
Eigen::MatrixXcd parity_kernel(double x, double p, int cutoff) {
    Eigen::MatrixXcd d = displacement_matrix(Complex(x, p), cutoff);
    for (int m = 1; m < cutoff; m += 2) d.col(m) *= -1.0;
    return d;
}

}  // namespace

Eigen::MatrixXcd displacement_matrix(Complex beta, int cutoff) {
    if (cutoff < 1) throw DimensionError("cutoff must be at least 1");
    return displacement_closed_form(beta, cutoff);
}

double WignerGrid::integral() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * x.step() * p.step();
}

double wigner_point(const FockDensity &rho, double x, double p) {
    if (rho.modes() != 1) throw DimensionError("wigner_point(x, p) needs a single-mode state");
    const int d = rho.space.dim();
    Eigen::MatrixXcd kernel = parity_kernel(x, p, d);
    return (rho.matrix.cwiseProduct(kernel.transpose())).sum().real() / (2.0 * std::numbers::pi);
}

double wigner_point(const FockDensity &rho, std::span<const double> x, std::span<const double> p) {
    const int m = rho.modes();
    if (static_cast<int>(x.size()) != m || static_cast<int>(p.size()) != m) {
        throw DimensionError("phase-space point needs one (x, p) pair per mode");
    }
    std::vector<Eigen::MatrixXcd> factors;
    for (int k = 0; k < m; ++k) factors.push_back(parity_kernel(x[k], p[k], rho.space.cutoffs()[k]));
    const int d = rho.space.dim();
    std::vector<std::vector<int>> occ(d);
    for (int i = 0; i < d; ++i) occ[i] = rho.space.occupation(i);
    Complex total = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Complex kernel = 1.0;
            for (int k = 0; k < m; ++k) kernel *= factors[k](occ[j][k], occ[i][k]);
            total += rho.matrix(i, j) * kernel;
        }
    }
    return total.real() / std::pow(2.0 * std::numbers::pi, m);
}

WignerGrid wigner_grid(const FockDensity &rho, const GridAxis &x, const GridAxis &p, bool check) {
    if (x.points < 2 || p.points < 2 || !(x.max > x.min) || !(p.max > p.min)) {
        throw DimensionError("Wigner grid needs at least two points per axis and increasing bounds");
    }
    WignerGrid grid{x, p, {}};
    grid.values.resize(static_cast<std::size_t>(x.points) * p.points);
    for (int i = 0; i < x.points; ++i) {
        for (int j = 0; j < p.points; ++j) {
            grid.values[static_cast<std::size_t>(i) * p.points + j] = wigner_point(rho, x.at(i), p.at(j));
        }
    }
    if (check) {
        double total = grid.integral();
        if (std::abs(total - 1.0) > 1e-3) {
            throw Error("Wigner grid integrates to " + std::to_string(total) +
                        "; the grid is too coarse or does not cover the state");
        }
    }
    return grid;
}

void write_wigner_csv(const WignerGrid &grid, std::ostream &out) {
    out << "x,p,W\n" << std::setprecision(17);
    for (int i = 0; i < grid.x.points; ++i) {
        for (int j = 0; j < grid.p.points; ++j) out << grid.x.at(i) << ',' << grid.p.at(j) << ',' << grid.at(i, j) << '\n';
    }
}

namespace {

nlohmann::ordered_json axis_json(const GridAxis &a) {
    return {{"min", a.min}, {"max", a.max}, {"points", a.points}};
}

GridAxis axis_from(const nlohmann::json &j) {
    return {j.at("min").get<double>(), j.at("max").get<double>(), j.at("points").get<int>()};
}

std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t out = 0;
        for (int b = 0; b < 8; ++b) out = (out << 8) | ((v >> (8 * b)) & 0xffu);
        return out;
    }
    return v;
}

}  // namespace

void write_wigner_binary(const WignerGrid &grid, const std::filesystem::path &header) {
    std::filesystem::path data = header;
    data.replace_extension(".bin");
    nlohmann::ordered_json h = {{"schema", "photonsub.wigner/1"},
                                {"x", axis_json(grid.x)},
                                {"p", axis_json(grid.p)},
                                {"layout", "row-major, x outer, p inner"},
                                {"dtype", "float64, little-endian"},
                                {"data", data.filename().string()}};
    std::ofstream hs(header);
    if (!hs) throw Error("cannot write " + header.string());
    hs << h.dump(2) << '\n';
    std::ofstream ds(data, std::ios::binary);
    if (!ds) throw Error("cannot write " + data.string());
    for (double v : grid.values) {
        std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
        ds.write(reinterpret_cast<const char *>(&bits), sizeof bits);
    }
}

WignerGrid read_wigner_binary(const std::filesystem::path &header) {
    std::ifstream hs(header);
    if (!hs) throw Error("cannot read " + header.string());
    nlohmann::json h = nlohmann::json::parse(hs);
    WignerGrid grid{axis_from(h.at("x")), axis_from(h.at("p")), {}};
    std::filesystem::path data = header.parent_path() / h.at("data").get<std::string>();
    std::ifstream ds(data, std::ios::binary);
    if (!ds) throw Error("cannot read " + data.string());
    grid.values.resize(static_cast<std::size_t>(grid.x.points) * grid.p.points);
    for (double &v : grid.values) {
        std::uint64_t bits = 0;
        if (!ds.read(reinterpret_cast<char *>(&bits), sizeof bits)) throw Error("truncated Wigner data file");
        v = std::bit_cast<double>(to_little(bits));
    }
    return grid;
}

}  // namespace photonsub
