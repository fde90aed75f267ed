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

#include "photonsub/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "photonsub/errors.hpp"
#include "photonsub/symplectic.hpp"

namespace photonsub {

namespace {

/// All occupations of `modes` modes with total photon number <= max_total. Passive transforms act
/// exactly inside this space because they conserve the total.
class NumberSpace {
   public:
    NumberSpace(int modes, int max_total) : modes_(modes), max_total_(max_total) {
        std::size_t table_size = 1;
        for (int k = 0; k < modes; ++k) table_size *= static_cast<std::size_t>(max_total + 1);
        table_.assign(table_size, -1);
        std::vector<int> occ(modes, 0);
        for (std::size_t key = 0; key < table_size; ++key) {
            std::size_t rest = key;
            int total = 0;
            for (int k = modes - 1; k >= 0; --k) {
                occ[k] = static_cast<int>(rest % (max_total + 1));
                rest /= max_total + 1;
                total += occ[k];
            }
            if (total > max_total) continue;
            table_[key] = size_;
            occupations_.insert(occupations_.end(), occ.begin(), occ.end());
            ++size_;
        }
    }

    int modes() const noexcept {
        return modes_;
    }
    int max_total() const noexcept {
        return max_total_;
    }
    int size() const noexcept {
        return size_;
    }
    const int *occupation(int i) const {
        return occupations_.data() + static_cast<std::size_t>(i) * modes_;
    }
    int index(const int *occ) const {
        std::size_t key = 0;
        int total = 0;
        for (int k = 0; k < modes_; ++k) {
            if (occ[k] < 0 || occ[k] > max_total_) return -1;
            key = key * (max_total_ + 1) + occ[k];
            total += occ[k];
        }
        return total > max_total_ ? -1 : table_[key];
    }

   private:
    int modes_;
    int max_total_;
    int size_ = 0;
    std::vector<int> table_;
    std::vector<int> occupations_;
};

/// Matrix elements <m|G|n> of the single-mode squeezer with G^dag a G = cosh(r) a + sinh(r) a^dag.
Eigen::MatrixXd squeezer_elements(double r, int max_n) {
    const int rows = 2 * max_n + 3;
    const double c = std::cosh(r), s = std::sinh(r);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, max_n + 1);
    out(0, 0) = 1.0 / std::sqrt(c);
    for (int m = 1; m + 1 < rows; m += 2) {
        out(m + 1, 0) = (s / c) * std::sqrt(static_cast<double>(m) / (m + 1)) * out(m - 1, 0);
    }
    for (int n = 0; n < max_n; ++n) {
        for (int m = 0; m + 1 < rows; ++m) {
            double lower = m > 0 ? c * std::sqrt(static_cast<double>(m)) * out(m - 1, n) : 0.0;
            out(m, n + 1) = (lower - s * std::sqrt(static_cast<double>(m + 1)) * out(m + 1, n)) / std::sqrt(n + 1.0);
        }
    }
    return out.topRows(max_n + 1);
}

/// Sector matrices of a two-mode passive transform: column j is the image of |j, s-j> expanded over
/// |i, s-i>, where the transform maps a_p^dag -> u(0,0) a_p^dag + u(1,0) a_q^dag and
/// a_q^dag -> u(0,1) a_p^dag + u(1,1) a_q^dag.
std::vector<Eigen::MatrixXcd> two_mode_sectors(const Eigen::Matrix2cd &u, int max_total) {
    std::vector<Eigen::MatrixXcd> sectors;
    sectors.reserve(max_total + 1);
    sectors.push_back(Eigen::MatrixXcd::Ones(1, 1));
    for (int s = 1; s <= max_total; ++s) {
        const Eigen::MatrixXcd &prev = sectors.back();
        Eigen::MatrixXcd cur = Eigen::MatrixXcd::Zero(s + 1, s + 1);
        for (int np = 0; np <= s; ++np) {
            const int nq = s - np;
            const int source = np > 0 ? np - 1 : 0;
            const int raise = np > 0 ? 0 : 1;
            const double norm = std::sqrt(static_cast<double>(np > 0 ? np : nq));
            for (int j = 0; j < s; ++j) {
                Complex v = prev(j, source);
                if (v == Complex(0.0)) continue;
                cur(j + 1, np) += u(0, raise) * std::sqrt(j + 1.0) * v / norm;
                cur(j, np) += u(1, raise) * std::sqrt(static_cast<double>(s - j)) * v / norm;
            }
        }
        sectors.push_back(std::move(cur));
    }
    return sectors;
}

void apply_two_mode(Eigen::MatrixXcd &kets, const NumberSpace &space, int p, int q, const Eigen::Matrix2cd &u) {
    auto sectors = two_mode_sectors(u, space.max_total());
    std::vector<int> occ(space.modes());
    std::vector<int> rows;
    for (int i = 0; i < space.size(); ++i) {
        const int *base = space.occupation(i);
        if (base[p] != 0) continue;
        const int s = base[q];
        if (s == 0) continue;
        std::copy(base, base + space.modes(), occ.begin());
        rows.resize(s + 1);
        for (int j = 0; j <= s; ++j) {
            occ[p] = j;
            occ[q] = s - j;
            rows[j] = space.index(occ.data());
        }
        Eigen::MatrixXcd block(s + 1, kets.cols());
        for (int j = 0; j <= s; ++j) block.row(j) = kets.row(rows[j]);
        block = sectors[s] * block;
        for (int j = 0; j <= s; ++j) kets.row(rows[j]) = block.row(j);
    }
}

/// Applies the Fock representation of the mode map a -> u a (in the Heisenberg picture) to each column.
void apply_passive(Eigen::MatrixXcd &kets, const NumberSpace &space, const Eigen::MatrixXcd &u) {
    const int n = static_cast<int>(u.rows());
    Eigen::MatrixXcd x = u;
    struct Rotation {
        int row;
        Eigen::Matrix2cd g;
    };
    std::vector<Rotation> rotations;
    for (int c = 0; c + 1 < n; ++c) {
        for (int r = n - 1; r > c; --r) {
            Complex a = x(r - 1, c), b = x(r, c);
            if (std::abs(b) < 1e-300) continue;
            double norm = std::hypot(std::abs(a), std::abs(b));
            Eigen::Matrix2cd g;
            g << std::conj(a) / norm, std::conj(b) / norm, -b / norm, a / norm;
            Eigen::MatrixXcd pair = x.middleRows(r - 1, 2);
            x.middleRows(r - 1, 2) = g * pair;
            rotations.push_back({r, g});
        }
    }
    // u = g_1^dag ... g_K^dag diag(x), so the diagonal acts first.
    for (int i = 0; i < space.size(); ++i) {
        const int *occ = space.occupation(i);
        Complex phase = 1.0;
        for (int k = 0; k < n; ++k) {
            if (occ[k] > 0) phase *= std::pow(x(k, k), occ[k]);
        }
        if (phase != Complex(1.0)) kets.row(i) *= phase;
    }
    for (auto it = rotations.rbegin(); it != rotations.rend(); ++it) {
        apply_two_mode(kets, space, it->row - 1, it->row, it->g.adjoint());
    }
}

void apply_squeezer(Eigen::MatrixXcd &kets, const NumberSpace &space, int mode, double r) {
    if (std::abs(r) < 1e-15) return;
    Eigen::MatrixXcd s = squeezer_elements(r, space.max_total()).cast<Complex>();
    std::vector<int> occ(space.modes());
    std::vector<int> rows;
    for (int i = 0; i < space.size(); ++i) {
        const int *base = space.occupation(i);
        if (base[mode] != 0) continue;
        int others = 0;
        for (int k = 0; k < space.modes(); ++k) others += base[k];
        const int budget = space.max_total() - others;
        std::copy(base, base + space.modes(), occ.begin());
        rows.resize(budget + 1);
        for (int j = 0; j <= budget; ++j) {
            occ[mode] = j;
            rows[j] = space.index(occ.data());
        }
        Eigen::MatrixXcd block(budget + 1, kets.cols());
        for (int j = 0; j <= budget; ++j) block.row(j) = kets.row(rows[j]);
        block = s.topLeftCorner(budget + 1, budget + 1) * block;
        for (int j = 0; j <= budget; ++j) kets.row(rows[j]) = block.row(j);
    }
}

/// Indices in `space` of every box state, in box order.
std::vector<int> box_rows(const NumberSpace &space, const FockSpace &box) {
    std::vector<int> rows(box.dim());
    for (int b = 0; b < box.dim(); ++b) rows[b] = space.index(box.occupation(b).data());
    return rows;
}

int box_total(const FockSpace &box) {
    int total = 0;
    for (int d : box.cutoffs()) total += d - 1;
    return box.max_total() >= 0 ? std::min(total, box.max_total()) : total;
}

void require_single_mode(const FockDensity &rho, const char *what) {
    if (rho.modes() != 1) {
        throw DimensionError(std::string(what) + " needs a single-mode state, got " + std::to_string(rho.modes()) +
                             " modes");
    }
}

void require_same_space(const FockDensity &a, const FockDensity &b) {
    if (!(a.space == b.space)) throw DimensionError("states live in different Fock spaces");
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd &m) {
    return 0.5 * (m + m.adjoint());
}

}  // namespace

FockSpace::FockSpace(std::vector<int> cutoffs, int max_total) : cutoffs_(std::move(cutoffs)) {
    if (cutoffs_.empty()) throw DimensionError("Fock space needs at least one mode");
    strides_.assign(cutoffs_.size(), 1);
    long long dim = 1;
    int box_total = 0;
    for (int k = static_cast<int>(cutoffs_.size()) - 1; k >= 0; --k) {
        if (cutoffs_[k] < 1) throw DimensionError("cutoff must be at least 1");
        strides_[k] = static_cast<int>(dim);
        dim *= cutoffs_[k];
        box_total += cutoffs_[k] - 1;
        if (dim > (1LL << 22)) throw DimensionError("Fock space dimension " + std::to_string(dim) + " is too large");
    }
    dim_ = static_cast<int>(dim);
    if (max_total < 0 || max_total >= box_total) return;

    max_total_ = max_total;
    from_box_.assign(dim_, -1);
    for (int b = 0; b < dim_; ++b) {
        int rest = b, total = 0;
        for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
            total += rest / strides_[k];
            rest %= strides_[k];
        }
        if (total > max_total_) continue;
        from_box_[b] = static_cast<int>(to_box_.size());
        to_box_.push_back(b);
    }
    dim_ = static_cast<int>(to_box_.size());
    if (dim_ > (1 << 14)) throw DimensionError("Fock space dimension " + std::to_string(dim_) + " is too large");
}

FockSpace FockSpace::capped(int modes, int max_total) {
    if (modes < 1 || max_total < 0) throw DimensionError("capped space needs modes >= 1 and a nonnegative cap");
    return FockSpace(std::vector<int>(modes, max_total + 1), max_total);
}

int FockSpace::index(std::span<const int> occupation) const {
    if (occupation.size() != cutoffs_.size()) throw DimensionError("occupation has the wrong number of modes");
    int idx = 0;
    for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
        if (occupation[k] < 0 || occupation[k] >= cutoffs_[k]) return -1;
        idx += occupation[k] * strides_[k];
    }
    return max_total_ < 0 ? idx : from_box_[idx];
}

std::vector<int> FockSpace::occupation(int index) const {
    if (max_total_ >= 0) index = to_box_[index];
    std::vector<int> occ(cutoffs_.size());
    for (std::size_t k = 0; k < cutoffs_.size(); ++k) {
        occ[k] = index / strides_[k];
        index %= strides_[k];
    }
    return occ;
}

int default_max_photons(int modes) {
    switch (modes) {
        case 1: return 29;
        case 2: return 26;
        case 3: return 18;
        case 4: return 12;
        default: throw DimensionError("the Fock oracle supports 1 to 4 modes, got " + std::to_string(modes));
    }
}

int default_cutoff(int modes) {
    switch (modes) {
        case 1: return 30;
        case 2: return 14;
        case 3: return 8;
        case 4: return 6;
        default: throw DimensionError("the Fock oracle supports 1 to 4 modes, got " + std::to_string(modes));
    }
}

FockDensity fock_from_matrix(std::vector<int> cutoffs, Eigen::MatrixXcd matrix) {
    FockSpace space(std::move(cutoffs));
    if (matrix.rows() != space.dim() || matrix.cols() != space.dim()) {
        throw DimensionError("density matrix is " + std::to_string(matrix.rows()) + "x" +
                             std::to_string(matrix.cols()) + ", space has dimension " + std::to_string(space.dim()));
    }
    return FockDensity{space, std::move(matrix), 0.0};
}

FockDensity with_cutoff(const FockDensity &rho, int cutoff) {
    require_single_mode(rho, "with_cutoff");
    const int d = rho.space.dim();
    if (cutoff == d) return rho;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    const int keep = std::min(cutoff, d);
    m.topLeftCorner(keep, keep) = rho.matrix.topLeftCorner(keep, keep);
    double trace = m.trace().real();
    if (!(trace > 0.0)) throw TruncationError("no weight left below the new cutoff");
    return FockDensity{FockSpace({cutoff}), m / trace, rho.leak + (1.0 - trace)};
}

FockDensity number_state(std::span<const int> occupation, std::vector<int> cutoffs) {
    FockSpace space(std::move(cutoffs));
    int idx = space.index(occupation);
    if (idx < 0) throw DimensionError("number state lies outside the cutoffs");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
    m(idx, idx) = 1.0;
    return FockDensity{space, m, 0.0};
}

FockDensity thermal_state(double mean_photons, int cutoff) {
    if (!(mean_photons >= 0.0)) throw UnphysicalError("mean photon number must be nonnegative");
    FockSpace space({cutoff});
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cutoff, cutoff);
    double ratio = mean_photons / (mean_photons + 1.0);
    double p = 1.0 / (mean_photons + 1.0);
    double total = 0.0;
    for (int n = 0; n < cutoff; ++n, p *= ratio) {
        m(n, n) = p;
        total += p;
    }
    m /= total;
    return FockDensity{space, m, 1.0 - total};
}

Eigen::VectorXcd squeezed_number_ket(double r, int photons, int cutoff) {
    if (photons < 0 || photons >= cutoff) throw DimensionError("photon number outside the cutoff");
    Eigen::MatrixXd s = squeezer_elements(r, std::max(cutoff - 1, photons));
    return s.col(photons).head(cutoff).cast<Complex>();
}

FockDensity gaussian_to_fock(const CovarianceMatrix &v, int cutoff, double leak_bound) {
    const int d = cutoff > 0 ? cutoff : default_cutoff(v.modes());
    return gaussian_to_fock(v, std::vector<int>(v.modes(), d), leak_bound);
}

FockDensity gaussian_to_fock(const CovarianceMatrix &v, std::vector<int> cutoffs, double leak_bound) {
    if (static_cast<int>(cutoffs.size()) != v.modes()) throw DimensionError("one cutoff per mode is required");
    return gaussian_to_fock(v, FockSpace(std::move(cutoffs)), leak_bound);
}

FockDensity gaussian_to_fock(const CovarianceMatrix &v, const FockSpace &box, double leak_bound) {
    const int m = v.modes();
    if (m > 4) throw DimensionError("the Fock oracle supports at most 4 modes, got " + std::to_string(m));
    if (box.modes() != m) throw DimensionError("Fock space and covariance disagree on the mode count");
    const int max_total = box_total(box);
    NumberSpace space(m, max_total);
    const std::vector<int> rows = box_rows(space, box);

    WilliamsonDecomposition w = williamson(v.matrix());
    BlochMessiahDecomposition bm = bloch_messiah(w.symplectic);

    // Thermal occupations feeding the Gaussian circuit, dropping terms too small to matter.
    std::vector<double> ratio(m), ground(m);
    for (int k = 0; k < m; ++k) {
        double nbar = std::max(0.0, 0.5 * (w.nu[k] - 1.0));
        ratio[k] = nbar / (nbar + 1.0);
        ground[k] = 1.0 / (nbar + 1.0);
    }
    std::vector<std::pair<int, double>> thermal;
    for (int i = 0; i < space.size(); ++i) {
        const int *occ = space.occupation(i);
        double p = 1.0;
        for (int k = 0; k < m; ++k) p *= ground[k] * std::pow(ratio[k], occ[k]);
        if (p >= 1e-13) thermal.emplace_back(i, p);
    }

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(box.dim(), box.dim());
    constexpr int kBatch = 32;
    for (std::size_t start = 0; start < thermal.size(); start += kBatch) {
        const int count = static_cast<int>(std::min<std::size_t>(kBatch, thermal.size() - start));
        Eigen::MatrixXcd kets = Eigen::MatrixXcd::Zero(space.size(), count);
        for (int c = 0; c < count; ++c) kets(thermal[start + c].first, c) = std::sqrt(thermal[start + c].second);
        apply_passive(kets, space, bm.second);
        for (int k = 0; k < m; ++k) apply_squeezer(kets, space, k, bm.squeeze[k]);
        apply_passive(kets, space, bm.first);
        Eigen::MatrixXcd boxed(box.dim(), count);
        for (int b = 0; b < box.dim(); ++b) boxed.row(b) = kets.row(rows[b]);
        rho.noalias() += boxed * boxed.adjoint();
    }

    double trace = rho.trace().real();
    double leak = 1.0 - trace;
    if (leak > leak_bound) {
        throw TruncationError("truncation leak " + std::to_string(leak) + " exceeds bound " +
                              std::to_string(leak_bound) + "; raise the cutoff");
    }
    return FockDensity{box, hermitian_part(rho) / trace, std::max(0.0, leak)};
}

ChannelOutput apply_channel(const FockDensity &rho, const std::vector<ChannelTerm> &terms) {
    const FockSpace &space = rho.space;
    const int dim = space.dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    double passthrough = 0.0;
    for (const auto &t : terms) {
        if (t.kind == TermKind::passthrough) {
            out += t.weight * rho.matrix;
            passthrough += t.weight;
            continue;
        }
        if (t.coefficients.size() != rho.modes()) {
            throw DimensionError("channel term has " + std::to_string(t.coefficients.size()) + " modes, state has " +
                                 std::to_string(rho.modes()));
        }
        std::vector<Eigen::Triplet<Complex>> entries;
        for (int i = 0; i < dim; ++i) {
            std::vector<int> occ = space.occupation(i);
            for (int k = 0; k < rho.modes(); ++k) {
                if (occ[k] == 0 || t.coefficients(k) == Complex(0.0)) continue;
                --occ[k];
                entries.emplace_back(space.index(occ), i, t.coefficients(k) * std::sqrt(occ[k] + 1.0));
                ++occ[k];
            }
        }
        Eigen::SparseMatrix<Complex> lower(dim, dim);
        lower.setFromTriplets(entries.begin(), entries.end());
        Eigen::MatrixXcd half = lower * rho.matrix;
        out += t.weight * (half * Eigen::SparseMatrix<Complex>(lower.adjoint()));
    }
    double norm = out.trace().real();
    if (!(norm >= 1e-14)) {
        throw HeraldingError("heralding probability " + std::to_string(norm) +
                             " vanishes; the state cannot be photon-subtracted");
    }
    ChannelOutput result{FockDensity{space, hermitian_part(out) / norm, rho.leak}, norm - passthrough, norm};
    return result;
}

ChannelOutput apply_channel(const FockDensity &rho, const SubtractionSpec &spec) {
    return apply_channel(rho, channel_terms(spec, rho.modes()));
}

FockDensity transform_modes(const FockDensity &rho, const Eigen::MatrixXcd &w) {
    if (w.rows() != rho.modes() || w.cols() != rho.modes()) {
        throw DimensionError("mode transform does not match the state's mode count");
    }
    if (unitarity_deviation(w) > 1e-8) throw UnphysicalError("mode transform is not unitary");
    NumberSpace space(rho.modes(), box_total(rho.space));
    const std::vector<int> rows = box_rows(space, rho.space);
    auto act = [&](const Eigen::MatrixXcd &columns) {
        Eigen::MatrixXcd kets = Eigen::MatrixXcd::Zero(space.size(), columns.cols());
        for (int b = 0; b < rho.space.dim(); ++b) kets.row(rows[b]) = columns.row(b);
        apply_passive(kets, space, w);
        Eigen::MatrixXcd boxed(rho.space.dim(), columns.cols());
        for (int b = 0; b < rho.space.dim(); ++b) boxed.row(b) = kets.row(rows[b]);
        return boxed;
    };
    Eigen::MatrixXcd half = act(rho.matrix);
    Eigen::MatrixXcd out = act(half.adjoint());
    double trace = out.trace().real();
    return FockDensity{rho.space, hermitian_part(out) / trace, rho.leak + (1.0 - trace)};
}

FockDensity partial_trace(const FockDensity &rho, std::span<const int> keep) {
    if (keep.empty()) throw DimensionError("partial trace needs at least one kept mode");
    std::vector<int> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) throw DimensionError("kept modes repeat");
    if (kept.front() < 0 || kept.back() >= rho.modes()) throw DimensionError("kept mode out of range");
    if (static_cast<int>(kept.size()) == rho.modes()) return rho;

    std::vector<int> kept_cutoffs, traced_cutoffs, traced;
    for (int k = 0; k < rho.modes(); ++k) {
        if (std::binary_search(kept.begin(), kept.end(), k)) {
            kept_cutoffs.push_back(rho.space.cutoffs()[k]);
        } else {
            traced.push_back(k);
            traced_cutoffs.push_back(rho.space.cutoffs()[k]);
        }
    }
    FockSpace out_space(kept_cutoffs, rho.space.max_total()), traced_space(traced_cutoffs, rho.space.max_total());
    std::vector<std::vector<std::pair<int, int>>> groups(traced_space.dim());
    std::vector<int> a(kept.size()), t(traced.size());
    for (int i = 0; i < rho.space.dim(); ++i) {
        std::vector<int> occ = rho.space.occupation(i);
        for (std::size_t k = 0; k < kept.size(); ++k) a[k] = occ[kept[k]];
        for (std::size_t k = 0; k < traced.size(); ++k) t[k] = occ[traced[k]];
        groups[traced_space.index(t)].emplace_back(i, out_space.index(a));
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_space.dim(), out_space.dim());
    for (const auto &g : groups) {
        for (const auto &[i, ai] : g) {
            for (const auto &[j, aj] : g) out(ai, aj) += rho.matrix(i, j);
        }
    }
    return FockDensity{out_space, out, rho.leak};
}

FockDensity reduce_to_mode(const FockDensity &rho, const CoefficientVector &u) {
    if (u.size() != rho.modes()) {
        throw DimensionError("measured mode has " + std::to_string(u.size()) + " entries, state has " +
                             std::to_string(rho.modes()));
    }
    int k = u.unit_index();
    if (k >= 0 && std::abs(u[k] - Complex(1.0)) < 1e-12) {
        const int keep[] = {k};
        return partial_trace(rho, keep);
    }
    FockDensity moved = transform_modes(rho, complete_to_unitary(u.entries()));
    const int keep[] = {0};
    return partial_trace(moved, keep);
}

double purity(const FockDensity &rho) {
    return rho.matrix.squaredNorm();
}

double min_eigenvalue(const FockDensity &rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(rho.matrix), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double fidelity(const FockDensity &a, const FockDensity &b) {
    require_same_space(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(a.matrix));
    if (es.eigenvalues()(0) < -1e-8) throw UnphysicalError("fidelity: first state is not positive semidefinite");
    Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXcd sqrt_a = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> inner(hermitian_part(sqrt_a * b.matrix * sqrt_a),
                                                          Eigen::EigenvaluesOnly);
    if (inner.eigenvalues()(0) < -1e-8) throw UnphysicalError("fidelity: second state is not positive semidefinite");
    double sum = inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return sum * sum;
}

double overlap_fidelity(const FockDensity &a, const FockDensity &b) {
    require_same_space(a, b);
    return (a.matrix * b.matrix).trace().real();
}

double trace_distance(const FockDensity &a, const FockDensity &b) {
    require_same_space(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(a.matrix - b.matrix), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double parity_w0(const FockDensity &rho) {
    require_single_mode(rho, "parity_w0");
    double total = 0.0;
    for (int n = 0; n < rho.space.dim(); ++n) total += (n % 2 == 0 ? 1.0 : -1.0) * rho.matrix(n, n).real();
    return total;
}

Complex fock_moment(const FockDensity &rho, const OperatorWord &word) {
    for (const auto &op : word) {
        if (op.mode < 0 || op.mode >= rho.modes()) throw DimensionError("operator mode out of range");
    }
    Complex total = 0.0;
    for (int i = 0; i < rho.space.dim(); ++i) {
        std::vector<int> occ = rho.space.occupation(i);
        double coef = 1.0;
        for (auto it = word.rbegin(); it != word.rend() && coef != 0.0; ++it) {
            int &n = occ[it->mode];
            if (it->dagger) {
                coef *= std::sqrt(n + 1.0);
                ++n;
            } else {
                coef *= std::sqrt(static_cast<double>(n));
                --n;
            }
        }
        if (coef == 0.0) continue;
        int j = rho.space.index(occ);
        if (j >= 0) total += coef * rho.matrix(i, j);
    }
    return total;
}

std::vector<double> photon_distribution(const FockDensity &rho) {
    require_single_mode(rho, "photon_distribution");
    std::vector<double> p(rho.space.dim());
    for (int n = 0; n < rho.space.dim(); ++n) p[n] = rho.matrix(n, n).real();
    return p;
}

PhaseAveragedMoments fock_phase_moments(const FockDensity &single_mode) {
    auto p = photon_distribution(single_mode);
    PhaseAveragedMoments out{0.0, 0.0};
    for (std::size_t n = 0; n < p.size(); ++n) {
        double k = static_cast<double>(n);
        out.m2 += p[n] * (2.0 * k + 1.0);
        out.m4 += p[n] * (6.0 * k * k + 6.0 * k + 3.0);
    }
    return out;
}

}  // namespace photonsub
