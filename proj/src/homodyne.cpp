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

#include "photonsub/homodyne.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "photonsub/errors.hpp"

namespace photonsub {

PhaseSchedule PhaseSchedule::fixed(std::vector<double> phases) {
    if (phases.empty()) throw DimensionError("a fixed phase schedule needs at least one phase");
    return {Kind::fixed, std::move(phases)};
}

Eigen::VectorXd oscillator_functions(double x, int count) {
    Eigen::VectorXd psi(count);
    if (count == 0) return psi;
    psi(0) = std::pow(2.0 * std::numbers::pi, -0.25) * std::exp(-0.25 * x * x);
    if (count > 1) psi(1) = x * psi(0);
    for (int n = 1; n + 1 < count; ++n) {
        psi(n + 1) = (x * psi(n) - std::sqrt(static_cast<double>(n)) * psi(n - 1)) / std::sqrt(n + 1.0);
    }
    return psi;
}

double quadrature_density(const FockDensity &rho, double theta, double x) {
    if (rho.modes() != 1) throw DimensionError("quadrature density needs a single-mode state");
    const int d = rho.space.dim();
    Eigen::VectorXd psi = oscillator_functions(x, d);
    Complex total = 0.0;
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) total += rho.matrix(m, n) * psi(m) * psi(n) * std::polar(1.0, (n - m) * theta);
    }
    return total.real();
}

QuadratureCurve quadrature_pdf(const FockDensity &rho, double theta, double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw DimensionError("quadrature grid needs two or more points on a positive range");
    QuadratureCurve curve;
    curve.x.resize(points);
    curve.density.resize(points);
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        curve.x[i] = lo + i * step;
        curve.density[i] = quadrature_density(rho, theta, curve.x[i]);
    }
    for (int i = 0; i + 1 < points; ++i) curve.mass += 0.5 * step * (curve.density[i] + curve.density[i + 1]);
    if (std::abs(1.0 - curve.mass) > 1e-4) {
        throw Error("quadrature grid [" + std::to_string(lo) + ", " + std::to_string(hi) + "] holds probability " +
                    std::to_string(curve.mass) + "; widen the range");
    }
    return curve;
}

FockDensity apply_fock_loss(const FockDensity &rho, double eta) {
    if (rho.modes() != 1) throw DimensionError("loss map needs a single-mode state");
    if (!(eta > 0.0 && eta <= 1.0)) throw UnphysicalError("efficiency must lie in (0, 1]");
    if (eta == 1.0) return rho;
    const int d = rho.space.dim();
    auto log_binom = [](int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); };
    const double log_eta = std::log(eta), log_loss = std::log1p(-eta);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            Complex sum = 0.0;
            for (int k = 0; m + k < d && n + k < d; ++k) {
                double log_w = 0.5 * (log_binom(m + k, k) + log_binom(n + k, k)) + 0.5 * (m + n) * log_eta +
                               (k > 0 ? k * log_loss : 0.0);
                sum += std::exp(log_w) * rho.matrix(m + k, n + k);
            }
            out(m, n) = sum;
        }
    }
    return FockDensity{rho.space, out, rho.leak};
}

QuadratureSampler::QuadratureSampler(const FockDensity &rho, int points, double span_sigmas)
    : cutoff_(rho.space.dim()), points_(points) {
    if (rho.modes() != 1) throw DimensionError("sampler needs a single-mode state");
    if (points < 2) throw DimensionError("sampler grid needs at least two points");
    double mean_n = 0.0;
    Complex pair = 0.0;
    for (int n = 0; n < cutoff_; ++n) {
        mean_n += n * rho.matrix(n, n).real();
        if (n >= 2) pair += std::sqrt(n * (n - 1.0)) * rho.matrix(n, n - 2);
    }
    const double sigma = std::sqrt(2.0 * mean_n + 1.0 + 2.0 * std::abs(pair));
    lo_ = -span_sigmas * sigma;
    hi_ = span_sigmas * sigma;
    step_ = (hi_ - lo_) / (points - 1);

    cumulative_.assign(static_cast<std::size_t>(points) * cutoff_, 0.0);
    std::vector<Complex> prev(cutoff_, 0.0), cur(cutoff_);
    for (int i = 0; i < points; ++i) {
        Eigen::VectorXd psi = oscillator_functions(lo_ + i * step_, cutoff_);
        for (int delta = 0; delta < cutoff_; ++delta) {
            Complex g = 0.0;
            for (int m = 0; m + delta < cutoff_; ++m) g += rho.matrix(m, m + delta) * psi(m) * psi(m + delta);
            cur[delta] = g;
            Complex &slot = cumulative_[static_cast<std::size_t>(i) * cutoff_ + delta];
            slot = i == 0 ? Complex(0.0)
                          : cumulative_[static_cast<std::size_t>(i - 1) * cutoff_ + delta] +
                                0.5 * step_ * (prev[delta] + g);
        }
        std::swap(prev, cur);
    }
}

double QuadratureSampler::cdf_at(int i, const std::vector<Complex> &phases) const {
    const Complex *row = cumulative_.data() + static_cast<std::size_t>(i) * cutoff_;
    double total = row[0].real();
    for (int delta = 1; delta < cutoff_; ++delta) total += 2.0 * (phases[delta] * row[delta]).real();
    return total;
}

double QuadratureSampler::draw(double theta, double u) const {
    std::vector<Complex> phases(cutoff_);
    for (int delta = 0; delta < cutoff_; ++delta) phases[delta] = std::polar(1.0, delta * theta);
    const double target = u * cdf_at(points_ - 1, phases);
    int lo = 0, hi = points_ - 1;
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        if (cdf_at(mid, phases) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double c_lo = cdf_at(lo, phases), c_hi = cdf_at(hi, phases);
    double frac = c_hi > c_lo ? (target - c_lo) / (c_hi - c_lo) : 0.5;
    frac = std::clamp(frac, 0.0, 1.0);
    return lo_ + (lo + frac) * step_;
}

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

QuadratureDataset sample_quadratures(const FockDensity &state, const CoefficientVector &u, const PhaseSchedule &schedule,
                                     int count, double eta, std::uint64_t seed) {
    if (count < 1) throw DimensionError("sample count must be at least 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw UnphysicalError("efficiency must lie in (0, 1]");
    if (schedule.kind == PhaseSchedule::Kind::fixed && schedule.phases.empty()) {
        throw DimensionError("a fixed phase schedule needs at least one phase");
    }
    FockDensity single = apply_fock_loss(reduce_to_mode(state, u), eta);
    QuadratureSampler sampler(single);

    QuadratureDataset data;
    data.mode = u;
    data.efficiency = eta;
    data.seed = seed;
    data.records.resize(count);
    const std::uint64_t base = mix_seed(seed);
    for (int i = 0; i < count; ++i) {
        std::uint64_t first = mix_seed(base ^ static_cast<std::uint64_t>(i));
        std::uint64_t second = mix_seed(first);
        double theta = schedule.kind == PhaseSchedule::Kind::uniform
                           ? 2.0 * std::numbers::pi * unit_interval(first)
                           : schedule.phases[static_cast<std::size_t>(i) % schedule.phases.size()];
        data.records[i] = {theta, sampler.draw(theta, unit_interval(second))};
    }
    return data;
}

double excess_kurtosis(std::span<const double> x) {
    if (x.size() < 100) throw DimensionError("kurtosis estimate needs at least 100 samples");
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        double sq = v * v;
        m2 += sq;
        m4 += sq * sq;
    }
    m2 /= static_cast<double>(x.size());
    m4 /= static_cast<double>(x.size());
    if (!(m2 > 0.0)) throw Error("kurtosis estimate: data are all zero");
    return m4 / (m2 * m2) - 3.0;
}

KurtosisEstimate kurtosis_estimate(std::span<const double> x, int bootstrap, std::uint64_t seed) {
    KurtosisEstimate out;
    out.value = excess_kurtosis(x);
    if (bootstrap < 2) return out;
    const std::size_t n = x.size();
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = x[i] * x[i];
    std::mt19937_64 rng(mix_seed(seed ^ 0x6b757274ull));
    double sum = 0.0, sum_sq = 0.0;
    for (int b = 0; b < bootstrap; ++b) {
        double m2 = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t pick = static_cast<std::size_t>(unit_interval(rng()) * static_cast<double>(n));
            m2 += sq[pick];
            m4 += sq[pick] * sq[pick];
        }
        m2 /= static_cast<double>(n);
        m4 /= static_cast<double>(n);
        double k = m4 / (m2 * m2) - 3.0;
        sum += k;
        sum_sq += k * k;
    }
    double mean = sum / bootstrap;
    out.standard_error = std::sqrt(std::max(0.0, (sum_sq - bootstrap * mean * mean) / (bootstrap - 1)));
    return out;
}

KurtosisEstimate kurtosis_estimate(const QuadratureDataset &data, int bootstrap, std::uint64_t seed) {
    std::vector<double> x;
    x.reserve(data.records.size());
    for (const auto &r : data.records) x.push_back(r.x);
    return kurtosis_estimate(x, bootstrap, seed);
}

void write_dataset_csv(const QuadratureDataset &data, std::ostream &out) {
    out << "theta,x\n" << std::setprecision(17);
    for (const auto &r : data.records) out << r.theta << ',' << r.x << '\n';
}

void write_dataset(const QuadratureDataset &data, const std::filesystem::path &csv) {
    std::ofstream out(csv);
    if (!out) throw Error("cannot write " + csv.string());
    write_dataset_csv(data, out);
    nlohmann::ordered_json mode = nlohmann::ordered_json::array();
    for (int k = 0; k < data.mode.size(); ++k) mode.push_back({data.mode[k].real(), data.mode[k].imag()});
    nlohmann::ordered_json meta = {{"schema", "photonsub.dataset/1"},
                                   {"records", data.records.size()},
                                   {"mode", mode},
                                   {"efficiency", data.efficiency},
                                   {"seed", data.seed},
                                   {"source", data.source}};
    std::filesystem::path side = csv;
    side.replace_extension(".json");
    std::ofstream sidecar(side);
    if (!sidecar) throw Error("cannot write " + side.string());
    sidecar << meta.dump(2) << '\n';
}

QuadratureDataset read_dataset_csv(std::istream &in) {
    QuadratureDataset data;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header_seen) {
            header_seen = true;
            std::string compact;
            for (char ch : line) {
                if (ch != ' ' && ch != '\t') compact += ch;
            }
            if (compact != "theta,x") throw ConfigError("header", "expected 'theta,x'", line_no, 1);
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("row", "expected two comma-separated values", line_no, 1);
        QuadratureRecord r;
        try {
            std::size_t used = 0;
            r.theta = std::stod(line.substr(0, comma), &used);
            std::string rest = line.substr(comma + 1);
            r.x = std::stod(rest, &used);
            if (rest.find_first_not_of(" \t", used) != std::string::npos) {
                throw ConfigError("x", "trailing characters", line_no, static_cast<int>(comma + 2 + used));
            }
        } catch (const std::invalid_argument &) {
            throw ConfigError("row", "not a number", line_no, 1);
        } catch (const std::out_of_range &) {
            throw ConfigError("row", "value out of range", line_no, 1);
        }
        if (!std::isfinite(r.theta) || !std::isfinite(r.x)) throw ConfigError("row", "non-finite value", line_no, 1);
        data.records.push_back(r);
    }
    if (!header_seen) throw ConfigError("header", "empty dataset", 1, 1);
    data.mode = CoefficientVector::unit(1, 0);
    data.source = "csv";
    return data;
}

QuadratureDataset read_dataset(const std::filesystem::path &csv) {
    std::ifstream in(csv);
    if (!in) throw Error("cannot read " + csv.string());
    QuadratureDataset data = read_dataset_csv(in);
    data.source = csv.filename().string();
    std::filesystem::path side = csv;
    side.replace_extension(".json");
    std::ifstream sidecar(side);
    if (!sidecar) return data;
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(sidecar);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("sidecar", e.what());
    }
    if (meta.contains("efficiency")) data.efficiency = meta["efficiency"].get<double>();
    if (meta.contains("seed")) data.seed = meta["seed"].get<std::uint64_t>();
    if (meta.contains("source")) data.source = meta["source"].get<std::string>();
    if (meta.contains("mode")) {
        const auto &m = meta["mode"];
        Eigen::VectorXcd v(m.size());
        for (std::size_t k = 0; k < m.size(); ++k) v(k) = Complex(m[k].at(0).get<double>(), m[k].at(1).get<double>());
        data.mode = CoefficientVector(v);
    }
    return data;
}

}  // namespace photonsub
