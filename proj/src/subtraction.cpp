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

#include "photonsub/subtraction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "photonsub/errors.hpp"

namespace photonsub {

namespace {

void require_unit_interval(double value, const char *name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw UnphysicalError(std::string(name) + " = " + std::to_string(value) + " is outside [0, 1]");
    }
}

}  // namespace

double SubtractionSpec::coherent_weight() const {
    if (p0 == 1.0) return 1.0 - w0;
    return (1.0 - w0) * (background_modes * p0 - 1.0) / (background_modes - 1.0);
}

double SubtractionSpec::incoherent_weight() const {
    if (p0 == 1.0) return 0.0;
    return (1.0 - w0) * (1.0 - p0) / (background_modes - 1.0);
}

SubtractionSpec make_spec(const CoefficientVector &mode, double w0, double p0, int background_modes) {
    if (mode.size() == 0) throw DimensionError("subtraction mode is empty");
    require_unit_interval(w0, "w0");
    require_unit_interval(p0, "p0");
    if (background_modes < 1) throw DimensionError("background mode count must be at least 1");
    if (p0 < 1.0 && background_modes == 1) {
        throw UnphysicalError("p0 < 1 needs more than one background mode");
    }
    if (background_modes * p0 < 1.0 - 1e-12) {
        throw UnphysicalError("N * p0 = " + std::to_string(background_modes * p0) +
                              " < 1 gives a negative coherent weight");
    }
    return SubtractionSpec{mode, w0, p0, background_modes};
}

SubtractionSpec ideal_spec(const CoefficientVector &mode) {
    return make_spec(mode, 0.0, 1.0, std::max(1, mode.size()));
}

SubtractionSpec ideal_spec(const Eigen::VectorXcd &mode) {
    return ideal_spec(CoefficientVector(mode));
}

SubtractionSpec paper_spec(const CoefficientVector &mode) {
    if (mode.size() > kPaperBackgroundModes) {
        throw DimensionError("paper channel covers " + std::to_string(kPaperBackgroundModes) + " modes, got " +
                             std::to_string(mode.size()));
    }
    return make_spec(mode, kPaperW0, kPaperP0, kPaperBackgroundModes);
}

std::vector<ChannelTerm> channel_terms(const SubtractionSpec &spec, int modes) {
    if (spec.background_modes * spec.p0 < 1.0 - 1e-12) {
        throw UnphysicalError("N * p0 < 1 gives a negative coherent weight");
    }
    const int width = modes >= 0 ? modes : std::max(spec.mode.size(), spec.background_modes);
    auto cut = [&](const Eigen::VectorXcd &v) {
        Eigen::VectorXcd out = Eigen::VectorXcd::Zero(width);
        const int n = std::min<int>(width, static_cast<int>(v.size()));
        out.head(n) = v.head(n);
        return out;
    };

    std::vector<ChannelTerm> terms;
    if (spec.w0 > 0.0) terms.push_back({spec.w0, TermKind::passthrough, -1, Eigen::VectorXcd()});

    double coherent = spec.coherent_weight();
    if (coherent > 0.0) {
        Eigen::VectorXcd c = cut(spec.mode.entries());
        if (c.squaredNorm() > 0.0) terms.push_back({coherent, TermKind::coherent, -1, c});
    }

    double incoherent = spec.incoherent_weight();
    if (incoherent > 0.0) {
        for (int k = 0; k < spec.background_modes && k < width; ++k) {
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(width);
            e(k) = 1.0;
            terms.push_back({incoherent, TermKind::single_mode, k, e});
        }
    }
    return terms;
}

std::vector<ChannelTerm> transform_terms(const std::vector<ChannelTerm> &terms, const Eigen::MatrixXcd &w) {
    std::vector<ChannelTerm> out = terms;
    for (auto &t : out) {
        if (t.kind == TermKind::passthrough) continue;
        if (t.coefficients.size() != w.cols()) {
            throw DimensionError("transform_terms: " + std::to_string(t.coefficients.size()) +
                                 "-mode term against a " + std::to_string(w.cols()) + "-mode transform");
        }
        t.coefficients = w.conjugate() * t.coefficients;
    }
    return out;
}

}  // namespace photonsub
