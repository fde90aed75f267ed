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

#include "photonsub/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "photonsub/symplectic.hpp"
#include "photonsub/wick.hpp"

namespace photonsub {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using Position = std::pair<int, int>;

// Maps JSON pointers of an already-validated document to the line and column
// where each value starts.
class PositionIndex {
   public:
    explicit PositionIndex(std::string_view text) : text_(text) {
        skip();
        value("");
    }

    Position locate(std::string pointer) const {
        for (;;) {
            auto it = where_.find(pointer);
            if (it != where_.end()) return it->second;
            if (pointer.empty()) return {1, 1};
            pointer.erase(pointer.rfind('/'));
        }
    }

   private:
    bool more() const {
        return pos_ < text_.size();
    }
    char peek() const {
        return more() ? text_[pos_] : '\0';
    }
    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void skip() {
        while (more() && std::isspace(static_cast<unsigned char>(peek()))) bump();
    }

    static std::string escape(const std::string &key) {
        std::string out;
        for (char c : key) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out += c;
            }
        }
        return out;
    }

    std::string string() {
        std::string out;
        bump();
        while (more() && peek() != '"') {
            if (peek() == '\\') {
                bump();
                if (!more()) break;
            }
            out += peek();
            bump();
        }
        if (more()) bump();
        return out;
    }

    void value(const std::string &path) {
        if (!more()) return;
        where_[path] = {line_, col_};
        const char c = peek();
        if (c == '{' || c == '[') {
            const char close = c == '{' ? '}' : ']';
            bump();
            skip();
            for (int index = 0; more() && peek() != close; ++index) {
                std::string child = path + "/";
                if (c == '{') {
                    if (peek() != '"') return;
                    child += escape(string());
                    skip();
                    if (peek() != ':') return;
                    bump();
                    skip();
                } else {
                    child += std::to_string(index);
                }
                value(child);
                skip();
                if (peek() == ',') {
                    bump();
                    skip();
                }
            }
            if (more()) bump();
        } else if (c == '"') {
            string();
        } else {
            while (more() && peek() != ',' && peek() != ']' && peek() != '}' &&
                   !std::isspace(static_cast<unsigned char>(peek()))) {
                bump();
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::map<std::string, Position> where_;
};

Position offset_position(std::string_view text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class Reader {
   public:
    explicit Reader(const PositionIndex &index) : index_(index) {
    }

    [[noreturn]] void fail(const std::string &ptr, const std::string &what) const {
        auto [line, col] = index_.locate(ptr);
        throw ConfigError(ptr.empty() ? "/" : ptr, what, line, col);
    }

    void object(const json &v, const std::string &ptr, std::initializer_list<std::string_view> allowed) const {
        if (!v.is_object()) fail(ptr, "expected an object");
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
                std::string list;
                for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
                fail(ptr + "/" + it.key(), "unknown key '" + it.key() + "' (expected one of: " + list + ")");
            }
        }
    }

    double number(const json &v, const std::string &ptr) const {
        if (!v.is_number()) fail(ptr, "expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) fail(ptr, "expected a finite number");
        return x;
    }

    long long integer(const json &v, const std::string &ptr) const {
        if (!v.is_number_integer()) fail(ptr, "expected an integer");
        return v.get<long long>();
    }

    std::string text(const json &v, const std::string &ptr) const {
        if (!v.is_string()) fail(ptr, "expected a string");
        return v.get<std::string>();
    }

    Complex complex(const json &v, const std::string &ptr) const {
        if (v.is_number()) return {number(v, ptr), 0.0};
        if (!v.is_array() || v.size() != 2) fail(ptr, "expected a number or an [re, im] pair");
        return {number(v[0], ptr + "/0"), number(v[1], ptr + "/1")};
    }

    Eigen::VectorXcd complex_vector(const json &v, const std::string &ptr) const {
        if (!v.is_array() || v.empty()) fail(ptr, "expected a non-empty array of coefficients");
        Eigen::VectorXcd out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out(i) = complex(v[i], ptr + "/" + std::to_string(i));
        return out;
    }

    template <class Entry>
    auto square(const json &v, const std::string &ptr, Entry entry) const {
        if (!v.is_array() || v.empty()) fail(ptr, "expected a non-empty square matrix (array of rows)");
        const auto n = static_cast<Eigen::Index>(v.size());
        using Scalar = decltype(entry(v[0][0], ptr));
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::string row = ptr + "/" + std::to_string(i);
            if (!v[i].is_array() || static_cast<Eigen::Index>(v[i].size()) != n) {
                fail(row, "row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
            }
            for (Eigen::Index j = 0; j < n; ++j) out(i, j) = entry(v[i][j], row + "/" + std::to_string(j));
        }
        return out;
    }

   private:
    const PositionIndex &index_;
};

const json *member(const json &obj, const char *key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string join(const std::string &ptr, const char *key) {
    return ptr + "/" + key;
}

constexpr std::pair<Analysis, std::string_view> kAnalysisNames[] = {
    {Analysis::wigner, "wigner"}, {Analysis::w0, "W0"},     {Analysis::purity, "purity"},
    {Analysis::fidelity, "fidelity"}, {Analysis::kurtosis, "kurtosis"}, {Analysis::duan, "duan"},
    {Analysis::epr, "epr"},       {Analysis::nullifiers, "nullifiers"},
};

struct StateSpec {
    Eigen::MatrixXd covariance;
    std::string label;
};

StateSpec read_state(const Reader &r, const json &v, const std::string &ptr) {
    if (v.is_string()) {
        std::string name = v.get<std::string>();
        if (name != "paper-ED3") r.fail(ptr, "unknown state preset '" + name + "' (expected \"paper-ED3\")");
        return {paper_covariance().matrix(), name};
    }
    r.object(v, ptr, {"preset", "squeeze_db", "covariance", "loss_correction"});
    const json *preset = member(v, "preset");
    const json *squeeze = member(v, "squeeze_db");
    const json *cov = member(v, "covariance");
    if ((preset != nullptr) + (squeeze != nullptr) + (cov != nullptr) != 1) {
        r.fail(ptr, "state needs exactly one of \"preset\", \"squeeze_db\", \"covariance\"");
    }

    StateSpec out;
    if (preset != nullptr) {
        std::string name = r.text(*preset, join(ptr, "preset"));
        if (name != "paper-ED3") r.fail(join(ptr, "preset"), "unknown state preset '" + name + "'");
        out = {paper_covariance().matrix(), name};
    } else if (squeeze != nullptr) {
        const std::string sp = join(ptr, "squeeze_db");
        if (!squeeze->is_array() || squeeze->empty()) r.fail(sp, "expected a non-empty list of [x_db, p_db] pairs");
        std::vector<ModeSqueeze> modes;
        for (std::size_t k = 0; k < squeeze->size(); ++k) {
            const std::string kp = sp + "/" + std::to_string(k);
            const json &pair = (*squeeze)[k];
            if (!pair.is_array() || pair.size() != 2) r.fail(kp, "expected an [x_db, p_db] pair");
            modes.push_back({r.number(pair[0], kp + "/0"), r.number(pair[1], kp + "/1")});
        }
        try {
            out = {covariance_from_squeeze(modes).matrix(), "squeeze_db"};
        } catch (const Error &e) {
            r.fail(sp, e.what());
        }
    } else {
        const std::string cp = join(ptr, "covariance");
        Eigen::MatrixXd m = r.square(*cov, cp, [&](const json &x, const std::string &p) { return r.number(x, p); });
        if (m.rows() % 2 != 0) r.fail(cp, "covariance dimension must be even (x, p per mode)");
        try {
            CovarianceMatrix checked(m);
            auto report = validate(checked);
            if (!report.physical) r.fail(cp, "covariance is not physical: " + report.summary());
            out = {checked.matrix(), "covariance"};
        } catch (const ConfigError &) {
            throw;
        } catch (const Error &e) {
            r.fail(cp, e.what());
        }
    }

    if (const json *loss = member(v, "loss_correction")) {
        const std::string lp = join(ptr, "loss_correction");
        double eta = r.number(*loss, lp);
        if (!(eta > 0.0 && eta <= 1.0)) r.fail(lp, "loss correction efficiency must lie in (0, 1]");
        const auto n = out.covariance.rows();
        Eigen::MatrixXd corrected = (out.covariance - (1.0 - eta) * Eigen::MatrixXd::Identity(n, n)) / eta;
        auto report = validate(corrected);
        if (!report.physical) r.fail(lp, "loss-corrected covariance is not physical: " + report.summary());
        out.covariance = corrected;
        out.label += " (loss-corrected, eta=" + nlohmann::json(eta).dump() + ")";
    }
    return out;
}

ModeTransform read_basis(const Reader &r, const json *v, const std::string &ptr, int n) {
    if (v == nullptr) return builtin_basis(BasisName::HG, n);
    if (v->is_string()) {
        BasisName name;
        try {
            name = parse_basis_name(v->get<std::string>());
        } catch (const Error &e) {
            r.fail(ptr, e.what());
        }
        const int dim = name == BasisName::HG ? n : name == BasisName::EPR ? 2 : 4;
        if (dim > n) {
            r.fail(ptr, "basis " + v->get<std::string>() + " needs " + std::to_string(dim) + " modes, state has " +
                            std::to_string(n));
        }
        return builtin_basis(name, dim).embedded(n);
    }
    r.object(*v, ptr, {"matrix", "reference", "lo_phase", "label"});
    const json *m = member(*v, "matrix");
    if (m == nullptr) r.fail(ptr, "custom basis needs \"matrix\"");
    const std::string mp = join(ptr, "matrix");
    Eigen::MatrixXcd u = r.square(*m, mp, [&](const json &x, const std::string &p) { return r.complex(x, p); });
    if (u.rows() > n) r.fail(mp, "basis has " + std::to_string(u.rows()) + " modes, state has " + std::to_string(n));

    ModeReference reference = ModeReference::hermite_gauss;
    if (const json *ref = member(*v, "reference")) {
        std::string s = r.text(*ref, join(ptr, "reference"));
        if (s == "internal") {
            reference = ModeReference::internal;
        } else if (s != "hermite_gauss") {
            r.fail(join(ptr, "reference"), "expected \"hermite_gauss\" or \"internal\"");
        }
    }
    double lo_phase = 0.0;
    if (const json *phase = member(*v, "lo_phase")) lo_phase = r.number(*phase, join(ptr, "lo_phase"));
    std::string label = "custom";
    if (const json *l = member(*v, "label")) label = r.text(*l, join(ptr, "label"));
    try {
        return make_mode_transform(u, label, reference, lo_phase).embedded(n);
    } catch (const Error &e) {
        r.fail(mp, e.what());
    }
}

struct ModeRef {
    CoefficientVector mode;
    std::string label;
};

ModeRef read_mode(const Reader &r, const json &v, const std::string &ptr, const ModeTransform &basis) {
    const int n = basis.dim();
    if (v.is_number_integer()) {
        long long k = v.get<long long>();
        if (k < 0 || k >= n) r.fail(ptr, "mode " + std::to_string(k) + " outside 0.." + std::to_string(n - 1));
        return {CoefficientVector::unit(n, static_cast<int>(k)), basis.label + std::to_string(k)};
    }
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        const std::string &prefix = basis.label;
        bool digits = s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0 &&
                      std::all_of(s.begin() + static_cast<std::ptrdiff_t>(prefix.size()), s.end(),
                                  [](unsigned char c) { return std::isdigit(c); });
        if (!digits) r.fail(ptr, "mode label '" + s + "' does not name a " + prefix + " mode (e.g. " + prefix + "0)");
        int k = std::stoi(s.substr(prefix.size()));
        if (k >= n) r.fail(ptr, "mode " + s + " outside the " + std::to_string(n) + "-mode basis");
        return {CoefficientVector::unit(n, k), s};
    }
    Eigen::VectorXcd c = r.complex_vector(v, ptr);
    if (c.size() > n) {
        r.fail(ptr, std::to_string(c.size()) + " coefficients for a " + std::to_string(n) + "-mode basis");
    }
    Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(n);
    padded.head(c.size()) = c;
    if (padded.norm() < 1e-12) r.fail(ptr, "mode coefficients vanish");
    return {CoefficientVector(padded), "custom"};
}

void read_subtraction(const Reader &r, const json *v, const std::string &ptr, ScenarioConfig &cfg) {
    if (v == nullptr) return;
    if (v->is_string()) {
        if (v->get<std::string>() != "none") r.fail(ptr, "expected \"none\" or a subtraction object");
        return;
    }
    r.object(*v, ptr, {"mode", "channel"});
    const json *mode = member(*v, "mode");
    if (mode == nullptr) r.fail(ptr, "subtraction needs \"mode\"");
    ModeRef ref = read_mode(r, *mode, join(ptr, "mode"), cfg.basis);

    const std::string cp = join(ptr, "channel");
    const json *channel = member(*v, "channel");
    double w0 = 0.0;
    double p0 = 1.0;
    int background = cfg.modes();
    std::string label = "ideal";
    if (channel != nullptr && channel->is_string()) {
        label = channel->get<std::string>();
        if (label == "paper") {
            w0 = kPaperW0;
            p0 = kPaperP0;
            background = kPaperBackgroundModes;
        } else if (label != "ideal") {
            r.fail(cp, "expected \"ideal\", \"paper\" or {\"w0\", \"p0\", \"N\"}");
        }
    } else if (channel != nullptr) {
        r.object(*channel, cp, {"w0", "p0", "N"});
        label = "custom";
        if (const json *x = member(*channel, "w0")) w0 = r.number(*x, join(cp, "w0"));
        if (const json *x = member(*channel, "p0")) p0 = r.number(*x, join(cp, "p0"));
        if (const json *x = member(*channel, "N")) {
            long long nb = r.integer(*x, join(cp, "N"));
            if (nb < 1 || nb > 1024) r.fail(join(cp, "N"), "N must lie in 1..1024");
            background = static_cast<int>(nb);
        }
    }
    try {
        cfg.subtraction = make_spec(ref.mode, w0, p0, background);
    } catch (const Error &e) {
        r.fail(channel != nullptr ? cp : ptr, e.what());
    }
    cfg.channel_label = label;
}

TomographyConfig read_tomography(const Reader &r, const json &v, const std::string &ptr, double eta) {
    r.object(v, ptr, {"cutoff", "eta", "max_iters", "tolerance", "binned", "phase_bins", "x_bin_width"});
    TomographyConfig t;
    t.eta = eta;
    if (const json *x = member(v, "cutoff")) {
        long long c = r.integer(*x, join(ptr, "cutoff"));
        if (c < 5 || c > 60) r.fail(join(ptr, "cutoff"), "tomography cutoff must lie in 5..60");
        t.cutoff = static_cast<int>(c);
    }
    if (const json *x = member(v, "eta")) {
        t.eta = r.number(*x, join(ptr, "eta"));
        if (!(t.eta > 0.0 && t.eta <= 1.0)) r.fail(join(ptr, "eta"), "eta must lie in (0, 1]");
    }
    if (const json *x = member(v, "max_iters")) {
        long long m = r.integer(*x, join(ptr, "max_iters"));
        if (m < 1) r.fail(join(ptr, "max_iters"), "max_iters must be positive");
        t.max_iters = static_cast<int>(m);
    }
    if (const json *x = member(v, "tolerance")) {
        t.tolerance = r.number(*x, join(ptr, "tolerance"));
        if (!(t.tolerance > 0.0)) r.fail(join(ptr, "tolerance"), "tolerance must be positive");
    }
    if (const json *x = member(v, "binned")) {
        if (!x->is_boolean()) r.fail(join(ptr, "binned"), "expected true or false");
        t.binned = x->get<bool>();
    }
    if (const json *x = member(v, "phase_bins")) {
        long long b = r.integer(*x, join(ptr, "phase_bins"));
        if (b < 1) r.fail(join(ptr, "phase_bins"), "phase_bins must be positive");
        t.phase_bins = static_cast<int>(b);
    }
    if (const json *x = member(v, "x_bin_width")) {
        t.x_bin_width = r.number(*x, join(ptr, "x_bin_width"));
        if (!(t.x_bin_width > 0.0)) r.fail(join(ptr, "x_bin_width"), "x_bin_width must be positive");
    }
    return t;
}

MeasurementConfig read_measurement(const Reader &r, const json &v, const std::string &ptr, const ModeTransform &basis) {
    r.object(v, ptr, {"mode", "label", "phases", "samples", "eta", "tomography"});
    const json *mode = member(v, "mode");
    if (mode == nullptr) r.fail(ptr, "measurement needs \"mode\"");
    ModeRef ref = read_mode(r, *mode, join(ptr, "mode"), basis);
    MeasurementConfig m;
    m.mode = ref.mode;
    m.label = ref.label;
    if (const json *x = member(v, "label")) m.label = r.text(*x, join(ptr, "label"));
    if (const json *x = member(v, "phases")) {
        const std::string pp = join(ptr, "phases");
        if (x->is_string()) {
            if (x->get<std::string>() != "uniform") r.fail(pp, "expected \"uniform\" or a list of phases");
        } else {
            if (!x->is_array() || x->empty()) r.fail(pp, "expected \"uniform\" or a non-empty list of phases");
            std::vector<double> phases;
            for (std::size_t i = 0; i < x->size(); ++i) phases.push_back(r.number((*x)[i], pp + "/" + std::to_string(i)));
            m.phases = PhaseSchedule::fixed(std::move(phases));
        }
    }
    if (const json *x = member(v, "samples")) {
        long long s = r.integer(*x, join(ptr, "samples"));
        if (s != 0 && (s < 100 || s > 100000000)) {
            r.fail(join(ptr, "samples"), "samples must be 0 or lie in 100..1e8");
        }
        m.samples = static_cast<int>(s);
    }
    if (const json *x = member(v, "eta")) {
        m.eta = r.number(*x, join(ptr, "eta"));
        if (!(m.eta > 0.0 && m.eta <= 1.0)) r.fail(join(ptr, "eta"), "eta must lie in (0, 1]");
    }
    if (const json *x = member(v, "tomography")) {
        if (m.samples == 0) r.fail(join(ptr, "tomography"), "tomography needs \"samples\" > 0");
        m.tomography = read_tomography(r, *x, join(ptr, "tomography"), m.eta);
    }
    return m;
}

GridAxis read_axis(const Reader &r, const json &v, const std::string &ptr) {
    if (!v.is_array() || v.size() != 3) r.fail(ptr, "expected [min, max, points]");
    GridAxis a{r.number(v[0], ptr + "/0"), r.number(v[1], ptr + "/1"),
               static_cast<int>(r.integer(v[2], ptr + "/2"))};
    if (!(a.max > a.min) || a.points < 2 || a.points > 4001) {
        r.fail(ptr, "axis needs max > min and 2..4001 points");
    }
    return a;
}

std::pair<int, int> read_pair(const Reader &r, const json &v, const std::string &ptr, int n) {
    if (!v.is_array() || v.size() != 2) r.fail(ptr, "expected a pair of mode indices");
    long long a = r.integer(v[0], ptr + "/0");
    long long b = r.integer(v[1], ptr + "/1");
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) r.fail(ptr, "expected two distinct modes in 0.." + std::to_string(n - 1));
    return {static_cast<int>(a), static_cast<int>(b)};
}

void read_criteria(const Reader &r, const json *v, const std::string &ptr, ScenarioConfig &cfg) {
    const int n = cfg.modes();
    if (cfg.basis.label == "EPR") {
        cfg.duan_pair = std::pair{0, 1};
        cfg.epr_pair = std::pair{1, 0};
    } else if (cfg.basis.label == "LC" && n == 4) {
        cfg.nullifier_graph = chain_adjacency(4);
        cfg.graph_label = "chain";
    } else if (cfg.basis.label == "SC" && n == 4) {
        cfg.nullifier_graph = ring_adjacency(4);
        cfg.graph_label = "ring";
    }
    if (v == nullptr) return;
    r.object(*v, ptr, {"duan", "epr", "graph"});
    if (const json *x = member(*v, "duan")) cfg.duan_pair = read_pair(r, *x, join(ptr, "duan"), n);
    if (const json *x = member(*v, "epr")) cfg.epr_pair = read_pair(r, *x, join(ptr, "epr"), n);
    if (const json *x = member(*v, "graph")) {
        const std::string gp = join(ptr, "graph");
        if (x->is_string()) {
            cfg.graph_label = x->get<std::string>();
            if (cfg.graph_label == "chain") {
                cfg.nullifier_graph = chain_adjacency(n);
            } else if (cfg.graph_label == "ring") {
                if (n < 3) r.fail(gp, "a ring needs at least 3 modes");
                cfg.nullifier_graph = ring_adjacency(n);
            } else {
                r.fail(gp, "expected \"chain\", \"ring\" or an adjacency matrix");
            }
        } else {
            Eigen::MatrixXi a = r.square(*x, gp, [&](const json &e, const std::string &p) {
                return static_cast<int>(r.integer(e, p));
            });
            if (a.rows() != n) r.fail(gp, "adjacency must be " + std::to_string(n) + "x" + std::to_string(n));
            if (a != a.transpose() || a.diagonal().any()) r.fail(gp, "adjacency must be symmetric with zero diagonal");
            cfg.nullifier_graph = a;
            cfg.graph_label = "custom";
        }
    }
}

std::string slug(const std::string &s) {
    std::string out;
    for (char c : s) {
        out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '+' || c == '.' ? c : '_';
    }
    return out.empty() ? "m" : out;
}

ojson complex_json(const Eigen::VectorXcd &v) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

ojson matrix_json(const Eigen::MatrixXd &m) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ojson row = ojson::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(row);
    }
    return out;
}

ojson axis_json(const GridAxis &a) {
    return ojson{{"min", a.min}, {"max", a.max}, {"points", a.points}};
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

template <class F>
auto staged(const char *stage, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError &) {
        throw;
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError(stage, e.what());
    }
}

// ---- frames and channel terms --------------------------------------------

struct Frame {
    CovarianceMatrix cov{Eigen::MatrixXd::Identity(2, 2)};
    std::vector<ChannelTerm> terms;
    std::vector<ChannelTerm> ideal_terms;
};

Frame make_frame(const ScenarioConfig &cfg) {
    Frame f;
    f.cov = staged("basis", [&] { return change_basis(CovarianceMatrix(cfg.covariance), cfg.basis); });
    if (!cfg.subtraction) return f;
    staged("channel", [&] {
        const int n = cfg.modes();
        const Eigen::MatrixXcd w = cfg.basis.internal_matrix();
        for (auto t : channel_terms(*cfg.subtraction, n)) {
            // Background modes are fixed physical modes, so their operators follow the basis change.
            if (t.kind == TermKind::single_mode) t.coefficients = w.conjugate() * t.coefficients;
            f.terms.push_back(std::move(t));
        }
        f.ideal_terms = channel_terms(ideal_spec(cfg.subtraction->mode), n);
        return 0;
    });
    return f;
}

std::vector<int> support(const Eigen::VectorXcd &c) {
    std::vector<int> out;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        if (std::abs(c(k)) > 1e-14) out.push_back(static_cast<int>(k));
    }
    return out;
}

// Smallest mode set containing the measured mode that is closed under
// correlations and under the supports of the channel terms it touches.
std::vector<int> oracle_modes(const Frame &f, const CoefficientVector &u) {
    const int n = f.cov.modes();
    std::vector<char> in(n, 0);
    for (int k : support(u.entries())) in[k] = 1;
    std::vector<const ChannelTerm *> terms;
    for (const auto &t : f.terms) terms.push_back(&t);
    for (const auto &t : f.ideal_terms) terms.push_back(&t);

    for (bool grew = true; grew;) {
        grew = false;
        for (int j = 0; j < n; ++j) {
            if (!in[j]) continue;
            for (int l = 0; l < n; ++l) {
                if (!in[l] && f.cov.block(j, l).cwiseAbs().maxCoeff() > 1e-12) in[l] = grew = true;
            }
        }
        for (const ChannelTerm *t : terms) {
            if (t->kind == TermKind::passthrough) continue;
            auto s = support(t->coefficients);
            if (std::none_of(s.begin(), s.end(), [&](int k) { return in[k]; })) continue;
            for (int k : s) {
                if (!in[k]) in[k] = grew = true;
            }
        }
    }
    std::vector<int> out;
    for (int k = 0; k < n; ++k) {
        if (in[k]) out.push_back(k);
    }
    return out;
}

// Terms acting outside `keep` only multiply the kept marginal by their mean photon number.
std::vector<ChannelTerm> restrict_terms(const std::vector<ChannelTerm> &terms, const std::vector<int> &keep,
                                        const CovarianceMatrix &cov) {
    std::vector<ChannelTerm> out;
    double passthrough = 0.0;
    for (const auto &t : terms) {
        if (t.kind == TermKind::passthrough) {
            passthrough += t.weight;
            continue;
        }
        auto s = support(t.coefficients);
        if (std::all_of(s.begin(), s.end(), [&](int k) { return std::count(keep.begin(), keep.end(), k) > 0; })) {
            Eigen::VectorXcd c(keep.size());
            for (std::size_t i = 0; i < keep.size(); ++i) c(static_cast<Eigen::Index>(i)) = t.coefficients(keep[i]);
            out.push_back({t.weight, t.kind, t.mode, c});
        } else {
            passthrough += t.weight * heralding_probability(cov, {ChannelTerm{1.0, TermKind::coherent, -1, t.coefficients}});
        }
    }
    if (passthrough > 0.0) out.insert(out.begin(), ChannelTerm{passthrough, TermKind::passthrough, -1, {}});
    return out;
}

struct OracleState {
    std::vector<int> modes;
    FockSpace space{std::vector<int>{1}};
    FockDensity output;
    std::optional<FockDensity> ideal;
    double leak = 0.0;
    double norm = 1.0;
};

OracleState build_oracle(const ScenarioConfig &cfg, const Frame &f, std::vector<int> modes, bool with_ideal) {
    return staged("oracle", [&] {
        OracleState o;
        o.modes = std::move(modes);
        const int k = static_cast<int>(o.modes.size());
        if (cfg.cutoffs.empty()) {
            o.space = FockSpace::capped(k, cfg.max_photons > 0 ? cfg.max_photons : default_max_photons(k));
        } else {
            std::vector<int> cutoffs;
            for (int m : o.modes) cutoffs.push_back(cfg.cutoffs[m]);
            o.space = FockSpace(cutoffs);
        }
        CovarianceMatrix local = f.cov.reduced(o.modes);
        FockDensity input = gaussian_to_fock(local, o.space, cfg.leak_bound);
        o.leak = input.leak;
        if (!cfg.subtraction) {
            o.output = std::move(input);
            return o;
        }
        ChannelOutput out = apply_channel(input, restrict_terms(f.terms, o.modes, f.cov));
        o.norm = out.norm;
        o.output = std::move(out.state);
        if (with_ideal) o.ideal = apply_channel(input, restrict_terms(f.ideal_terms, o.modes, f.cov)).state;
        return o;
    });
}

CoefficientVector local_mode(const CoefficientVector &u, const std::vector<int> &modes) {
    Eigen::VectorXcd c(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) c(static_cast<Eigen::Index>(i)) = u[modes[i]];
    return CoefficientVector(c);
}

FockDensity measured_from(const OracleState &o, const FockDensity &rho, const CoefficientVector &u) {
    return reduce_to_mode(rho, local_mode(u, o.modes));
}

bool needs_oracle(const ScenarioConfig &cfg, const MeasurementConfig &m, bool cross_validate) {
    if (cfg.oracle == OracleUse::never) return false;
    if (cfg.oracle == OracleUse::always || cross_validate) return true;
    if (m.samples > 0 || cfg.wants(Analysis::wigner) || cfg.wants(Analysis::fidelity)) return true;
    return cfg.subtraction && (cfg.wants(Analysis::w0) || cfg.wants(Analysis::purity));
}

CovarianceMatrix measured_covariance(const CovarianceMatrix &cov, const CoefficientVector &u, double eta) {
    const std::array<int, 1> first{0};
    return apply_loss(change_basis(cov, complete_to_unitary(u.entries())).reduced(first), eta);
}

// ---- presets ---------------------------------------------------------------

constexpr int kPresetSamples = 30000;

ojson measurement(const ojson &mode, int samples = kPresetSamples, bool tomography = false) {
    ojson m{{"mode", mode}, {"samples", samples}};
    if (tomography) m["tomography"] = ojson{{"cutoff", 10}};
    return m;
}

ojson scenario(const std::string &name, const std::string &description) {
    return ojson{{"schema", kScenarioSchema}, {"name", name}, {"description", description}};
}

ojson subtract(const ojson &mode, const char *channel = "paper") {
    return ojson{{"mode", mode}, {"channel", channel}};
}

ojson cplx(double re, double im) {
    return ojson::array({re, im});
}

std::map<std::string, ojson, std::less<>> build_presets() {
    std::map<std::string, ojson, std::less<>> p;
    const ojson gaussian_analyses = {"wigner", "W0", "purity", "kurtosis"};
    const ojson subtracted_analyses = {"wigner", "W0", "purity", "fidelity", "kurtosis"};
    const ojson hg_measure = {measurement("HG0", kPresetSamples, true), measurement("HG1", kPresetSamples, true),
                              measurement("HG2", kPresetSamples, true)};

    {
        ojson s = scenario("vacuum", "Single-mode vacuum; sanity reference.");
        s["state"] = {{"squeeze_db", {{0.0, 0.0}}}};
        s["measurements"] = {measurement("HG0")};
        s["analyses"] = gaussian_analyses;
        p["vacuum"] = s;
    }
    {
        ojson s = scenario("fig2a-input", "Measured four-mode squeezed input, observed in HG0..HG2.");
        s["state"] = "paper-ED3";
        s["basis"] = "HG";
        s["measurements"] = hg_measure;
        s["analyses"] = gaussian_analyses;
        p["fig2a-input"] = s;
    }
    for (int k = 0; k < 3; ++k) {
        const std::string name = "fig2a-subtract-HG" + std::to_string(k);
        ojson s = scenario(name, "Subtraction in HG" + std::to_string(k) + ", observed in HG0..HG2.");
        s["state"] = "paper-ED3";
        s["basis"] = "HG";
        s["subtraction"] = subtract("HG" + std::to_string(k));
        s["measurements"] = hg_measure;
        s["analyses"] = subtracted_analyses;
        p[name] = s;
    }
    {
        ojson s = scenario("fig2b-subtract-HG0-iHG1", "Subtraction in (HG0 - i HG1)/sqrt2.");
        s["state"] = "paper-ED3";
        s["subtraction"] = subtract({1.0, cplx(0.0, -1.0)});
        s["measurements"] = {measurement({1.0, cplx(0.0, -1.0)}), measurement({1.0, cplx(0.0, 1.0)}),
                             measurement("HG0"), measurement("HG1")};
        s["measurements"][0]["label"] = "HG0-iHG1";
        s["measurements"][1]["label"] = "HG0+iHG1";
        s["analyses"] = subtracted_analyses;
        p["fig2b-subtract-HG0-iHG1"] = s;
    }
    {
        ojson s = scenario("fig2b-three-mode", "Subtraction in (HG0 + i HG1 + HG2)/sqrt3.");
        s["state"] = "paper-ED3";
        s["subtraction"] = subtract({1.0, cplx(0.0, 1.0), 1.0});
        s["measurements"] = {measurement({1.0, cplx(0.0, 1.0), 1.0}), measurement("HG0"), measurement("HG1"),
                             measurement("HG2")};
        s["measurements"][0]["label"] = "HG0+iHG1+HG2";
        s["analyses"] = subtracted_analyses;
        p["fig2b-three-mode"] = s;
    }
    {
        ojson s = scenario("fig2b-epr-input", "EPR pair built from HG0 and HG1.");
        s["state"] = "paper-ED3";
        s["basis"] = "EPR";
        s["measurements"] = {measurement("EPR0"), measurement("EPR1")};
        s["analyses"] = {"wigner", "W0", "purity", "kurtosis", "duan", "epr"};
        p["fig2b-epr-input"] = s;
    }
    for (int k = 0; k < 2; ++k) {
        const std::string name = k == 0 ? "fig2b-epr" : "fig2b-epr-subtract-EPR1";
        ojson s = scenario(name, "Subtraction in EPR" + std::to_string(k) + "; non-Gaussianity moves to the partner.");
        s["state"] = "paper-ED3";
        s["basis"] = "EPR";
        s["subtraction"] = subtract("EPR" + std::to_string(k));
        s["measurements"] = {measurement("EPR0"), measurement("EPR1")};
        s["analyses"] = {"wigner", "W0", "purity", "fidelity", "kurtosis", "duan", "epr"};
        p[name] = s;
    }

    const ojson lc_measure = {measurement("LC0"), measurement("LC1"), measurement("LC2"), measurement("LC3")};
    const ojson sc_measure = {measurement("SC0"), measurement("SC1"), measurement("SC2"), measurement("SC3")};
    {
        ojson s = scenario("fig3a-input", "Four-mode linear cluster.");
        s["state"] = "paper-ED3";
        s["basis"] = "LC";
        s["measurements"] = lc_measure;
        s["analyses"] = {"W0", "purity", "kurtosis", "nullifiers"};
        p["fig3a-input"] = s;
    }
    for (const char *target : {"LC3", "LC2"}) {
        const std::string name = std::string("fig3a-subtract-") + target;
        ojson s = scenario(name, std::string("Linear cluster with subtraction in ") + target + ".");
        s["state"] = "paper-ED3";
        s["basis"] = "LC";
        s["subtraction"] = subtract(target);
        s["measurements"] = lc_measure;
        s["analyses"] = {"W0", "purity", "kurtosis", "nullifiers"};
        p[name] = s;
    }
    {
        ojson s = scenario("fig3a-subtract-superposition",
                           "Linear cluster with subtraction in -0.4i LC0 - 0.4 LC1 + 0.8i LC2 + 0.2 LC3.");
        s["state"] = "paper-ED3";
        s["basis"] = "LC";
        s["subtraction"] = subtract({cplx(0.0, -0.4), -0.4, cplx(0.0, 0.8), 0.2});
        s["measurements"] = lc_measure;
        s["analyses"] = {"W0", "purity", "kurtosis", "nullifiers"};
        p["fig3a-subtract-superposition"] = s;
    }
    {
        ojson s = scenario("fig3b-input", "Four-mode square cluster.");
        s["state"] = "paper-ED3";
        s["basis"] = "SC";
        s["measurements"] = sc_measure;
        s["analyses"] = {"W0", "purity", "kurtosis", "nullifiers"};
        p["fig3b-input"] = s;
    }
    {
        ojson s = scenario("fig3b-subtract-SC0", "Square cluster with subtraction in SC0.");
        s["state"] = "paper-ED3";
        s["basis"] = "SC";
        s["subtraction"] = subtract("SC0");
        s["measurements"] = sc_measure;
        s["analyses"] = {"W0", "purity", "kurtosis", "nullifiers"};
        p["fig3b-subtract-SC0"] = s;
    }
    {
        ojson s = scenario("ed1-loss-corrected",
                           "HG0 subtraction with 12.5% detection loss, reconstructed with and without the loss in the "
                           "measurement operators.");
        s["state"] = {{"preset", "paper-ED3"}, {"loss_correction", 0.875}};
        s["subtraction"] = subtract("HG0");
        ojson corrected = measurement("HG0", kPresetSamples, true);
        corrected["label"] = "HG0-corrected";
        corrected["eta"] = 0.875;
        corrected["tomography"]["eta"] = 0.875;
        ojson raw = measurement("HG0", kPresetSamples, true);
        raw["label"] = "HG0-uncorrected";
        raw["eta"] = 0.875;
        raw["tomography"]["eta"] = 1.0;
        s["measurements"] = {corrected, raw};
        s["analyses"] = subtracted_analyses;
        p["ed1-loss-corrected"] = s;
    }
    {
        ojson s = scenario("ed2-mode-mismatch",
                           "Subtraction in (HG0 - i HG1)/sqrt2 observed with full, partial and no mode match.");
        s["state"] = "paper-ED3";
        s["subtraction"] = subtract({1.0, cplx(0.0, -1.0)});
        s["measurements"] = {measurement({1.0, cplx(0.0, -1.0)}), measurement({0.0, cplx(0.0, 1.0)}),
                             measurement({1.0, cplx(0.0, 1.0)})};
        s["measurements"][0]["label"] = "full-match";
        s["measurements"][1]["label"] = "partial-match";
        s["measurements"][2]["label"] = "no-match";
        s["analyses"] = subtracted_analyses;
        p["ed2-mode-mismatch"] = s;
    }
    const std::tuple<const char *, const char *, const char *> criteria[] = {
        {"ed3-criteria-epr", "EPR", "Duan and EPR criteria of the measured covariance."},
        {"ed3-criteria-lc", "LC", "Linear-cluster nullifiers of the measured covariance."},
        {"ed3-criteria-sc", "SC", "Square-cluster nullifiers of the measured covariance."},
    };
    for (const auto &[name, basis, text] : criteria) {
        ojson s = scenario(name, text);
        s["state"] = "paper-ED3";
        s["basis"] = basis;
        s["measurements"] = ojson::array();
        s["analyses"] = std::string(basis) == "EPR" ? ojson{"duan", "epr"} : ojson{"nullifiers"};
        p[name] = s;
    }
    return p;
}

const std::map<std::string, ojson, std::less<>> &presets() {
    static const auto table = build_presets();
    return table;
}

}  // namespace

std::string_view to_string(Analysis a) {
    for (const auto &[value, name] : kAnalysisNames) {
        if (value == a) return name;
    }
    return "unknown";
}

bool ScenarioConfig::wants(Analysis a) const {
    return std::find(analyses.begin(), analyses.end(), a) != analyses.end();
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::filesystem::path default_out_dir() {
    const char *env = std::getenv("PHOTONSUB_OUT_DIR");
    return env != nullptr ? std::filesystem::path(env) : std::filesystem::path();
}

ScenarioConfig parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        auto [line, col] = offset_position(text, e.byte);
        std::string what = e.what();
        auto colon = what.find("syntax error");
        throw ConfigError("", colon != std::string::npos ? what.substr(colon) : what, line, col);
    }
    PositionIndex index(text);
    Reader r(index);
    r.object(root, "",
             {"schema", "name", "description", "state", "basis", "subtraction", "measurements", "analyses", "seed",
              "cutoffs", "max_photons", "leak_bound", "oracle", "bootstrap", "wigner_grid", "fidelity", "criteria"});

    ScenarioConfig cfg;
    cfg.source = root;
    if (const json *s = member(root, "schema")) {
        if (r.text(*s, "/schema") != kScenarioSchema) {
            r.fail("/schema", "unsupported schema (expected \"" + std::string(kScenarioSchema) + "\")");
        }
    }
    cfg.name = "scenario";
    if (const json *s = member(root, "name")) cfg.name = r.text(*s, "/name");
    if (const json *s = member(root, "description")) cfg.description = r.text(*s, "/description");

    const json *state = member(root, "state");
    if (state == nullptr) r.fail("", "missing required key \"state\"");
    StateSpec st = read_state(r, *state, "/state");
    cfg.covariance = st.covariance;
    cfg.state_label = st.label;
    const int n = cfg.modes();
    cfg.basis = read_basis(r, member(root, "basis"), "/basis", n);

    read_subtraction(r, member(root, "subtraction"), "/subtraction", cfg);

    if (const json *ms = member(root, "measurements")) {
        if (!ms->is_array()) r.fail("/measurements", "expected a list of measurements");
        for (std::size_t i = 0; i < ms->size(); ++i) {
            cfg.measurements.push_back(read_measurement(r, (*ms)[i], "/measurements/" + std::to_string(i), cfg.basis));
        }
    }

    const json *an = member(root, "analyses");
    if (an == nullptr) r.fail("", "missing required key \"analyses\"");
    if (!an->is_array() || an->empty()) r.fail("/analyses", "expected a non-empty list of analyses");
    for (std::size_t i = 0; i < an->size(); ++i) {
        const std::string ap = "/analyses/" + std::to_string(i);
        std::string name = r.text((*an)[i], ap);
        auto it = std::find_if(std::begin(kAnalysisNames), std::end(kAnalysisNames),
                               [&](const auto &e) { return e.second == name; });
        if (it == std::end(kAnalysisNames)) {
            r.fail(ap, "unknown analysis '" + name +
                           "' (expected wigner, W0, purity, fidelity, kurtosis, duan, epr, nullifiers)");
        }
        if (!cfg.wants(it->first)) cfg.analyses.push_back(it->first);
    }

    if (const json *s = member(root, "seed")) {
        if (!s->is_number_unsigned()) r.fail("/seed", "expected a non-negative integer");
        cfg.seed = s->get<std::uint64_t>();
    }
    if (const json *c = member(root, "cutoffs")) {
        if (c->is_number_integer()) {
            long long v = r.integer(*c, "/cutoffs");
            if (v < 2 || v > 60) r.fail("/cutoffs", "cutoff must lie in 2..60");
            cfg.cutoffs.assign(n, static_cast<int>(v));
        } else {
            if (!c->is_array() || static_cast<int>(c->size()) != n) {
                r.fail("/cutoffs", "expected an integer or a list of " + std::to_string(n) + " integers");
            }
            for (std::size_t k = 0; k < c->size(); ++k) {
                long long v = r.integer((*c)[k], "/cutoffs/" + std::to_string(k));
                if (v < 2 || v > 60) r.fail("/cutoffs/" + std::to_string(k), "cutoff must lie in 2..60");
                cfg.cutoffs.push_back(static_cast<int>(v));
            }
        }
    }
    if (const json *c = member(root, "max_photons")) {
        if (!cfg.cutoffs.empty()) r.fail("/max_photons", "give either \"cutoffs\" or \"max_photons\", not both");
        long long v = r.integer(*c, "/max_photons");
        if (v < 1 || v > 60) r.fail("/max_photons", "max_photons must lie in 1..60");
        cfg.max_photons = static_cast<int>(v);
    }
    if (const json *l = member(root, "leak_bound")) {
        cfg.leak_bound = r.number(*l, "/leak_bound");
        if (!(cfg.leak_bound > 0.0 && cfg.leak_bound < 1.0)) r.fail("/leak_bound", "leak_bound must lie in (0, 1)");
    }
    if (const json *o = member(root, "oracle")) {
        std::string s = r.text(*o, "/oracle");
        if (s == "auto") {
            cfg.oracle = OracleUse::automatic;
        } else if (s == "always") {
            cfg.oracle = OracleUse::always;
        } else if (s == "never") {
            cfg.oracle = OracleUse::never;
        } else {
            r.fail("/oracle", "expected \"auto\", \"always\" or \"never\"");
        }
    }
    if (const json *b = member(root, "bootstrap")) {
        long long v = r.integer(*b, "/bootstrap");
        if (v < 0 || v > 100000) r.fail("/bootstrap", "bootstrap must lie in 0..100000");
        cfg.bootstrap = static_cast<int>(v);
    }
    if (const json *g = member(root, "wigner_grid")) {
        r.object(*g, "/wigner_grid", {"x", "p"});
        if (const json *x = member(*g, "x")) cfg.wigner_x = read_axis(r, *x, "/wigner_grid/x");
        if (const json *p = member(*g, "p")) cfg.wigner_p = read_axis(r, *p, "/wigner_grid/p");
    }
    if (const json *f = member(root, "fidelity")) {
        std::string s = r.text(*f, "/fidelity");
        if (s == "uhlmann") {
            cfg.fidelity = FidelityKind::uhlmann;
        } else if (s == "overlap") {
            cfg.fidelity = FidelityKind::overlap;
        } else {
            r.fail("/fidelity", "expected \"uhlmann\" or \"overlap\"");
        }
    }
    read_criteria(r, member(root, "criteria"), "/criteria", cfg);

    const bool per_mode = cfg.wants(Analysis::wigner) || cfg.wants(Analysis::w0) || cfg.wants(Analysis::purity) ||
                          cfg.wants(Analysis::fidelity) || cfg.wants(Analysis::kurtosis);
    if (per_mode && cfg.measurements.empty()) r.fail("/analyses", "per-mode analyses need at least one measurement");
    if (cfg.wants(Analysis::fidelity) && !cfg.subtraction) r.fail("/analyses", "fidelity needs a subtraction");
    if (cfg.wants(Analysis::duan) && !cfg.duan_pair) r.fail("/analyses", "duan needs criteria.duan for this basis");
    if (cfg.wants(Analysis::epr) && !cfg.epr_pair) r.fail("/analyses", "epr needs criteria.epr for this basis");
    if (cfg.wants(Analysis::nullifiers) && !cfg.nullifier_graph) {
        r.fail("/analyses", "nullifiers need criteria.graph for this basis");
    }
    if (cfg.oracle == OracleUse::never) {
        for (std::size_t i = 0; i < cfg.measurements.size(); ++i) {
            if (cfg.measurements[i].samples > 0) {
                r.fail("/measurements/" + std::to_string(i) + "/samples", "sampling needs the oracle (oracle is \"never\")");
            }
        }
        if (cfg.wants(Analysis::wigner) || cfg.wants(Analysis::fidelity) ||
            (cfg.subtraction && (cfg.wants(Analysis::w0) || cfg.wants(Analysis::purity)))) {
            r.fail("/oracle", "the requested analyses need the Fock oracle");
        }
    }
    return cfg;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto &[name, _] : presets()) out.push_back(name);
    return out;
}

bool is_preset(std::string_view name) {
    return presets().find(name) != presets().end();
}

std::string preset_json(std::string_view name) {
    auto it = presets().find(name);
    if (it == presets().end()) throw ConfigError("", "no preset named '" + std::string(name) + "'");
    return it->second.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string &path_or_preset) {
    std::filesystem::path path(path_or_preset);
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("", "cannot open " + path.string());
        std::ostringstream text;
        text << in.rdbuf();
        return parse_scenario(text.str());
    }
    std::string name = path.extension() == ".json" ? path.stem().string() : path_or_preset;
    if (is_preset(name)) return parse_scenario(preset_json(name));
    throw ConfigError("", "no such file or preset: " + path_or_preset);
}

nlohmann::ordered_json evaluate_criteria(const ScenarioConfig &config) {
    return staged("criteria", [&] {
        CovarianceMatrix v = change_basis(CovarianceMatrix(config.covariance), config.basis);
        ojson out = ojson::object();
        out["basis"] = config.basis.label;
        if (config.duan_pair) {
            auto [i, j] = *config.duan_pair;
            double d = duan_value(v, i, j);
            out["duan"] = ojson{{"modes", {i, j}}, {"value", d}, {"bound", 4.0}, {"satisfied", d < 4.0}};
        }
        if (config.epr_pair) {
            auto [a, b] = *config.epr_pair;
            double e = epr_value(v, a, b);
            out["epr"] = ojson{{"conditioned", a}, {"conditioning", b}, {"value", e}, {"bound", 1.0}, {"satisfied", e < 1.0}};
        }
        if (config.nullifier_graph) {
            auto values = nullifier_variances(v, *config.nullifier_graph);
            bool all = std::all_of(values.begin(), values.end(), [](double x) { return x < 1.0; });
            out["nullifiers"] = ojson{{"graph", config.graph_label}, {"values", values}, {"bound", 1.0}, {"satisfied", all}};
        }
        return out;
    });
}

FockDensity measured_state(const ScenarioConfig &config, int index) {
    if (index < 0 || index >= static_cast<int>(config.measurements.size())) {
        throw DimensionError("measurement " + std::to_string(index) + " does not exist");
    }
    const MeasurementConfig &m = config.measurements[index];
    Frame f = make_frame(config);
    OracleState o = build_oracle(config, f, oracle_modes(f, m.mode), false);
    return staged("measurement", [&] { return apply_fock_loss(measured_from(o, o.output, m.mode), m.eta); });
}

nlohmann::ordered_json run_scenario(const ScenarioConfig &config, const RunOptions &options) {
    const std::uint64_t seed = options.seed.value_or(config.seed);
    const int n = config.modes();
    Frame f = make_frame(config);

    ojson report = ojson::object();
    report["schema"] = kReportSchema;
    report["scenario"] = config.name;
    if (!config.description.empty()) report["description"] = config.description;
    report["provenance"] = ojson{{"version", kVersion},
                                 {"config_hash", "fnv1a:" + hex64(fnv1a(config.source.dump()))},
                                 {"seed", seed}};

    {
        auto input = validate(CovarianceMatrix(config.covariance));
        auto frame = validate(f.cov);
        ojson st{{"label", config.state_label},
                 {"modes", n},
                 {"basis", config.basis.label},
                 {"lo_phase", config.basis.lo_phase},
                 {"basis_cleanup_deviation", config.basis.cleanup_deviation},
                 {"covariance", matrix_json(f.cov.matrix())},
                 {"symplectic_eigenvalues", symplectic_eigenvalues(f.cov.matrix())},
                 {"mode_purities", frame.mode_purities},
                 {"validation",
                  {{"physical", input.physical},
                   {"min_eigenvalue", input.min_eigenvalue},
                   {"min_uncertainty_eigenvalue", input.min_uncertainty_eigenvalue},
                   {"symmetry_deviation", input.symmetry_deviation}}}};
        report["state"] = st;
    }

    double analytic_norm = 1.0;
    if (config.subtraction) {
        const SubtractionSpec &s = *config.subtraction;
        analytic_norm = staged("channel", [&] { return heralding_probability(f.cov, f.terms); });
        report["channel"] = ojson{{"kind", config.channel_label},
                                  {"mode", complex_json(s.mode.entries())},
                                  {"w0", s.w0},
                                  {"p0", s.p0},
                                  {"background_modes", s.background_modes},
                                  {"coherent_weight", s.coherent_weight()},
                                  {"incoherent_weight", s.incoherent_weight()},
                                  {"heralding_probability", analytic_norm},
                                  {"heralding_weight", analytic_norm - s.w0}};
    } else {
        report["channel"] = ojson{{"kind", "none"}};
    }

    std::map<std::vector<int>, OracleState> oracles;
    ojson cross = ojson::array();
    bool cross_ok = true;
    auto compare = [&](const std::string &what, const std::string &label, double analytic, double oracle, int modes) {
        const double tol = modes <= 2 ? 1e-3 : 5e-3;
        const double dev = std::abs(analytic - oracle);
        cross_ok = cross_ok && dev < tol;
        cross.push_back(ojson{{"quantity", what},
                              {"measurement", label},
                              {"analytic", analytic},
                              {"oracle", oracle},
                              {"deviation", dev},
                              {"tolerance", tol},
                              {"pass", dev < tol}});
    };

    if (!options.out_dir.empty()) {
        staged("output", [&] {
            std::filesystem::create_directories(options.out_dir);
            return 0;
        });
    }

    ojson measurements = ojson::array();
    for (std::size_t idx = 0; idx < config.measurements.size(); ++idx) {
        const MeasurementConfig &m = config.measurements[idx];
        ojson entry{{"label", m.label}, {"mode", complex_json(m.mode.entries())}, {"eta", m.eta}};

        PhaseAveragedMoments lossless = staged("analytic", [&] {
            return config.subtraction ? subtracted_phase_moments(f.cov, f.terms, m.mode)
                                      : gaussian_phase_moments(f.cov, m.mode);
        });
        const double k_analytic = lossless.with_loss(m.eta).excess_kurtosis();
        std::optional<CovarianceMatrix> gaussian_mode;
        if (!config.subtraction) gaussian_mode = staged("analytic", [&] { return measured_covariance(f.cov, m.mode, m.eta); });

        ojson kurt;
        if (config.wants(Analysis::kurtosis)) {
            kurt["analytic"] = k_analytic;
            if (m.eta < 1.0) kurt["analytic_lossless"] = lossless.excess_kurtosis();
        }
        ojson w0;
        ojson pur;
        if (gaussian_mode) {
            const double g = 1.0 / std::sqrt(gaussian_mode->matrix().determinant());
            if (config.wants(Analysis::w0)) w0["analytic"] = g;
            if (config.wants(Analysis::purity)) pur["analytic"] = g;
        }

        if (needs_oracle(config, m, options.cross_validate)) {
            std::vector<int> modes = oracle_modes(f, m.mode);
            auto it = oracles.find(modes);
            if (it == oracles.end()) {
                it = oracles.emplace(modes, build_oracle(config, f, modes, config.wants(Analysis::fidelity))).first;
            }
            const OracleState &o = it->second;
            const int k = static_cast<int>(o.modes.size());

            FockDensity clean = staged("measurement", [&] { return measured_from(o, o.output, m.mode); });
            FockDensity state = staged("measurement", [&] { return apply_fock_loss(clean, m.eta); });
            entry["oracle"] = ojson{{"modes", o.modes}, {"dimension", o.space.dim()}, {"leak", o.leak}};

            const double w0_oracle = parity_w0(state);
            const double purity_oracle = purity(state);
            const double k_oracle = fock_phase_moments(state).excess_kurtosis();
            if (config.wants(Analysis::w0)) w0["oracle"] = w0_oracle;
            if (config.wants(Analysis::purity)) pur["oracle"] = purity_oracle;
            if (config.wants(Analysis::kurtosis)) kurt["oracle"] = k_oracle;

            if (options.cross_validate) {
                compare("excess_kurtosis", m.label, k_analytic, k_oracle, k);
                if (gaussian_mode) {
                    const double g = 1.0 / std::sqrt(gaussian_mode->matrix().determinant());
                    compare("purity", m.label, g, purity_oracle, k);
                    compare("W0", m.label, g, w0_oracle, k);
                }
            }

            FockDensity reference = state;
            if (config.wants(Analysis::fidelity) && o.ideal) {
                reference = staged("measurement", [&] { return apply_fock_loss(measured_from(o, *o.ideal, m.mode), m.eta); });
                double value = config.fidelity == FidelityKind::uhlmann ? fidelity(state, reference)
                                                                          : overlap_fidelity(state, reference);
                entry["fidelity"] = ojson{{"kind", config.fidelity == FidelityKind::uhlmann ? "uhlmann" : "overlap"},
                                          {"reference", "ideal subtraction"},
                                          {"value", value}};
            }

            if (config.wants(Analysis::wigner)) {
                WignerGrid grid = staged("wigner", [&] { return wigner_grid(state, config.wigner_x, config.wigner_p); });
                ojson wg{{"x", axis_json(grid.x)},
                         {"p", axis_json(grid.p)},
                         {"layout", "x-major"},
                         {"integral", grid.integral()},
                         {"min", *std::min_element(grid.values.begin(), grid.values.end())},
                         {"max", *std::max_element(grid.values.begin(), grid.values.end())}};
                if (!options.out_dir.empty()) {
                    auto file = options.out_dir / (slug(config.name) + "." + std::to_string(idx) + "-" + slug(m.label) +
                                                   ".wigner.json");
                    staged("output", [&] {
                        write_wigner_binary(grid, file);
                        return 0;
                    });
                    wg["file"] = file.filename().string();
                } else {
                    wg["values"] = grid.values;
                }
                entry["wigner"] = wg;
            }

            if (m.samples > 0) {
                const std::uint64_t sample_seed = mix_seed(seed) ^ (static_cast<std::uint64_t>(idx) + 1);
                QuadratureDataset data = staged("sampling", [&] {
                    return sample_quadratures(clean, CoefficientVector::unit(1, 0), m.phases, m.samples, m.eta,
                                              sample_seed);
                });
                data.mode = m.mode;
                data.source = config.name + "/" + m.label;
                ojson sampled{{"samples", m.samples}, {"seed", sample_seed}};
                if (config.wants(Analysis::kurtosis)) {
                    KurtosisEstimate est =
                        staged("sampling", [&] { return kurtosis_estimate(data, config.bootstrap, mix_seed(sample_seed)); });
                    sampled["excess_kurtosis"] = est.value;
                    sampled["standard_error"] = est.standard_error;
                    sampled["bootstrap"] = config.bootstrap;
                }
                if (!options.out_dir.empty()) {
                    auto file =
                        options.out_dir / (slug(config.name) + "." + std::to_string(idx) + "-" + slug(m.label) + ".csv");
                    staged("output", [&] {
                        write_dataset(data, file);
                        return 0;
                    });
                    sampled["file"] = file.filename().string();
                }
                entry["sampled"] = sampled;

                if (m.tomography) {
                    TomographyResult t = staged("tomography", [&] { return reconstruct(data, *m.tomography); });
                    const FockDensity truth = m.tomography->eta < 1.0 ? clean : state;
                    StateObservables obs = staged("tomography", [&] {
                        return report_observables(t.state, &truth, config.fidelity);
                    });
                    bool monotone = true;
                    for (std::size_t i = 1; i < t.log_likelihood.size(); ++i) {
                        const double prev = t.log_likelihood[i - 1];
                        if (t.log_likelihood[i] < prev - 1e-9 * std::max(1.0, std::abs(prev))) monotone = false;
                    }
                    entry["tomography"] = ojson{{"cutoff", m.tomography->cutoff},
                                                {"eta", m.tomography->eta},
                                                {"binned", m.tomography->binned},
                                                {"operators", t.operators},
                                                {"iterations", t.iterations},
                                                {"converged", t.converged},
                                                {"log_likelihood", t.log_likelihood.empty() ? 0.0 : t.log_likelihood.back()},
                                                {"monotone", monotone},
                                                {"W0", obs.w0},
                                                {"purity", obs.purity},
                                                {"excess_kurtosis", obs.kurtosis},
                                                {"fidelity_with_truth", obs.fidelity.value_or(0.0)},
                                                {"truth", m.tomography->eta < 1.0 ? "lossless" : "measured"}};
                }
            }
        }

        if (!kurt.is_null()) entry["excess_kurtosis"] = kurt;
        if (!w0.is_null()) entry["W0"] = w0;
        if (!pur.is_null()) entry["purity"] = pur;
        measurements.push_back(entry);
    }

    ojson oracle_list = ojson::array();
    for (const auto &[modes, o] : oracles) {
        ojson e{{"modes", modes}, {"cutoffs", o.space.cutoffs()}};
        if (o.space.max_total() >= 0) e["max_photons"] = o.space.max_total();
        e["dimension"] = o.space.dim();
        e["leak"] = o.leak;
        if (config.subtraction) {
            e["heralding_probability"] = o.norm;
            if (options.cross_validate) {
                compare("heralding_probability", "", analytic_norm, o.norm, static_cast<int>(modes.size()));
            }
        }
        e["min_eigenvalue"] = staged("oracle", [&] { return min_eigenvalue(o.output); });
        e["trace"] = o.output.trace();
        oracle_list.push_back(e);
    }
    report["oracle"] = oracle_list;
    report["measurements"] = measurements;

    if (config.wants(Analysis::duan) || config.wants(Analysis::epr) || config.wants(Analysis::nullifiers)) {
        ojson all = evaluate_criteria(config);
        ojson chosen{{"basis", all["basis"]}};
        if (config.wants(Analysis::duan)) chosen["duan"] = all["duan"];
        if (config.wants(Analysis::epr)) chosen["epr"] = all["epr"];
        if (config.wants(Analysis::nullifiers)) chosen["nullifiers"] = all["nullifiers"];
        report["criteria"] = chosen;
    }
    if (options.cross_validate) report["cross_validation"] = ojson{{"pass", cross_ok}, {"checks", cross}};
    return report;
}

}  // namespace photonsub
