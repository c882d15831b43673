// Copyright 2026 The shadowqpt Authors
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

#include "shadowqpt/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace shadowqpt {

static CMatrix single_qubit_gate(const Gate &g) {
    CMatrix m(2, 2);
    if (g.name == "h") {
        double s = 1.0 / std::sqrt(2.0);
        m << s, s, s, -s;
    } else if (g.name == "x") {
        m = pauli_matrix_1q(PauliOp::X);
    } else if (g.name == "y") {
        m = pauli_matrix_1q(PauliOp::Y);
    } else if (g.name == "z") {
        m = pauli_matrix_1q(PauliOp::Z);
    } else if (g.name == "s") {
        m << 1, 0, 0, Complex(0, 1);
    } else if (g.name == "sdg") {
        m << 1, 0, 0, Complex(0, -1);
    } else if (g.name == "rx" || g.name == "ry" || g.name == "rz") {
        if (g.params.size() != 1) {
            throw std::invalid_argument("gate_unitary: rotation gate needs one angle");
        }
        double half = g.params[0] / 2.0;
        double c = std::cos(half), s = std::sin(half);
        if (g.name == "rx") {
            m << c, Complex(0, -s), Complex(0, -s), c;
        } else if (g.name == "ry") {
            m << c, -s, s, c;
        } else {
            m << Complex(c, -s), 0, 0, Complex(c, s);
        }
    } else {
        throw std::invalid_argument("gate_unitary: unknown gate name " + g.name);
    }
    return m;
}

CMatrix gate_unitary(const Gate &g, int n) {
    Eigen::Index dim = Eigen::Index{1} << n;
    for (int w : g.wires) {
        if (w < 0 || w >= n) {
            throw std::invalid_argument("gate_unitary: wire out of range for gate " + g.name);
        }
    }
    if (g.name == "cx") {
        if (g.wires.size() != 2 || g.wires[0] == g.wires[1]) {
            throw std::invalid_argument("gate_unitary: cx needs two distinct wires");
        }
        int c = g.wires[0], t = g.wires[1];
        CMatrix u = CMatrix::Zero(dim, dim);
        for (Eigen::Index b = 0; b < dim; ++b) {
            Eigen::Index out = b;
            if ((b >> (n - 1 - c)) & 1) {
                out = b ^ (Eigen::Index{1} << (n - 1 - t));
            }
            u(out, b) = 1.0;
        }
        return u;
    }
    if (g.wires.size() != 1) {
        throw std::invalid_argument("gate_unitary: " + g.name + " needs one wire");
    }
    int w = g.wires[0];
    CMatrix m = single_qubit_gate(g);
    CMatrix left = CMatrix::Identity(Eigen::Index{1} << w, Eigen::Index{1} << w);
    CMatrix right = CMatrix::Identity(Eigen::Index{1} << (n - 1 - w),
                                      Eigen::Index{1} << (n - 1 - w));
    return kron(kron(left, m), right);
}

CMatrix circuit_unitary(const std::vector<Gate> &gates, int n) {
    CMatrix u = CMatrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (const Gate &g : gates) {
        u = gate_unitary(g, n) * u;
    }
    return u;
}

int circuit_depth(const std::vector<Gate> &gates) {
    std::vector<int> wire_free;  // first free layer per wire
    int depth = 0;
    for (const Gate &g : gates) {
        int layer = 0;
        for (int w : g.wires) {
            if (w >= static_cast<int>(wire_free.size())) {
                wire_free.resize(static_cast<size_t>(w) + 1, 0);
            }
            layer = std::max(layer, wire_free[static_cast<size_t>(w)]);
        }
        for (int w : g.wires) {
            wire_free[static_cast<size_t>(w)] = layer + 1;
        }
        depth = std::max(depth, layer + 1);
    }
    return depth;
}

CMatrix hamiltonian_matrix(const HamiltonianTerms &h) {
    Eigen::Index dim = Eigen::Index{1} << h.n;
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto &[c, p] : h.terms) {
        if (p.n() != h.n) {
            throw std::invalid_argument("hamiltonian_matrix: term length mismatch");
        }
        m += c * pauli_matrix(p);
    }
    return m;
}

HamiltonianTerms tfim_hamiltonian(int n, const std::vector<double> &J,
                                  const std::vector<double> &h) {
    if (n < 1) {
        throw std::invalid_argument("tfim_hamiltonian: n must be positive");
    }
    if (static_cast<int>(J.size()) != n - 1 || static_cast<int>(h.size()) != n) {
        throw std::invalid_argument("tfim_hamiltonian: need n-1 couplings and n fields");
    }
    HamiltonianTerms ht;
    ht.n = n;
    for (int i = 0; i + 1 < n; ++i) {
        PauliString p = PauliString::identity_string(n);
        p.ops[static_cast<size_t>(i)] = PauliOp::X;
        p.ops[static_cast<size_t>(i + 1)] = PauliOp::X;
        ht.terms.emplace_back(J[static_cast<size_t>(i)], p);
    }
    for (int i = 0; i < n; ++i) {
        ht.terms.emplace_back(h[static_cast<size_t>(i)],
                              PauliString::single(n, i, PauliOp::Z));
    }
    return ht;
}

HamiltonianTerms random_tfim(int n, RngStream &rng) {
    std::vector<double> J, h;
    for (int i = 0; i + 1 < n; ++i) {
        J.push_back(rng.uniform(-1.0, 1.0));
    }
    for (int i = 0; i < n; ++i) {
        h.push_back(rng.uniform(-1.0, 1.0));
    }
    return tfim_hamiltonian(n, J, h);
}

ChannelSpec ChannelSpec::from_unitary(int n, CMatrix u) {
    if (!is_unitary(u, 1e-9) || u.rows() != (Eigen::Index{1} << n)) {
        throw std::invalid_argument("ChannelSpec::from_unitary: matrix is not a 2^n unitary");
    }
    ChannelSpec s;
    s.kind = Kind::unitary;
    s.n = n;
    s.u = std::move(u);
    return s;
}

ChannelSpec ChannelSpec::from_gates(int n, std::vector<Gate> gates) {
    ChannelSpec s;
    s.kind = Kind::gate_list;
    s.n = n;
    s.gates = std::move(gates);
    // Validates wires and names.
    circuit_unitary(s.gates, n);
    return s;
}

ChannelSpec ChannelSpec::from_hamiltonian(HamiltonianTerms ham, double time) {
    ChannelSpec s;
    s.kind = Kind::hamiltonian;
    s.n = ham.n;
    s.ham = std::move(ham);
    s.time = time;
    return s;
}

ChannelSpec ChannelSpec::depolarized_copy(ChannelSpec base, double noise) {
    if (noise < 0.0 || noise > 1.0) {
        throw std::invalid_argument("ChannelSpec::depolarized_copy: noise must be in [0,1]");
    }
    ChannelSpec s;
    s.kind = Kind::depolarized;
    s.n = base.n;
    s.noise = noise;
    s.inner = std::make_shared<const ChannelSpec>(std::move(base));
    return s;
}

CMatrix channel_unitary(const ChannelSpec &spec) {
    switch (spec.kind) {
        case ChannelSpec::Kind::unitary:
            return spec.u;
        case ChannelSpec::Kind::gate_list:
            return circuit_unitary(spec.gates, spec.n);
        case ChannelSpec::Kind::hamiltonian:
            return expm_i_hermitian(hamiltonian_matrix(spec.ham), spec.time);
        case ChannelSpec::Kind::depolarized:
            return channel_unitary(*spec.inner);
    }
    throw std::invalid_argument("channel_unitary: bad kind");
}

double total_depolarizing(const ChannelSpec &spec) {
    if (spec.kind != ChannelSpec::Kind::depolarized) {
        return 0.0;
    }
    return 1.0 - (1.0 - spec.noise) * (1.0 - total_depolarizing(*spec.inner));
}

ChoiMatrix choi_from_unitary(const CMatrix &u, int n) {
    Eigen::Index dim = Eigen::Index{1} << n;
    if (u.rows() != dim || u.cols() != dim) {
        throw std::invalid_argument("choi_from_unitary: dimension mismatch");
    }
    if (!is_unitary(u, 1e-9)) {
        throw std::invalid_argument("choi_from_unitary: input is not unitary");
    }
    // (I (x) U) applied to n Bell pairs: v = sum_b |b> (x) U|b> / sqrt(2^n).
    CVector v = CVector::Zero(dim * dim);
    double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index b = 0; b < dim; ++b) {
        v.segment(b * dim, dim) = norm * u.col(b);
    }
    ChoiMatrix out;
    out.n = n;
    out.normalized = false;
    out.mat = static_cast<double>(dim) * (v * v.adjoint());
    return out;
}

ChoiMatrix choi_of(const ChannelSpec &spec) {
    if (spec.kind == ChannelSpec::Kind::depolarized) {
        ChoiMatrix base = choi_of(*spec.inner);
        Eigen::Index full = base.mat.rows();
        double dim = std::pow(2.0, base.n);
        base.mat = (1.0 - spec.noise) * base.mat +
                   (spec.noise / dim) * CMatrix::Identity(full, full);
        return base;
    }
    return choi_from_unitary(channel_unitary(spec), spec.n);
}

CMatrix apply_channel(const ChoiMatrix &choi, const CMatrix &rho_in) {
    if (choi.normalized) {
        throw std::invalid_argument("apply_channel: expects an unnormalized Choi matrix");
    }
    Eigen::Index dim = Eigen::Index{1} << choi.n;
    if (rho_in.rows() != dim || rho_in.cols() != dim) {
        throw std::invalid_argument("apply_channel: input dimension mismatch");
    }
    CMatrix left = kron(rho_in.transpose(), CMatrix::Identity(dim, dim));
    // Trace out the input copy (first factor of the doubled register).
    return partial_trace(left * choi.mat, {1}, {static_cast<int>(dim), static_cast<int>(dim)});
}

ChannelSpec ghz_process(int n) {
    if (n < 2) {
        throw std::invalid_argument("ghz_process: n must be at least 2");
    }
    std::vector<Gate> gates;
    gates.push_back({"h", {0}, {}});
    if (n <= 4) {
        // Fanout doubling: every already-entangled qubit targets a fresh
        // one, so the CNOT depth is ceil(log2 n).
        int m = 1;
        while (m < n) {
            int spread = std::min(m, n - m);
            for (int i = 0; i < spread; ++i) {
                gates.push_back({"cx", {i, m + i}, {}});
            }
            m += spread;
        }
    } else {
        for (int i = 0; i + 1 < n; ++i) {
            gates.push_back({"cx", {i, i + 1}, {}});
        }
    }
    return ChannelSpec::from_gates(n, std::move(gates));
}

CVector ghz_state(int n) {
    Eigen::Index dim = Eigen::Index{1} << n;
    CVector v = CVector::Zero(dim);
    double a = 1.0 / std::sqrt(2.0);
    v[0] = a;
    v[dim - 1] = a;
    return v;
}

ChoiMatrix reduced_choi(const ChoiMatrix &choi, const std::vector<int> &subsystem) {
    if (subsystem.empty()) {
        throw std::invalid_argument("reduced_choi: subsystem must be non-empty");
    }
    std::vector<int> sorted = subsystem;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] >= choi.n) {
            throw std::invalid_argument("reduced_choi: subsystem index out of range");
        }
        if (i > 0 && sorted[i] == sorted[i - 1]) {
            throw std::invalid_argument("reduced_choi: duplicate subsystem index");
        }
    }
    int k = static_cast<int>(sorted.size());
    // Keep each subsystem qubit together with its input copy.
    std::vector<int> keep;
    for (int q : sorted) {
        keep.push_back(q);
    }
    for (int q : sorted) {
        keep.push_back(choi.n + q);
    }
    ChoiMatrix out;
    out.n = k;
    out.normalized = choi.normalized;
    out.mat = partial_trace_qubits(choi.mat, keep, 2 * choi.n) /
              std::pow(2.0, choi.n - k);
    return out;
}

static nlohmann::json matrix_to_json(const CMatrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

static CMatrix matrix_from_json(const nlohmann::json &j) {
    Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) {
        throw std::invalid_argument("channel_from_json: empty matrix");
    }
    Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto &cell = j[static_cast<size_t>(i)][static_cast<size_t>(c)];
            m(i, c) = Complex(cell[0].get<double>(), cell[1].get<double>());
        }
    }
    return m;
}

static nlohmann::json channel_json(const ChannelSpec &spec) {
    nlohmann::json j;
    j["n"] = spec.n;
    switch (spec.kind) {
        case ChannelSpec::Kind::unitary:
            j["kind"] = "unitary";
            j["u"] = matrix_to_json(spec.u);
            break;
        case ChannelSpec::Kind::gate_list: {
            j["kind"] = "gate_list";
            nlohmann::json gs = nlohmann::json::array();
            for (const Gate &g : spec.gates) {
                gs.push_back({{"name", g.name}, {"wires", g.wires}, {"params", g.params}});
            }
            j["gates"] = gs;
            break;
        }
        case ChannelSpec::Kind::hamiltonian: {
            j["kind"] = "hamiltonian";
            nlohmann::json ts = nlohmann::json::array();
            for (const auto &[c, p] : spec.ham.terms) {
                ts.push_back({{"c", c}, {"pauli", p.label()}});
            }
            j["ham"] = ts;
            j["t"] = spec.time;
            break;
        }
        case ChannelSpec::Kind::depolarized:
            j["kind"] = "depolarized";
            j["p"] = spec.noise;
            j["inner"] = channel_json(*spec.inner);
            break;
    }
    return j;
}

static ChannelSpec channel_from(const nlohmann::json &j) {
    std::string kind = j.at("kind").get<std::string>();
    int n = j.at("n").get<int>();
    if (kind == "unitary") {
        return ChannelSpec::from_unitary(n, matrix_from_json(j.at("u")));
    }
    if (kind == "gate_list") {
        std::vector<Gate> gates;
        for (const auto &g : j.at("gates")) {
            Gate gate;
            gate.name = g.at("name").get<std::string>();
            gate.wires = g.at("wires").get<std::vector<int>>();
            if (g.contains("params")) {
                gate.params = g.at("params").get<std::vector<double>>();
            }
            gates.push_back(std::move(gate));
        }
        return ChannelSpec::from_gates(n, std::move(gates));
    }
    if (kind == "hamiltonian") {
        HamiltonianTerms ht;
        ht.n = n;
        for (const auto &t : j.at("ham")) {
            ht.terms.emplace_back(t.at("c").get<double>(),
                                  PauliString::from_label(t.at("pauli").get<std::string>()));
        }
        return ChannelSpec::from_hamiltonian(std::move(ht), j.at("t").get<double>());
    }
    if (kind == "depolarized") {
        return ChannelSpec::depolarized_copy(channel_from(j.at("inner")),
                                             j.at("p").get<double>());
    }
    throw std::invalid_argument("channel_from_json: unknown kind " + kind);
}

std::string channel_to_json(const ChannelSpec &spec) { return channel_json(spec).dump(); }

ChannelSpec channel_from_json(const std::string &text) {
    return channel_from(nlohmann::json::parse(text));
}

}  // namespace shadowqpt
