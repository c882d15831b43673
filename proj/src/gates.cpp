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

#include "shadowqpt/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace shadowqpt {

int PauliString::weight() const {
    int w = 0;
    for (PauliOp op : ops) {
        if (op != PauliOp::I) {
            ++w;
        }
    }
    return w;
}

static char pauli_char(PauliOp op) {
    switch (op) {
        case PauliOp::I: return 'I';
        case PauliOp::X: return 'X';
        case PauliOp::Y: return 'Y';
        case PauliOp::Z: return 'Z';
    }
    return '?';
}

std::string PauliString::label() const {
    std::string out;
    if (phase == Complex(-1.0, 0.0)) {
        out += '-';
    } else if (phase == Complex(0.0, 1.0)) {
        out += 'i';
    } else if (phase == Complex(0.0, -1.0)) {
        out += "-i";
    }
    for (PauliOp op : ops) {
        out += pauli_char(op);
    }
    return out;
}

PauliString PauliString::identity_string(int n) {
    PauliString p;
    p.ops.assign(static_cast<size_t>(n), PauliOp::I);
    return p;
}

PauliString PauliString::from_label(const std::string &label) {
    PauliString p;
    size_t i = 0;
    if (i < label.size() && (label[i] == '+' || label[i] == '-')) {
        if (label[i] == '-') {
            p.phase = Complex(-1.0, 0.0);
        }
        ++i;
    }
    if (i < label.size() && label[i] == 'i') {
        p.phase *= Complex(0.0, 1.0);
        ++i;
    }
    for (; i < label.size(); ++i) {
        switch (label[i]) {
            case 'I': p.ops.push_back(PauliOp::I); break;
            case 'X': p.ops.push_back(PauliOp::X); break;
            case 'Y': p.ops.push_back(PauliOp::Y); break;
            case 'Z': p.ops.push_back(PauliOp::Z); break;
            default:
                throw std::invalid_argument("PauliString::from_label: bad character in " + label);
        }
    }
    return p;
}

PauliString PauliString::single(int n, int wire, PauliOp op) {
    if (wire < 0 || wire >= n) {
        throw std::invalid_argument("PauliString::single: wire out of range");
    }
    PauliString p = identity_string(n);
    p.ops[static_cast<size_t>(wire)] = op;
    return p;
}

// Single-qubit product table: result op and phase of a*b.
static void pauli_mul_1q(PauliOp a, PauliOp b, PauliOp *out, Complex *phase) {
    if (a == PauliOp::I) {
        *out = b;
        *phase = 1.0;
        return;
    }
    if (b == PauliOp::I) {
        *out = a;
        *phase = 1.0;
        return;
    }
    if (a == b) {
        *out = PauliOp::I;
        *phase = 1.0;
        return;
    }
    int ia = static_cast<int>(a), ib = static_cast<int>(b);
    // X=1, Y=2, Z=3; the remaining op is the one not equal to a or b.
    *out = static_cast<PauliOp>(6 - ia - ib);
    // Cyclic order X->Y->Z gives +i, anticyclic gives -i.
    bool cyclic = (ib - ia + 3) % 3 == 1;
    *phase = cyclic ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
}

PauliString pauli_mul(const PauliString &a, const PauliString &b) {
    if (a.ops.size() != b.ops.size()) {
        throw std::invalid_argument("pauli_mul: length mismatch");
    }
    PauliString out;
    out.ops.resize(a.ops.size());
    out.phase = a.phase * b.phase;
    for (size_t i = 0; i < a.ops.size(); ++i) {
        Complex ph;
        pauli_mul_1q(a.ops[i], b.ops[i], &out.ops[i], &ph);
        out.phase *= ph;
    }
    return out;
}

bool pauli_commutes(const PauliString &a, const PauliString &b) {
    if (a.ops.size() != b.ops.size()) {
        throw std::invalid_argument("pauli_commutes: length mismatch");
    }
    int anti = 0;
    for (size_t i = 0; i < a.ops.size(); ++i) {
        if (a.ops[i] != PauliOp::I && b.ops[i] != PauliOp::I && a.ops[i] != b.ops[i]) {
            ++anti;
        }
    }
    return anti % 2 == 0;
}

CMatrix pauli_matrix_1q(PauliOp op) {
    CMatrix m(2, 2);
    switch (op) {
        case PauliOp::I:
            m << 1, 0, 0, 1;
            break;
        case PauliOp::X:
            m << 0, 1, 1, 0;
            break;
        case PauliOp::Y:
            m << 0, Complex(0, -1), Complex(0, 1), 0;
            break;
        case PauliOp::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

CMatrix pauli_matrix(const PauliString &p) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (PauliOp op : p.ops) {
        out = kron(out, pauli_matrix_1q(op));
    }
    return p.phase * out;
}

Complex pauli_inner(const CMatrix &a, const PauliString &b) {
    int n = b.n();
    Eigen::Index dim = Eigen::Index{1} << n;
    if (a.rows() != dim || a.cols() != dim) {
        throw std::invalid_argument("pauli_inner: size mismatch");
    }
    // The Pauli maps |i> -> c_i |i ^ flip>, so tr(a*b) needs one matrix
    // entry per basis state.
    Eigen::Index flip = 0;
    for (int q = 0; q < n; ++q) {
        PauliOp op = b.ops[static_cast<size_t>(q)];
        if (op == PauliOp::X || op == PauliOp::Y) {
            flip |= Eigen::Index{1} << (n - 1 - q);
        }
    }
    Complex total = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        Complex c = b.phase;
        for (int q = 0; q < n; ++q) {
            Eigen::Index bit = (i >> (n - 1 - q)) & 1;
            switch (b.ops[static_cast<size_t>(q)]) {
                case PauliOp::I:
                case PauliOp::X:
                    break;
                case PauliOp::Y:
                    c *= bit ? Complex(0, -1) : Complex(0, 1);
                    break;
                case PauliOp::Z:
                    c *= bit ? -1.0 : 1.0;
                    break;
            }
        }
        total += a(i, i ^ flip) * c;
    }
    return total / static_cast<double>(dim);
}

const std::array<RotationLabel, 3> kRotationBasisSet = {RotationLabel::I, RotationLabel::H,
                                                        RotationLabel::SH};
const std::array<RotationLabel, 6> kRotationFullSet = {RotationLabel::I,  RotationLabel::H,
                                                       RotationLabel::SH, RotationLabel::X,
                                                       RotationLabel::HX, RotationLabel::SHX};

std::string rotation_label_name(RotationLabel r) {
    switch (r) {
        case RotationLabel::I: return "I";
        case RotationLabel::H: return "H";
        case RotationLabel::SH: return "SH";
        case RotationLabel::X: return "X";
        case RotationLabel::HX: return "HX";
        case RotationLabel::SHX: return "SHX";
    }
    throw std::invalid_argument("rotation_label_name: bad label");
}

RotationLabel rotation_label_from_name(const std::string &name) {
    for (RotationLabel r : kRotationFullSet) {
        if (rotation_label_name(r) == name) {
            return r;
        }
    }
    throw std::invalid_argument("rotation_label_from_name: unknown label " + name);
}

static CMatrix gate_h() {
    CMatrix m(2, 2);
    double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
}

static CMatrix gate_s() {
    CMatrix m(2, 2);
    m << 1, 0, 0, Complex(0, 1);
    return m;
}

CMatrix rotation_unitary(RotationLabel r) {
    CMatrix h = gate_h(), s = gate_s(), x = pauli_matrix_1q(PauliOp::X);
    switch (r) {
        case RotationLabel::I: return CMatrix::Identity(2, 2);
        case RotationLabel::H: return h;
        case RotationLabel::SH: return h * s;
        case RotationLabel::X: return x;
        case RotationLabel::HX: return x * h;
        case RotationLabel::SHX: return x * h * s;
    }
    throw std::invalid_argument("rotation_unitary: bad label");
}

CMatrix rotation_unitary(const std::vector<RotationLabel> &labels) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (RotationLabel r : labels) {
        out = kron(out, rotation_unitary(r));
    }
    return out;
}

std::vector<CVector> pauli6_states() {
    std::vector<CVector> out;
    CVector zero(2);
    zero << 1, 0;
    for (RotationLabel r : kRotationFullSet) {
        CVector psi = rotation_unitary(r).adjoint() * zero;
        // Strip the global phase so states print cleanly.
        for (Eigen::Index i = 0; i < 2; ++i) {
            if (std::abs(psi[i]) > 1e-12) {
                psi *= std::conj(psi[i]) / std::abs(psi[i]);
                break;
            }
        }
        out.push_back(psi);
    }
    return out;
}

std::vector<CMatrix> pauli6_effects() {
    std::vector<CMatrix> out;
    for (const CVector &psi : pauli6_states()) {
        out.push_back(psi * psi.adjoint() / 3.0);
    }
    return out;
}

CliffordElement CliffordElement::identity_element(int k) {
    CliffordElement c;
    c.k = k;
    c.x.assign(static_cast<size_t>(2 * k), 0);
    c.z.assign(static_cast<size_t>(2 * k), 0);
    c.sign.assign(static_cast<size_t>(2 * k), 0);
    for (int i = 0; i < k; ++i) {
        c.x[static_cast<size_t>(i)] = 1u << i;
        c.z[static_cast<size_t>(k + i)] = 1u << i;
    }
    return c;
}

static PauliString row_to_pauli(const CliffordElement &c, int row) {
    PauliString p = PauliString::identity_string(c.k);
    uint32_t xb = c.x[static_cast<size_t>(row)];
    uint32_t zb = c.z[static_cast<size_t>(row)];
    for (int q = 0; q < c.k; ++q) {
        bool hx = (xb >> q) & 1, hz = (zb >> q) & 1;
        PauliOp op = PauliOp::I;
        if (hx && hz) {
            op = PauliOp::Y;
        } else if (hx) {
            op = PauliOp::X;
        } else if (hz) {
            op = PauliOp::Z;
        }
        p.ops[static_cast<size_t>(q)] = op;
    }
    if (c.sign[static_cast<size_t>(row)]) {
        p.phase = -1.0;
    }
    return p;
}

PauliString CliffordElement::image_of_x(int i) const { return row_to_pauli(*this, i); }
PauliString CliffordElement::image_of_z(int i) const { return row_to_pauli(*this, k + i); }

namespace {

// Binary symplectic vectors packed as x | (z << k).
inline int symp_product(uint32_t a, uint32_t b, int k) {
    uint32_t mask = (1u << k) - 1;
    uint32_t ax = a & mask, az = a >> k;
    uint32_t bx = b & mask, bz = b >> k;
    return __builtin_popcount((ax & bz) ^ (az & bx)) & 1;
}

// Turns the symplectic constraint <c, u> = b into the ordinary linear
// constraint dot(Jc, u) = b, where J swaps the x and z halves.
inline uint32_t swap_halves(uint32_t c, int k) {
    uint32_t mask = (1u << k) - 1;
    return ((c & mask) << k) | (c >> k);
}

// Linear system over GF(2) kept in reduced row echelon form, used to draw
// uniform solutions.
struct F2System {
    int nbits;
    std::vector<uint32_t> rows;
    std::vector<int> pivots;
    std::vector<uint8_t> rhs;

    explicit F2System(int bits) : nbits(bits) {}

    void add(uint32_t r, int b) {
        for (size_t j = 0; j < rows.size(); ++j) {
            if ((r >> pivots[j]) & 1) {
                r ^= rows[j];
                b ^= rhs[j];
            }
        }
        if (r == 0) {
            if (b != 0) {
                throw std::logic_error("F2System: inconsistent constraint");
            }
            return;
        }
        int p = __builtin_ctz(r);
        for (size_t j = 0; j < rows.size(); ++j) {
            if ((rows[j] >> p) & 1) {
                rows[j] ^= r;
                rhs[j] = static_cast<uint8_t>(rhs[j] ^ b);
            }
        }
        rows.push_back(r);
        pivots.push_back(p);
        rhs.push_back(static_cast<uint8_t>(b));
    }

    // Uniform solution: free bits are drawn at random, pivot bits follow.
    uint32_t sample(RngStream &rng) const {
        uint32_t pivot_mask = 0;
        for (int p : pivots) {
            pivot_mask |= 1u << p;
        }
        uint32_t u = 0;
        for (int bit = 0; bit < nbits; ++bit) {
            if (!((pivot_mask >> bit) & 1) && rng.bit()) {
                u |= 1u << bit;
            }
        }
        for (size_t j = 0; j < rows.size(); ++j) {
            int val = (__builtin_popcount(rows[j] & u) & 1) ^ rhs[j];
            if (val) {
                u |= 1u << pivots[j];
            }
        }
        return u;
    }
};

}  // namespace

CliffordElement sample_clifford(int k, RngStream &rng) {
    if (k < 1 || k > 8) {
        throw std::invalid_argument("sample_clifford: k must be in 1..8");
    }
    int bits = 2 * k;
    std::vector<uint32_t> vs, ws;
    for (int i = 0; i < k; ++i) {
        F2System orth(bits);
        for (int j = 0; j < i; ++j) {
            orth.add(swap_halves(vs[static_cast<size_t>(j)], k), 0);
            orth.add(swap_halves(ws[static_cast<size_t>(j)], k), 0);
        }
        uint32_t v = 0;
        do {
            v = orth.sample(rng);
        } while (v == 0);
        F2System pair = orth;
        pair.add(swap_halves(v, k), 1);
        uint32_t w = pair.sample(rng);
        vs.push_back(v);
        ws.push_back(w);
    }
    CliffordElement c;
    c.k = k;
    uint32_t mask = (1u << k) - 1;
    c.x.resize(static_cast<size_t>(bits));
    c.z.resize(static_cast<size_t>(bits));
    c.sign.resize(static_cast<size_t>(bits));
    for (int i = 0; i < k; ++i) {
        c.x[static_cast<size_t>(i)] = vs[static_cast<size_t>(i)] & mask;
        c.z[static_cast<size_t>(i)] = vs[static_cast<size_t>(i)] >> k;
        c.x[static_cast<size_t>(k + i)] = ws[static_cast<size_t>(i)] & mask;
        c.z[static_cast<size_t>(k + i)] = ws[static_cast<size_t>(i)] >> k;
    }
    for (int r = 0; r < bits; ++r) {
        c.sign[static_cast<size_t>(r)] = static_cast<uint8_t>(rng.bit() ? 1 : 0);
    }
    return c;
}

bool clifford_is_valid(const CliffordElement &c) {
    int k = c.k;
    if (static_cast<int>(c.x.size()) != 2 * k || static_cast<int>(c.z.size()) != 2 * k ||
        static_cast<int>(c.sign.size()) != 2 * k) {
        return false;
    }
    auto packed = [&](int row) {
        return c.x[static_cast<size_t>(row)] | (c.z[static_cast<size_t>(row)] << k);
    };
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (symp_product(packed(i), packed(j), k) != 0) return false;
            if (symp_product(packed(k + i), packed(k + j), k) != 0) return false;
            int want = (i == j) ? 1 : 0;
            if (symp_product(packed(i), packed(k + j), k) != want) return false;
        }
    }
    return true;
}

CMatrix clifford_to_unitary(const CliffordElement &c) {
    if (!clifford_is_valid(c)) {
        throw std::invalid_argument("clifford_to_unitary: tableau violates symplectic constraints");
    }
    int k = c.k;
    Eigen::Index dim = Eigen::Index{1} << k;

    // The image of the all-zeros state is the state stabilized by the
    // Z-row images; project it out of the identity.
    CMatrix st = CMatrix::Identity(dim, dim);
    for (int i = 0; i < k; ++i) {
        CMatrix q = pauli_matrix(c.image_of_z(i));
        st = 0.5 * (st + q * st);
    }
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index col = 0; col < dim; ++col) {
        double nn = st.col(col).norm();
        if (nn > best_norm + 1e-12) {
            best_norm = nn;
            best = col;
        }
    }
    if (best_norm < 1e-9) {
        throw std::runtime_error("clifford_to_unitary: stabilizer projector vanished");
    }
    CVector psi0 = st.col(best) / best_norm;

    std::vector<CMatrix> p_images;
    for (int i = 0; i < k; ++i) {
        p_images.push_back(pauli_matrix(c.image_of_x(i)));
    }

    // Column b is the image of |b>: apply the X-row images selected by the
    // bits of b. The images commute, so order does not matter.
    CMatrix u(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        CVector v = psi0;
        for (int i = 0; i < k; ++i) {
            if ((b >> (k - 1 - i)) & 1) {
                v = p_images[static_cast<size_t>(i)] * v;
            }
        }
        u.col(b) = v;
    }

    // Canonical global phase: first nonzero entry of column 0 made real
    // and positive.
    for (Eigen::Index r = 0; r < dim; ++r) {
        Complex entry = u(r, 0);
        if (std::abs(entry) > 1e-9) {
            u *= std::conj(entry) / std::abs(entry);
            break;
        }
    }
    return u;
}

std::vector<uint64_t> clifford_pack(const CliffordElement &c) {
    std::vector<uint64_t> out;
    for (int r = 0; r < 2 * c.k; ++r) {
        out.push_back(c.x[static_cast<size_t>(r)]);
        out.push_back(c.z[static_cast<size_t>(r)]);
        out.push_back(c.sign[static_cast<size_t>(r)]);
    }
    return out;
}

CliffordElement clifford_unpack(int k, const std::vector<uint64_t> &packed) {
    if (k < 1 || k > 8 || packed.size() != static_cast<size_t>(6 * k)) {
        throw std::invalid_argument("clifford_unpack: bad payload size");
    }
    CliffordElement c;
    c.k = k;
    c.x.resize(static_cast<size_t>(2 * k));
    c.z.resize(static_cast<size_t>(2 * k));
    c.sign.resize(static_cast<size_t>(2 * k));
    uint32_t mask = (1u << k) - 1;
    for (int r = 0; r < 2 * k; ++r) {
        uint64_t xv = packed[static_cast<size_t>(3 * r)];
        uint64_t zv = packed[static_cast<size_t>(3 * r + 1)];
        uint64_t sv = packed[static_cast<size_t>(3 * r + 2)];
        if (xv > mask || zv > mask || sv > 1) {
            throw std::invalid_argument("clifford_unpack: row value out of range");
        }
        c.x[static_cast<size_t>(r)] = static_cast<uint32_t>(xv);
        c.z[static_cast<size_t>(r)] = static_cast<uint32_t>(zv);
        c.sign[static_cast<size_t>(r)] = static_cast<uint8_t>(sv);
    }
    if (!clifford_is_valid(c)) {
        throw std::invalid_argument("clifford_unpack: tableau violates symplectic constraints");
    }
    return c;
}

}  // namespace shadowqpt
