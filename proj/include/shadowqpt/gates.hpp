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

#ifndef SHADOWQPT_GATES_HPP
#define SHADOWQPT_GATES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shadowqpt/qmat.hpp"
#include "shadowqpt/rng.hpp"

namespace shadowqpt {

enum class PauliOp : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

// Tensor product of single-qubit Paulis with an overall phase. ops[0] acts
// on the most significant qubit.
struct PauliString {
    std::vector<PauliOp> ops;
    Complex phase = Complex(1.0, 0.0);

    int n() const { return static_cast<int>(ops.size()); }
    int weight() const;
    std::string label() const;

    static PauliString identity_string(int n);
    // Parses labels like "XIZ" or "-YY". Accepts a leading '+', '-', "i",
    // "-i" phase prefix.
    static PauliString from_label(const std::string &label);
    // Identity everywhere except `op` on `wire`.
    static PauliString single(int n, int wire, PauliOp op);
};

// Product a * b with the correct phase.
PauliString pauli_mul(const PauliString &a, const PauliString &b);
bool pauli_commutes(const PauliString &a, const PauliString &b);

CMatrix pauli_matrix_1q(PauliOp op);
CMatrix pauli_matrix(const PauliString &p);

// tr(A B) / 2^n for an n-qubit operator pair, with B a Pauli string. Uses
// the tensor structure, never forming the dense Pauli.
Complex pauli_inner(const CMatrix &a, const PauliString &b);

// Single-qubit measurement-frame rotations, named by the gates applied in
// temporal order: "SH" means apply S first, then H, so its matrix is H*S.
enum class RotationLabel : uint8_t { I = 0, H = 1, SH = 2, X = 3, HX = 4, SHX = 5 };

extern const std::array<RotationLabel, 3> kRotationBasisSet;  // {I, H, SH}
extern const std::array<RotationLabel, 6> kRotationFullSet;   // all six

std::string rotation_label_name(RotationLabel r);
RotationLabel rotation_label_from_name(const std::string &name);
CMatrix rotation_unitary(RotationLabel r);
CMatrix rotation_unitary(const std::vector<RotationLabel> &labels);

// The six states U^dag|0> for U in the full rotation set, i.e. the states
// whose projectors, scaled by 1/3, form the measurement POVM realized by
// drawing a uniform label and measuring in the computed basis.
std::vector<CVector> pauli6_states();
// The corresponding rank-1 effects |psi><psi| / 3.
std::vector<CMatrix> pauli6_effects();

// Clifford group element on k qubits, stored as a stabilizer tableau.
// Row i of (x, z, sign) encodes the image of X_i for i < k and of Z_{i-k}
// for i >= k: the Pauli with X support x[i], Z support z[i] (bit q is
// qubit q) and sign (-1)^sign[i]. Images of Hermitian generators are
// Hermitian, so a sign bit suffices.
struct CliffordElement {
    int k = 0;
    std::vector<uint32_t> x, z;
    std::vector<uint8_t> sign;

    static CliffordElement identity_element(int k);
    PauliString image_of_x(int i) const;
    PauliString image_of_z(int i) const;
    bool operator==(const CliffordElement &other) const = default;
};

// Uniformly random element of the Clifford group on k qubits (1 <= k <= 8),
// drawn by completing a random symplectic basis row pair at a time and
// attaching uniform sign bits.
CliffordElement sample_clifford(int k, RngStream &rng);

// Dense 2^k x 2^k unitary realizing the tableau. The global phase is fixed
// by making the first nonzero entry of column 0 real and positive.
CMatrix clifford_to_unitary(const CliffordElement &c);

// Validates the symplectic constraints of a tableau.
bool clifford_is_valid(const CliffordElement &c);

// Serialization helper: packs rows as "x_bits z_bits sign" integer triples.
std::vector<uint64_t> clifford_pack(const CliffordElement &c);
CliffordElement clifford_unpack(int k, const std::vector<uint64_t> &packed);

}  // namespace shadowqpt

#endif
