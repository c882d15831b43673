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

#ifndef SHADOWQPT_CHANNELS_HPP
#define SHADOWQPT_CHANNELS_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shadowqpt/gates.hpp"
#include "shadowqpt/qmat.hpp"
#include "shadowqpt/rng.hpp"

namespace shadowqpt {

// One gate in a circuit. Supported names: "h", "x", "y", "z", "s", "sdg",
// "cx" (wires = control, target), "rx"/"ry"/"rz" (params = angle).
struct Gate {
    std::string name;
    std::vector<int> wires;
    std::vector<double> params;
};

CMatrix gate_unitary(const Gate &g, int n);
CMatrix circuit_unitary(const std::vector<Gate> &gates, int n);
// Depth under greedy layering: gates pack into the earliest layer whose
// wires are still free.
int circuit_depth(const std::vector<Gate> &gates);

struct HamiltonianTerms {
    int n = 0;
    std::vector<std::pair<double, PauliString>> terms;
};

CMatrix hamiltonian_matrix(const HamiltonianTerms &h);

// Transverse-field Ising model on an open chain:
//   H = sum_i J_i X_i X_{i+1} + sum_i h_i Z_i,
// with the two-body terms listed before the field terms.
HamiltonianTerms tfim_hamiltonian(int n, const std::vector<double> &J,
                                  const std::vector<double> &h);
// TFIM with all couplings drawn uniformly from [-1, 1).
HamiltonianTerms random_tfim(int n, RngStream &rng);

// Description of an n-qubit channel to simulate.
struct ChannelSpec {
    enum class Kind { unitary, gate_list, hamiltonian, depolarized };
    Kind kind = Kind::unitary;
    int n = 0;
    CMatrix u;                          // unitary
    std::vector<Gate> gates;            // gate_list
    HamiltonianTerms ham;               // hamiltonian
    double time = 0.0;                  // hamiltonian
    std::shared_ptr<const ChannelSpec> inner;  // depolarized
    double noise = 0.0;                        // depolarized

    static ChannelSpec from_unitary(int n, CMatrix u);
    static ChannelSpec from_gates(int n, std::vector<Gate> gates);
    static ChannelSpec from_hamiltonian(HamiltonianTerms ham, double time);
    static ChannelSpec depolarized_copy(ChannelSpec base, double noise);
};

// The dense unitary of the noiseless part of a spec.
CMatrix channel_unitary(const ChannelSpec &spec);

// Combined depolarizing strength of (possibly nested) depolarized wrappers;
// 0 for noiseless specs.
double total_depolarizing(const ChannelSpec &spec);

// Unnormalized Choi matrix (trace 2^n) of U acting on n qubits:
// apply (I (x) U) to n maximally entangled pairs laid out with all input
// copies before all outputs, and scale by 2^n.
ChoiMatrix choi_from_unitary(const CMatrix &u, int n);

// Exact Choi matrix of a spec, including the depolarized wrapper
// (1-p) * Choi + p * I / 2^n.
ChoiMatrix choi_of(const ChannelSpec &spec);

// Channel action on an input density matrix:
// E(rho) = tr_in[(rho^T (x) I) * Choi].
CMatrix apply_channel(const ChoiMatrix &choi, const CMatrix &rho_in);

// GHZ-preparation circuit as a process: H on qubit 0 followed by a CNOT
// fanout arranged to keep the depth low.
ChannelSpec ghz_process(int n);
// The GHZ state itself, as a dense vector.
CVector ghz_state(int n);

// Choi matrix of the channel restricted to a subset of wires: trace out
// the other (input, output) pairs and renormalize so the result again has
// trace 2^k.
ChoiMatrix reduced_choi(const ChoiMatrix &choi, const std::vector<int> &subsystem);

std::string channel_to_json(const ChannelSpec &spec);
ChannelSpec channel_from_json(const std::string &text);

}  // namespace shadowqpt

#endif
