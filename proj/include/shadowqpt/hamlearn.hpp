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

#ifndef SHADOWQPT_HAMLEARN_HPP
#define SHADOWQPT_HAMLEARN_HPP

#include <cstdint>
#include <vector>

#include "shadowqpt/acquire.hpp"
#include "shadowqpt/channels.hpp"
#include "shadowqpt/shadows.hpp"

namespace shadowqpt {

// A probe pair for one Hamiltonian term: p is evolved through the channel,
// q picks out the commutator response. kappa is the exact Pauli-algebra
// scalar in [h, p] = kappa * q, divided out so the recovered coefficient
// carries no convention factors.
struct Probe {
    PauliString p;
    PauliString q;
    Complex kappa;
    size_t term_index = 0;
};

// Probes for a transverse-field Ising Hamiltonian: two-body terms X_i
// X_{i+1} use p = Z_i with q = -Y_i X_{i+1}; field terms Z_i use p = X_i
// with q = Y_i. Terms outside these patterns are rejected.
std::vector<Probe> default_probes(const HamiltonianTerms &ht);

// Coefficient recovery from a (possibly estimated) Choi matrix:
// c_i = Re[ i * tr(E(p_i) q_i) / (2^n t kappa_i) ].
std::vector<double> estimate_coefficients(const ChoiMatrix &choi_est,
                                          const std::vector<Probe> &probes, double t);

// Same contraction evaluated per snapshot over factorized records, never
// densifying; identical to the mean-estimate result.
std::vector<double> estimate_coefficients_streamed(
    const std::vector<MeasurementRecord> &records, const std::vector<Probe> &probes,
    double t);

// The coefficients the estimator converges to at finite t (exact-channel
// reference); approaches the true couplings as t -> 0 with O(t^2) error.
std::vector<double> renormalized_coefficients(const ChoiMatrix &exact_choi,
                                              const std::vector<Probe> &probes, double t);

// Exact-reference route through the dense 2^n propagator, avoiding the
// 4^n Choi matrix for larger chains.
std::vector<double> renormalized_from_terms(const HamiltonianTerms &ht,
                                            const std::vector<Probe> &probes, double t);

struct HamLearnTask {
    HamiltonianTerms ht;        // ground truth, used only to simulate
    std::vector<Probe> probes;
    double t = 0.1;
    int64_t shots = 100000;
    Scheme scheme = Scheme::two_sided;
};

struct HamLearnResult {
    std::vector<double> estimates;
    std::vector<double> renormalized;
    std::vector<double> true_coeffs;
    double mean_abs_error = 0.0;    // <|estimate - true|>
    double systematic_error = 0.0;  // <|renormalized - true|>
    double statistical_error = 0.0; // <|estimate - renormalized|>
};

// Simulates shots random Pauli measurements of exp(-iHt) and recovers the
// couplings.
HamLearnResult run_hamlearn(const HamLearnTask &task, uint64_t seed);

// Measurements sufficient to learn k-local coefficients to error eps with
// failure probability delta.
int64_t bound_hamlearn(int n, int k, double t, double eps, double delta);

}  // namespace shadowqpt

#endif
