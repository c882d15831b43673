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

#include "shadowqpt/hamlearn.hpp"

#include <cmath>
#include <stdexcept>

namespace shadowqpt {

// kappa such that [h, p] = kappa * q, verified through the Pauli algebra.
static Complex commutator_scalar(const PauliString &h, const PauliString &p,
                                 const PauliString &q) {
    if (pauli_commutes(h, p)) {
        throw std::invalid_argument("default_probes: probe commutes with its term");
    }
    // For anticommuting Paulis [h,p] = 2 h p.
    PauliString hp = pauli_mul(h, p);
    if (hp.ops != q.ops) {
        throw std::invalid_argument("default_probes: commutator does not match declared q");
    }
    return 2.0 * hp.phase / q.phase;
}

std::vector<Probe> default_probes(const HamiltonianTerms &ht) {
    int n = ht.n;
    std::vector<Probe> probes;
    for (size_t i = 0; i < ht.terms.size(); ++i) {
        const PauliString &h = ht.terms[i].second;
        Probe probe;
        probe.term_index = i;
        int w = -1;
        int weight = h.weight();
        for (int q = 0; q < n; ++q) {
            if (h.ops[static_cast<size_t>(q)] != PauliOp::I) {
                w = q;
                break;
            }
        }
        bool coupling = weight == 2 && w + 1 < n && h.ops[static_cast<size_t>(w)] == PauliOp::X &&
                        h.ops[static_cast<size_t>(w + 1)] == PauliOp::X;
        bool field = weight == 1 && h.ops[static_cast<size_t>(w)] == PauliOp::Z;
        if (coupling) {
            probe.p = PauliString::single(n, w, PauliOp::Z);
            probe.q = PauliString::identity_string(n);
            probe.q.ops[static_cast<size_t>(w)] = PauliOp::Y;
            probe.q.ops[static_cast<size_t>(w + 1)] = PauliOp::X;
            probe.q.phase = -1.0;
        } else if (field) {
            probe.p = PauliString::single(n, w, PauliOp::X);
            probe.q = PauliString::single(n, w, PauliOp::Y);
        } else {
            throw std::invalid_argument("default_probes: no probe rule for term " + h.label());
        }
        probe.kappa = commutator_scalar(h, probe.p, probe.q);
        probes.push_back(std::move(probe));
    }
    return probes;
}

static std::vector<double> coefficients_from_action(
    const std::vector<CMatrix> &evolved_probes, const std::vector<Probe> &probes, int n,
    double t) {
    if (t == 0.0) {
        throw std::invalid_argument("coefficient recovery: t must be nonzero");
    }
    std::vector<double> out;
    for (size_t i = 0; i < probes.size(); ++i) {
        Complex inner = pauli_inner(evolved_probes[i], probes[i].q);
        out.push_back((Complex(0.0, 1.0) * inner / (t * probes[i].kappa)).real());
    }
    return out;
}

std::vector<double> estimate_coefficients(const ChoiMatrix &choi_est,
                                          const std::vector<Probe> &probes, double t) {
    std::vector<CMatrix> evolved;
    for (const Probe &probe : probes) {
        evolved.push_back(apply_channel(choi_est, pauli_matrix(probe.p)));
    }
    return coefficients_from_action(evolved, probes, choi_est.n, t);
}

std::vector<double> renormalized_coefficients(const ChoiMatrix &exact_choi,
                                              const std::vector<Probe> &probes, double t) {
    return estimate_coefficients(exact_choi, probes, t);
}

std::vector<double> renormalized_from_terms(const HamiltonianTerms &ht,
                                            const std::vector<Probe> &probes, double t) {
    CMatrix u = expm_i_hermitian(hamiltonian_matrix(ht), t);
    std::vector<CMatrix> evolved;
    for (const Probe &probe : probes) {
        evolved.push_back(u * pauli_matrix(probe.p) * u.adjoint());
    }
    return coefficients_from_action(evolved, probes, ht.n, t);
}

// Per-wire factor of (p^T (x) q) on the doubled register: the transposed
// probe letter on input wires, the response letter on output wires. The
// string phases multiply once per snapshot.
static CMatrix wire_factor(const Probe &probe, int n, int wire) {
    if (wire < n) {
        return pauli_matrix_1q(probe.p.ops[static_cast<size_t>(wire)]).transpose();
    }
    return pauli_matrix_1q(probe.q.ops[static_cast<size_t>(wire - n)]);
}

std::vector<double> estimate_coefficients_streamed(
    const std::vector<MeasurementRecord> &records, const std::vector<Probe> &probes,
    double t) {
    if (t == 0.0) {
        throw std::invalid_argument("estimate_coefficients_streamed: t must be nonzero");
    }
    if (records.empty()) {
        throw std::invalid_argument("estimate_coefficients_streamed: no records");
    }
    int n = records[0].setting.n;
    for (const Probe &probe : probes) {
        if (probe.p.n() != n || probe.q.n() != n) {
            throw std::invalid_argument("estimate_coefficients_streamed: probe length mismatch");
        }
    }
    std::vector<Complex> sums(probes.size(), Complex(0.0, 0.0));
    int64_t count = 0;
    for (const MeasurementRecord &rec : records) {
        for (size_t rep = 0; rep < rec.outcomes.size(); ++rep) {
            ShadowSnapshot snap = snapshot(rec, static_cast<int>(rep));
            for (size_t i = 0; i < probes.size(); ++i) {
                // tr[(p^T (x) q) L-hat] / 2^n factorizes over blocks; the
                // snapshot's 2^n cancels the inner-product normalization.
                Complex value = probes[i].p.phase * probes[i].q.phase;
                for (const SnapshotBlock &blk : snap.blocks) {
                    std::vector<CMatrix> factors;
                    for (int w : blk.wires) {
                        factors.push_back(wire_factor(probes[i], n, w));
                    }
                    value *= (kron_all(factors) * blk.mat).trace();
                    if (value == Complex(0.0, 0.0)) {
                        break;
                    }
                }
                sums[i] += value;
            }
            ++count;
        }
    }
    std::vector<double> out;
    for (size_t i = 0; i < probes.size(); ++i) {
        Complex inner = sums[i] / static_cast<double>(count);
        out.push_back((Complex(0.0, 1.0) * inner / (t * probes[i].kappa)).real());
    }
    return out;
}

HamLearnResult run_hamlearn(const HamLearnTask &task, uint64_t seed) {
    int n = task.ht.n;
    if (n > 8) {
        throw std::invalid_argument("run_hamlearn: n exceeds dense simulation range");
    }
    ChannelSpec spec = ChannelSpec::from_hamiltonian(task.ht, task.t);
    // Acquire in chunks to bound memory at large shot counts; the
    // per-setting RNG streams make this identical to a single pass.
    const int64_t chunk = 8192;
    std::vector<double> weighted(task.probes.size(), 0.0);
    int64_t done = 0;
    while (done < task.shots) {
        int batch = static_cast<int>(std::min(chunk, task.shots - done));
        std::vector<MeasurementRecord> records;
        if (task.scheme == Scheme::two_sided) {
            records = acquire_two_sided(spec, batch, 1, seed, static_cast<int>(done));
        } else {
            records = acquire_ancilla(spec, PairingPlan::pauli(), batch, 1, seed,
                                      static_cast<int>(done));
        }
        std::vector<double> part = estimate_coefficients_streamed(records, task.probes, task.t);
        for (size_t i = 0; i < part.size(); ++i) {
            weighted[i] += part[i] * static_cast<double>(batch);
        }
        done += batch;
    }
    HamLearnResult result;
    result.estimates = weighted;
    for (double &v : result.estimates) {
        v /= static_cast<double>(task.shots);
    }
    result.renormalized = renormalized_from_terms(task.ht, task.probes, task.t);
    for (const Probe &probe : task.probes) {
        result.true_coeffs.push_back(task.ht.terms[probe.term_index].first);
    }
    double sum_true = 0.0, sum_sys = 0.0, sum_stat = 0.0;
    for (size_t i = 0; i < task.probes.size(); ++i) {
        sum_true += std::abs(result.estimates[i] - result.true_coeffs[i]);
        sum_sys += std::abs(result.renormalized[i] - result.true_coeffs[i]);
        sum_stat += std::abs(result.estimates[i] - result.renormalized[i]);
    }
    double m = static_cast<double>(task.probes.size());
    result.mean_abs_error = sum_true / m;
    result.systematic_error = sum_sys / m;
    result.statistical_error = sum_stat / m;
    return result;
}

int64_t bound_hamlearn(int n, int k, double t, double eps, double delta) {
    if (!(eps > 0.0 && eps <= 1.0) || !(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("bound_hamlearn: eps in (0,1], delta in (0,1)");
    }
    if (t <= 0.0) {
        throw std::invalid_argument("bound_hamlearn: t must be positive");
    }
    if (k < 1 || n < 1) {
        throw std::invalid_argument("bound_hamlearn: k and n must be positive");
    }
    double value = std::pow(36.0, k) / (t * t * eps * eps) * 2.0 * k * std::log(8.0 * n) *
                   std::log(1.0 / delta);
    return static_cast<int64_t>(std::ceil(value));
}

}  // namespace shadowqpt
