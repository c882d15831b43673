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

#ifndef SHADOWQPT_SHADOWS_HPP
#define SHADOWQPT_SHADOWS_HPP

#include <cstdint>
#include <vector>

#include "shadowqpt/acquire.hpp"
#include "shadowqpt/qmat.hpp"

namespace shadowqpt {

// One single-measurement estimate of the Choi matrix, kept factorized as
// small per-block matrices over the 2n-wire doubled register. The dense
// snapshot is 2^n times the kron of the blocks; each block has trace 1, so
// every snapshot has trace exactly 2^n.
struct SnapshotBlock {
    std::vector<int> wires;
    CMatrix mat;
};

struct ShadowSnapshot {
    int n = 0;
    std::vector<SnapshotBlock> blocks;
};

// Inverse of the k-qubit random-Clifford measurement channel on trace-1
// inputs: (2^k + 1) x - I.
CMatrix inverse_channel(const CMatrix &x, int k);

// Snapshot for one repetition of a record. Each block rotates the observed
// bits back through its unitary and applies the inverse channel; for
// two-sided records the input-side blocks contribute the transposed
// prepared-state projector instead of a measured one.
ShadowSnapshot snapshot(const MeasurementRecord &record, int rep_index);

// Dense 4^n realization, wires in register order, including the 2^n factor.
CMatrix densify(const ShadowSnapshot &snap);

struct EstimatorConfig {
    enum class Aggregation { mean, median_of_means };
    enum class BatchLevel { shadow, unitary };
    Aggregation aggregation = Aggregation::mean;
    int batches = 23;   // used by median_of_means
    BatchLevel level = BatchLevel::shadow;

    static EstimatorConfig mean();
    static EstimatorConfig median_of_means(int batches = 23,
                                           BatchLevel level = BatchLevel::shadow);
};

// Aggregates all snapshots of all records into an unnormalized Choi
// estimate. Mean aggregation is the arithmetic average; median-of-means
// splits snapshots round-robin into K batches (by snapshot index or by
// record index) and returns the batch mean closest to the others in
// summed Frobenius distance.
ChoiMatrix estimate_choi(const std::vector<MeasurementRecord> &records,
                         const EstimatorConfig &cfg = EstimatorConfig::mean());

// Estimate of the channel restricted to `subsystem`, built by dropping the
// complementary blocks of each snapshot (valid because dropped blocks have
// unit trace). Clifford blocks that straddle the subsystem boundary are an
// error.
ChoiMatrix estimate_reduced(const std::vector<MeasurementRecord> &records,
                            const std::vector<int> &subsystem,
                            const EstimatorConfig &cfg = EstimatorConfig::mean());

// tr(E(rho_in) sigma) for the exact or estimated channel.
double overlap_of(const ChoiMatrix &choi, const CMatrix &rho_in, const CMatrix &sigma);

// Same overlap aggregated from records snapshot-by-snapshot, honoring the
// estimator config (mean aggregation reduces to overlap_of of the mean).
double estimate_overlap(const std::vector<MeasurementRecord> &records, const CMatrix &rho_in,
                        const CMatrix &sigma,
                        const EstimatorConfig &cfg = EstimatorConfig::mean());

// tr(L^2)/4^n of an estimate; exceeds 1 only for unprojected estimates.
double estimate_purity(const ChoiMatrix &l);

// Measurement counts sufficient for reduced-process estimation at additive
// error eps with failure probability delta, for all size-k subsystems of an
// n-qubit channel.
enum class ReducedBound { global_clifford, pauli6_frobenius, pauli6_trace };
int64_t bound_reduced(int n, int k, double eps, double delta, ReducedBound scheme);

// Measurement counts sufficient to predict M pure-state overlaps to eps.
// The single-qubit variant depends on the observable locality k.
enum class OverlapBound { global_clifford_pure, single_qubit_clifford_pure };
int64_t bound_overlap(int64_t m, double eps, double delta, OverlapBound scheme, int k = 1);

}  // namespace shadowqpt

#endif
