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

#include "shadowqpt/shadows.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace shadowqpt {

CMatrix inverse_channel(const CMatrix &x, int k) {
    Eigen::Index dim = Eigen::Index{1} << k;
    if (x.rows() != dim || x.cols() != dim) {
        throw std::invalid_argument("inverse_channel: dimension mismatch");
    }
    double factor = static_cast<double>(dim) + 1.0;
    return factor * x - CMatrix::Identity(dim, dim);
}

static Eigen::Index outcome_bits(const std::string &outcome, const std::vector<int> &wires,
                                 int offset) {
    Eigen::Index b = 0;
    for (int w : wires) {
        int pos = w - offset;
        if (pos < 0 || pos >= static_cast<int>(outcome.size())) {
            throw std::invalid_argument("snapshot: wire outside measured register");
        }
        b = (b << 1) | (outcome[static_cast<size_t>(pos)] == '1' ? 1 : 0);
    }
    return b;
}

ShadowSnapshot snapshot(const MeasurementRecord &record, int rep_index) {
    if (rep_index < 0 || rep_index >= static_cast<int>(record.outcomes.size())) {
        throw std::invalid_argument("snapshot: rep_index out of range");
    }
    const UnitarySetting &setting = record.setting;
    const std::string &outcome = record.outcomes[static_cast<size_t>(rep_index)];
    ShadowSnapshot snap;
    snap.n = setting.n;
    for (const SettingBlock &blk : setting.blocks) {
        int k = blk.arity();
        CMatrix u = blk.unitary();
        SnapshotBlock out;
        out.wires = blk.wires;
        bool input_side = setting.scheme == Scheme::two_sided && blk.wires[0] < setting.n;
        if (input_side) {
            // The prepared state U_L^dag|0> enters the estimator through
            // its transpose; invert afterwards as for a measured effect.
            CVector psi = u.adjoint().col(0);
            CMatrix proj = (psi * psi.adjoint()).transpose();
            out.mat = inverse_channel(proj, k);
        } else {
            int offset = setting.scheme == Scheme::two_sided ? setting.n : 0;
            Eigen::Index b = outcome_bits(outcome, blk.wires, offset);
            CVector v = u.row(b).adjoint();  // = U^dag |b>
            out.mat = inverse_channel(v * v.adjoint(), k);
        }
        snap.blocks.push_back(std::move(out));
    }
    return snap;
}

CMatrix densify(const ShadowSnapshot &snap) {
    int width = 2 * snap.n;
    std::vector<CMatrix> factors;
    std::vector<int> order;
    for (const SnapshotBlock &b : snap.blocks) {
        factors.push_back(b.mat);
        for (int w : b.wires) {
            order.push_back(w);
        }
    }
    if (static_cast<int>(order.size()) != width) {
        throw std::invalid_argument("densify: blocks do not cover the register");
    }
    CMatrix k = kron_all(factors);
    bool sorted = std::is_sorted(order.begin(), order.end());
    if (!sorted) {
        std::vector<int> perm(static_cast<size_t>(width));
        for (int slot = 0; slot < width; ++slot) {
            auto it = std::find(order.begin(), order.end(), slot);
            if (it == order.end()) {
                throw std::invalid_argument("densify: missing wire");
            }
            perm[static_cast<size_t>(slot)] = static_cast<int>(it - order.begin());
        }
        k = apply_qubit_permutation(k, perm);
    }
    return std::pow(2.0, snap.n) * k;
}

EstimatorConfig EstimatorConfig::mean() { return EstimatorConfig{}; }

EstimatorConfig EstimatorConfig::median_of_means(int batches, BatchLevel level) {
    EstimatorConfig c;
    c.aggregation = Aggregation::median_of_means;
    c.batches = batches;
    c.level = level;
    return c;
}

namespace {

void check_records(const std::vector<MeasurementRecord> &records) {
    if (records.empty()) {
        throw std::invalid_argument("estimate: no records");
    }
    for (const MeasurementRecord &r : records) {
        if (r.setting.scheme != records[0].setting.scheme || r.setting.n != records[0].setting.n) {
            throw std::invalid_argument("estimate: records mix schemes or sizes");
        }
    }
}

// Among the batch means, pick the one minimizing the summed Frobenius
// distance to the others; with one batch this is the mean itself.
CMatrix matrix_median(const std::vector<CMatrix> &mats) {
    if (mats.size() == 1) {
        return mats[0];
    }
    size_t best = 0;
    double best_score = -1.0;
    for (size_t i = 0; i < mats.size(); ++i) {
        double score = 0.0;
        for (size_t j = 0; j < mats.size(); ++j) {
            if (i != j) {
                score += (mats[i] - mats[j]).norm();
            }
        }
        if (best_score < 0.0 || score < best_score) {
            best_score = score;
            best = i;
        }
    }
    return mats[best];
}

double scalar_median(const std::vector<double> &vals) {
    if (vals.size() == 1) {
        return vals[0];
    }
    size_t best = 0;
    double best_score = -1.0;
    for (size_t i = 0; i < vals.size(); ++i) {
        double score = 0.0;
        for (size_t j = 0; j < vals.size(); ++j) {
            score += std::abs(vals[i] - vals[j]);
        }
        if (best_score < 0.0 || score < best_score) {
            best_score = score;
            best = i;
        }
    }
    return vals[best];
}

// Round-robin batch index for one snapshot under the config.
size_t batch_of(const EstimatorConfig &cfg, size_t record_index, size_t snapshot_index) {
    size_t k = static_cast<size_t>(cfg.batches);
    if (cfg.level == EstimatorConfig::BatchLevel::unitary) {
        return record_index % k;
    }
    return snapshot_index % k;
}

template <typename PerSnapshot>
void for_each_snapshot(const std::vector<MeasurementRecord> &records, PerSnapshot &&fn) {
    size_t snapshot_index = 0;
    for (size_t r = 0; r < records.size(); ++r) {
        for (size_t rep = 0; rep < records[r].outcomes.size(); ++rep) {
            fn(r, static_cast<int>(rep), snapshot_index);
            ++snapshot_index;
        }
    }
}

ChoiMatrix aggregate_dense(const std::vector<MeasurementRecord> &records,
                           const EstimatorConfig &cfg, int out_n,
                           const std::function<CMatrix(const MeasurementRecord &, int)> &dense) {
    check_records(records);
    Eigen::Index dim = Eigen::Index{1} << (2 * out_n);
    int nbatch = cfg.aggregation == EstimatorConfig::Aggregation::mean ? 1 : cfg.batches;
    if (nbatch < 1) {
        throw std::invalid_argument("estimate: batch count must be positive");
    }
    std::vector<CMatrix> sums(static_cast<size_t>(nbatch), CMatrix::Zero(dim, dim));
    std::vector<int64_t> counts(static_cast<size_t>(nbatch), 0);
    for_each_snapshot(records, [&](size_t r, int rep, size_t s) {
        size_t b = nbatch == 1 ? 0 : batch_of(cfg, r, s);
        sums[b] += dense(records[r], rep);
        counts[b] += 1;
    });
    std::vector<CMatrix> means;
    for (size_t b = 0; b < sums.size(); ++b) {
        if (counts[b] > 0) {
            means.push_back(sums[b] / static_cast<double>(counts[b]));
        }
    }
    if (means.empty()) {
        throw std::invalid_argument("estimate: no snapshots");
    }
    ChoiMatrix out;
    out.n = out_n;
    out.normalized = false;
    out.mat = nbatch == 1 ? means[0] : matrix_median(means);
    return out;
}

}  // namespace

ChoiMatrix estimate_choi(const std::vector<MeasurementRecord> &records,
                         const EstimatorConfig &cfg) {
    check_records(records);
    int n = records[0].setting.n;
    return aggregate_dense(records, cfg, n, [](const MeasurementRecord &rec, int rep) {
        return densify(snapshot(rec, rep));
    });
}

// Reduced snapshot: keep blocks inside the subsystem's (input, output)
// wire pairs and relabel them onto a k-qubit doubled register.
static ShadowSnapshot reduce_snapshot(const ShadowSnapshot &snap, int n,
                                      const std::vector<int> &sorted_subsystem) {
    int k = static_cast<int>(sorted_subsystem.size());
    std::vector<int> wire_map(static_cast<size_t>(2 * n), -1);
    for (int i = 0; i < k; ++i) {
        wire_map[static_cast<size_t>(sorted_subsystem[static_cast<size_t>(i)])] = i;
        wire_map[static_cast<size_t>(n + sorted_subsystem[static_cast<size_t>(i)])] = k + i;
    }
    ShadowSnapshot out;
    out.n = k;
    for (const SnapshotBlock &b : snap.blocks) {
        int kept = 0;
        for (int w : b.wires) {
            if (wire_map[static_cast<size_t>(w)] >= 0) {
                ++kept;
            }
        }
        if (kept == 0) {
            continue;  // unit-trace block, drops out of the partial trace
        }
        if (kept != static_cast<int>(b.wires.size())) {
            throw std::invalid_argument(
                "estimate_reduced: block straddles the subsystem boundary");
        }
        SnapshotBlock nb;
        nb.mat = b.mat;
        for (int w : b.wires) {
            nb.wires.push_back(wire_map[static_cast<size_t>(w)]);
        }
        out.blocks.push_back(std::move(nb));
    }
    return out;
}

ChoiMatrix estimate_reduced(const std::vector<MeasurementRecord> &records,
                            const std::vector<int> &subsystem, const EstimatorConfig &cfg) {
    check_records(records);
    int n = records[0].setting.n;
    std::vector<int> sorted = subsystem;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.empty()) {
        throw std::invalid_argument("estimate_reduced: subsystem must be non-empty");
    }
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] >= n || (i > 0 && sorted[i] == sorted[i - 1])) {
            throw std::invalid_argument("estimate_reduced: bad subsystem index");
        }
    }
    int k = static_cast<int>(sorted.size());
    return aggregate_dense(records, cfg, k, [&](const MeasurementRecord &rec, int rep) {
        return densify(reduce_snapshot(snapshot(rec, rep), n, sorted));
    });
}

double overlap_of(const ChoiMatrix &choi, const CMatrix &rho_in, const CMatrix &sigma) {
    if (choi.normalized) {
        throw std::invalid_argument("overlap_of: expects an unnormalized Choi matrix");
    }
    Eigen::Index dim = Eigen::Index{1} << choi.n;
    if (rho_in.rows() != dim || sigma.rows() != dim) {
        throw std::invalid_argument("overlap_of: dimension mismatch");
    }
    CMatrix a = kron(rho_in.transpose(), sigma);
    return (a.transpose().cwiseProduct(choi.mat)).sum().real();
}

double estimate_overlap(const std::vector<MeasurementRecord> &records, const CMatrix &rho_in,
                        const CMatrix &sigma, const EstimatorConfig &cfg) {
    check_records(records);
    int n = records[0].setting.n;
    if (cfg.aggregation == EstimatorConfig::Aggregation::mean) {
        return overlap_of(estimate_choi(records, cfg), rho_in, sigma);
    }
    Eigen::Index dim = Eigen::Index{1} << n;
    if (rho_in.rows() != dim || sigma.rows() != dim) {
        throw std::invalid_argument("estimate_overlap: dimension mismatch");
    }
    CMatrix a_t = kron(rho_in.transpose(), sigma).transpose();
    int nbatch = cfg.batches;
    std::vector<double> sums(static_cast<size_t>(nbatch), 0.0);
    std::vector<int64_t> counts(static_cast<size_t>(nbatch), 0);
    for_each_snapshot(records, [&](size_t r, int rep, size_t s) {
        size_t b = batch_of(cfg, r, s);
        CMatrix snap = densify(snapshot(records[r], rep));
        sums[b] += a_t.cwiseProduct(snap).sum().real();
        counts[b] += 1;
    });
    std::vector<double> means;
    for (size_t b = 0; b < sums.size(); ++b) {
        if (counts[b] > 0) {
            means.push_back(sums[b] / static_cast<double>(counts[b]));
        }
    }
    return scalar_median(means);
}

double estimate_purity(const ChoiMatrix &l) { return purity(l); }

static void check_bound_params(double eps, double delta) {
    if (!(eps > 0.0 && eps <= 1.0)) {
        throw std::invalid_argument("bound: eps must be in (0, 1]");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("bound: delta must be in (0, 1)");
    }
}

int64_t bound_reduced(int n, int k, double eps, double delta, ReducedBound scheme) {
    check_bound_params(eps, delta);
    if (k < 1 || k > n) {
        throw std::invalid_argument("bound_reduced: need 1 <= k <= n");
    }
    double value = 0.0;
    switch (scheme) {
        case ReducedBound::global_clifford:
            value = (204.0 / (eps * eps)) * std::pow(4.0, n + k) *
                    std::log(2.0 * std::pow(8.0 * n, 2 * k) / delta);
            break;
        case ReducedBound::pauli6_frobenius:
            value = (68.0 / (eps * eps)) * std::pow(36.0, k) *
                    std::log(2.0 * std::pow(8.0 * n, 2 * k) / delta);
            break;
        case ReducedBound::pauli6_trace:
            value = (8.0 / 3.0) * std::pow(144.0, k) / (eps * eps) *
                    std::log(std::pow(24.0 * n, 2 * k) / delta);
            break;
    }
    return static_cast<int64_t>(std::ceil(value));
}

int64_t bound_overlap(int64_t m, double eps, double delta, OverlapBound scheme, int k) {
    check_bound_params(eps, delta);
    if (m < 1) {
        throw std::invalid_argument("bound_overlap: m must be at least 1");
    }
    double base = (68.0 / (eps * eps)) * std::log(2.0 * static_cast<double>(m) / delta);
    double constant = 0.0;
    switch (scheme) {
        case OverlapBound::global_clifford_pure:
            constant = 3.0;
            break;
        case OverlapBound::single_qubit_clifford_pure:
            if (k < 1) {
                throw std::invalid_argument("bound_overlap: k must be at least 1");
            }
            constant = std::pow(4.0, k);
            break;
    }
    return static_cast<int64_t>(std::ceil(base * constant));
}

}  // namespace shadowqpt
