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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "shadowqpt/acquire.hpp"
#include "shadowqpt/channels.hpp"
#include "shadowqpt/postprocess.hpp"
#include "shadowqpt/shadows.hpp"

using namespace shadowqpt;

namespace {

std::string bits_of(int value, int width) {
    std::string s(width, '0');
    for (int i = 0; i < width; ++i) {
        if ((value >> (width - 1 - i)) & 1) s[i] = '1';
    }
    return s;
}

MeasurementRecord ancilla_rotation_record(int n, const std::vector<RotationLabel> &labels,
                                          const std::string &outcome) {
    MeasurementRecord rec;
    rec.setting.scheme = Scheme::ancilla;
    rec.setting.n = n;
    for (int w = 0; w < 2 * n; ++w) {
        SettingBlock blk;
        blk.wires = {w};
        blk.labels = {labels[w]};
        rec.setting.blocks.push_back(blk);
    }
    rec.outcomes = {outcome};
    return rec;
}

MeasurementRecord two_sided_record(int n, const std::vector<RotationLabel> &left,
                                   const std::vector<RotationLabel> &right,
                                   const std::string &outcome) {
    MeasurementRecord rec;
    rec.setting.scheme = Scheme::two_sided;
    rec.setting.n = n;
    for (int w = 0; w < n; ++w) {
        SettingBlock blk;
        blk.wires = {w};
        blk.labels = {left[w]};
        rec.setting.blocks.push_back(blk);
    }
    for (int w = 0; w < n; ++w) {
        SettingBlock blk;
        blk.wires = {n + w};
        blk.labels = {right[w]};
        rec.setting.blocks.push_back(blk);
    }
    rec.outcomes = {outcome};
    return rec;
}

// Born-weighted expectation of the ancilla Pauli-6 estimator over every
// (rotation pair, outcome) atom for a single-qubit channel.
CMatrix ancilla_brute_force_mean(const CMatrix &u_channel) {
    ChoiMatrix exact = choi_from_unitary(u_channel, 1);
    CMatrix rho = exact.mat / 2.0;
    CMatrix acc = CMatrix::Zero(4, 4);
    double total_weight = 0;
    for (RotationLabel l0 : kRotationBasisSet) {
        for (RotationLabel l1 : kRotationBasisSet) {
            CMatrix u = kron(rotation_unitary(l0), rotation_unitary(l1));
            CMatrix rotated = u * rho * u.adjoint();
            for (int b = 0; b < 4; ++b) {
                double p = rotated(b, b).real();
                MeasurementRecord rec = ancilla_rotation_record(1, {l0, l1}, bits_of(b, 2));
                acc += (p / 9.0) * densify(snapshot(rec, 0));
                total_weight += p / 9.0;
            }
        }
    }
    REQUIRE(total_weight == doctest::Approx(1).epsilon(1e-10));
    return acc;
}

// Same expectation for the two-sided estimator: preparation labels from the
// six-element set, measurement labels from the basis set.
CMatrix two_sided_brute_force_mean(const CMatrix &u_channel) {
    CMatrix acc = CMatrix::Zero(4, 4);
    double total_weight = 0;
    for (RotationLabel ll : kRotationFullSet) {
        for (RotationLabel lr : kRotationBasisSet) {
            CVector psi = rotation_unitary(ll).adjoint() * CVector::Unit(2, 0);
            CVector evolved = u_channel * psi;
            CMatrix ur = rotation_unitary(lr);
            CMatrix rotated = ur * (evolved * evolved.adjoint()) * ur.adjoint();
            for (int b = 0; b < 2; ++b) {
                double p = rotated(b, b).real();
                MeasurementRecord rec = two_sided_record(1, {ll}, {lr}, bits_of(b, 1));
                acc += (p / 18.0) * densify(snapshot(rec, 0));
                total_weight += p / 18.0;
            }
        }
    }
    REQUIRE(total_weight == doctest::Approx(1).epsilon(1e-10));
    return acc;
}

CMatrix basis_projector(int dim, int index) {
    CMatrix m = CMatrix::Zero(dim, dim);
    m(index, index) = 1;
    return m;
}

}  // namespace

TEST_CASE("inverse channel on projectors and its fixed point") {
    CMatrix p0 = basis_projector(2, 0);
    CMatrix out = inverse_channel(p0, 1);
    CHECK(out(0, 0).real() == doctest::Approx(2).epsilon(1e-12));
    CHECK(out(1, 1).real() == doctest::Approx(-1).epsilon(1e-12));
    CHECK(std::abs(out(0, 1)) == 0.0);

    CMatrix half = identity(2) / 2.0;
    CHECK((inverse_channel(half, 1) - half).norm() < 1e-12);

    CMatrix p00 = basis_projector(4, 0);
    CMatrix out2 = inverse_channel(p00, 2);
    CHECK(out2(0, 0).real() == doctest::Approx(4).epsilon(1e-12));
    for (int i = 1; i < 4; ++i) CHECK(out2(i, i).real() == doctest::Approx(-1).epsilon(1e-12));

    CHECK_THROWS(inverse_channel(p0, 2));
}

TEST_CASE("snapshot of the all-identity setting is a product of diag(2,-1)") {
    MeasurementRecord rec =
        ancilla_rotation_record(1, {RotationLabel::I, RotationLabel::I}, "00");
    CMatrix dense = densify(snapshot(rec, 0));
    CMatrix d(2, 2);
    d << 2, 0, 0, -1;
    CHECK((dense - 2.0 * kron(d, d)).norm() < 1e-12);
    CHECK_THROWS(snapshot(rec, 1));
}

TEST_CASE("every snapshot carries trace two to the n") {
    ChannelSpec spec = ghz_process(2);
    std::vector<std::vector<MeasurementRecord>> batches;
    batches.push_back(acquire_ancilla(spec, PairingPlan::pauli(), 50, 2, 1));
    batches.push_back(acquire_ancilla(spec, PairingPlan::non_fixed(), 50, 2, 2));
    batches.push_back(acquire_two_sided(spec, 50, 2, 3));
    for (const auto &records : batches) {
        for (const auto &rec : records) {
            for (size_t r = 0; r < rec.outcomes.size(); ++r) {
                CMatrix dense = densify(snapshot(rec, static_cast<int>(r)));
                CHECK(std::abs(dense.trace().real() - 4.0) < 1e-9);
                CHECK(std::abs(dense.trace().imag()) < 1e-12);
                CHECK(is_hermitian(dense, 1e-9));
            }
        }
    }
}

TEST_CASE("pauli estimator is unbiased for both schemes at one qubit") {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    for (const CMatrix &u : {CMatrix(identity(2)), x}) {
        CMatrix exact = choi_from_unitary(u, 1).mat;
        CHECK((ancilla_brute_force_mean(u) - exact).norm() < 1e-10);
        CHECK((two_sided_brute_force_mean(u) - exact).norm() < 1e-10);
    }
}

TEST_CASE("global clifford estimator is unbiased over the whole two-qubit group") {
    // Collect every distinct two-qubit Clifford element by exhaustive
    // sampling, then take the exact Born-weighted estimator expectation for
    // the single-qubit identity channel.
    RngStream rng(404);
    std::map<std::vector<uint64_t>, CliffordElement> group;
    int guard = 0;
    while (group.size() < 11520 && guard++ < 500000) {
        CliffordElement c = sample_clifford(2, rng);
        group.emplace(clifford_pack(c), c);
    }
    REQUIRE(group.size() == 11520);

    ChoiMatrix exact = choi_from_unitary(identity(2), 1);
    CMatrix rho = exact.mat / 2.0;
    CMatrix acc = CMatrix::Zero(4, 4);
    for (const auto &[key, c] : group) {
        MeasurementRecord rec;
        rec.setting.scheme = Scheme::ancilla;
        rec.setting.n = 1;
        SettingBlock blk;
        blk.wires = {0, 1};
        blk.is_clifford = true;
        blk.cliff = c;
        rec.setting.blocks.push_back(blk);
        CMatrix u = clifford_to_unitary(c);
        CMatrix rotated = u * rho * u.adjoint();
        for (int b = 0; b < 4; ++b) {
            rec.outcomes = {bits_of(b, 2)};
            acc += (rotated(b, b).real() / 11520.0) * densify(snapshot(rec, 0));
        }
    }
    CHECK((acc - exact.mat).norm() < 1e-10);
}

TEST_CASE("a single snapshot estimate is that snapshot") {
    ChannelSpec spec = ghz_process(2);
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 1, 1, 9);
    ChoiMatrix est = estimate_choi(records, EstimatorConfig::mean());
    CHECK((est.mat - densify(snapshot(records[0], 0))).norm() == 0.0);
    CHECK(est.n == 2);
    CHECK_FALSE(est.normalized);
    CHECK_THROWS(estimate_choi({}, EstimatorConfig::mean()));
}

TEST_CASE("pauli shadows converge on the identity channel") {
    ChannelSpec spec = ChannelSpec::from_unitary(1, identity(2));
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 2000, 50, 1234);
    ChoiMatrix est = estimate_choi(records, EstimatorConfig::mean());
    ChoiMatrix exact = choi_of(spec);
    CHECK(trace_distance(est, exact) < 0.05);
}

TEST_CASE("median-of-means returns the majority batch and shrugs off outliers") {
    // 23 single-setting records, unitary-level batching: every record is its
    // own batch. 22 identical snapshots form the majority; one dissenter
    // drags the mean but not the median.
    std::vector<MeasurementRecord> records;
    for (int i = 0; i < 23; ++i) {
        std::string outcome = (i == 7) ? "11" : "00";
        records.push_back(
            ancilla_rotation_record(1, {RotationLabel::I, RotationLabel::I}, outcome));
    }
    CMatrix majority = densify(snapshot(records[0], 0));
    ChoiMatrix mom = estimate_choi(
        records, EstimatorConfig::median_of_means(23, EstimatorConfig::BatchLevel::unitary));
    CHECK((mom.mat - majority).norm() == 0.0);
    ChoiMatrix mean_est = estimate_choi(records, EstimatorConfig::mean());
    CHECK((mean_est.mat - majority).norm() > 0.1);
}

TEST_CASE("median-of-means error stays within a constant factor of the mean") {
    // The selected batch averages only N/23 snapshots, so its error runs a
    // few times higher than the full mean; it must not blow past that.
    ChannelSpec spec = ghz_process(2);
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 1024, 50, 777);
    ChoiMatrix exact = choi_of(spec);
    double t_mean = trace_distance(cp_project(estimate_choi(records, EstimatorConfig::mean())),
                                   exact);
    double t_mom_s = trace_distance(
        cp_project(estimate_choi(records, EstimatorConfig::median_of_means(
                                              23, EstimatorConfig::BatchLevel::shadow))),
        exact);
    double t_mom_u = trace_distance(
        cp_project(estimate_choi(records, EstimatorConfig::median_of_means(
                                              23, EstimatorConfig::BatchLevel::unitary))),
        exact);
    CHECK(t_mean < 0.15);
    CHECK(t_mom_s < 8 * t_mean + 0.05);
    CHECK(t_mom_u < 8 * t_mean + 0.05);
}

TEST_CASE("median-of-means is deterministic and batch-count sensitive only mildly") {
    ChannelSpec spec = ghz_process(2);
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 200, 5, 31);
    EstimatorConfig cfg = EstimatorConfig::median_of_means(23);
    ChoiMatrix a = estimate_choi(records, cfg);
    ChoiMatrix b = estimate_choi(records, cfg);
    CHECK((a.mat - b.mat).norm() == 0.0);
    CHECK_THROWS(estimate_choi(records, EstimatorConfig::median_of_means(0)));
}

TEST_CASE("reduced estimate over the full register matches the full estimate") {
    ChannelSpec spec = ghz_process(2);
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 300, 3, 51);
    ChoiMatrix full = estimate_choi(records, EstimatorConfig::mean());
    ChoiMatrix red = estimate_reduced(records, {0, 1}, EstimatorConfig::mean());
    CHECK((full.mat - red.mat).norm() < 1e-10);
}

TEST_CASE("reduced estimates recover marginals of the identity channel") {
    ChannelSpec spec = ChannelSpec::from_unitary(2, identity(4));
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 400, 50, 61);
    ChoiMatrix bell = choi_from_unitary(identity(2), 1);
    for (int q : {0, 1}) {
        ChoiMatrix est = cp_project(estimate_reduced(records, {q}, EstimatorConfig::mean()));
        CHECK(trace_distance(est, bell) < 0.05);
    }
}

TEST_CASE("reduced estimates recover the non-unitary ghz marginal") {
    ChannelSpec spec = ghz_process(3);
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 1024, 50, 71);
    ChoiMatrix exact_red = reduced_choi(choi_of(spec), {0});
    ChoiMatrix est = cp_project(estimate_reduced(records, {0}, EstimatorConfig::mean()));
    CHECK(trace_distance(est, exact_red) < 0.05);
    CHECK(purity(exact_red) < 1.0 - 1e-6);
}

TEST_CASE("clifford blocks must respect the subsystem boundary") {
    ChannelSpec spec = ChannelSpec::from_unitary(2, identity(4));
    // Pairs (input i, output i): subsystem {0} is covered by block {0, 2}.
    auto aligned = acquire_ancilla(spec, PairingPlan::fixed({{0, 2}, {1, 3}}), 600, 20, 81);
    ChoiMatrix est = cp_project(estimate_reduced(aligned, {0}, EstimatorConfig::mean()));
    ChoiMatrix bell = choi_from_unitary(identity(2), 1);
    CHECK(trace_distance(est, bell) < 0.1);

    // A block tying wire 0 to wire 3 straddles any single-qubit subsystem.
    auto straddling = acquire_ancilla(spec, PairingPlan::fixed({{0, 3}, {1, 2}}), 4, 1, 82);
    CHECK_THROWS(estimate_reduced(straddling, {0}, EstimatorConfig::mean()));
}

TEST_CASE("exact overlaps of reference channels") {
    ChoiMatrix li = choi_from_unitary(identity(4), 2);
    CMatrix rho00 = basis_projector(4, 0);
    CHECK(overlap_of(li, rho00, rho00) == doctest::Approx(1).epsilon(1e-12));

    ChoiMatrix ghz = choi_of(ghz_process(2));
    CHECK(overlap_of(ghz, rho00, rho00) == doctest::Approx(0.5).epsilon(1e-12));
    CVector bell = ghz_state(2);
    CMatrix bell_proj = bell * bell.adjoint();
    CHECK(overlap_of(ghz, rho00, bell_proj) == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("streamed overlap estimation matches contracting the dense estimate") {
    ChannelSpec spec = ghz_process(2);
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 200, 10, 91);
    CMatrix rho00 = basis_projector(4, 0);
    CVector bell = ghz_state(2);
    CMatrix sigma = bell * bell.adjoint();
    ChoiMatrix est = estimate_choi(records, EstimatorConfig::mean());
    double streamed = estimate_overlap(records, rho00, sigma, EstimatorConfig::mean());
    CHECK(streamed == doctest::Approx(overlap_of(est, rho00, sigma)).epsilon(1e-12));
}

TEST_CASE("overlap is linear in the target state") {
    ChannelSpec spec = ghz_process(2);
    auto records = acquire_ancilla(spec, PairingPlan::pauli(), 100, 5, 92);
    ChoiMatrix est = estimate_choi(records, EstimatorConfig::mean());
    CMatrix rho = basis_projector(4, 0);
    CMatrix s1 = basis_projector(4, 1);
    CMatrix s2 = basis_projector(4, 2);
    CMatrix blend = 0.35 * s1 + 0.65 * s2;
    double lhs = overlap_of(est, rho, blend);
    double rhs = 0.35 * overlap_of(est, rho, s1) + 0.65 * overlap_of(est, rho, s2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("purity of exact and estimated choi matrices") {
    CHECK(estimate_purity(choi_of(ghz_process(2))) == doctest::Approx(1).epsilon(1e-9));
    ChannelSpec dep = ChannelSpec::depolarized_copy(
        ChannelSpec::from_unitary(1, identity(2)), 1.0);
    CHECK(estimate_purity(choi_of(dep)) == doctest::Approx(0.25).epsilon(1e-9));
    ChannelSpec dep2 = ChannelSpec::depolarized_copy(
        ChannelSpec::from_unitary(2, identity(4)), 1.0);
    CHECK(estimate_purity(choi_of(dep2)) == doctest::Approx(0.0625).epsilon(1e-9));

    // Raw estimates from few shots overshoot unit purity.
    ChannelSpec noisy = ChannelSpec::depolarized_copy(ghz_process(2), 0.1);
    auto records = acquire_ancilla(noisy, PairingPlan::pauli(), 256, 50, 93);
    CHECK(estimate_purity(estimate_choi(records, EstimatorConfig::mean())) > 1.0);
}

TEST_CASE("reduced-process sample bounds reproduce frozen reference values") {
    CHECK(bound_reduced(2, 1, 0.5, 0.1, ReducedBound::global_clifford) == 446041);
    CHECK(bound_reduced(3, 2, 0.2, 0.05, ReducedBound::global_clifford) == 85653078);
    CHECK(bound_reduced(2, 1, 0.5, 0.1, ReducedBound::pauli6_frobenius) == 83633);
    CHECK(bound_reduced(4, 2, 0.3, 0.01, ReducedBound::pauli6_frobenius) == 18762707);
    CHECK(bound_reduced(2, 1, 0.5, 0.1, ReducedBound::pauli6_trace) == 15430);
    CHECK(bound_reduced(3, 3, 1.0, 0.5, ReducedBound::pauli6_trace) == 209840177);
}

TEST_CASE("reduced-process bounds respond to each parameter") {
    for (ReducedBound scheme : {ReducedBound::global_clifford, ReducedBound::pauli6_frobenius,
                                ReducedBound::pauli6_trace}) {
        CHECK(bound_reduced(3, 1, 0.1, 0.1, scheme) > bound_reduced(3, 1, 0.2, 0.1, scheme));
        CHECK(bound_reduced(3, 1, 0.1, 0.05, scheme) > bound_reduced(3, 1, 0.1, 0.2, scheme));
        CHECK(bound_reduced(3, 2, 0.1, 0.1, scheme) > bound_reduced(3, 1, 0.1, 0.1, scheme));
    }
    // The global-Clifford variant scales by 4 per extra qubit (plus a slowly
    // growing log factor).
    double ratio =
        static_cast<double>(bound_reduced(3, 1, 0.5, 0.1, ReducedBound::global_clifford)) /
        static_cast<double>(bound_reduced(2, 1, 0.5, 0.1, ReducedBound::global_clifford));
    CHECK(ratio > 4.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("reduced-process bounds reject bad parameters") {
    CHECK_THROWS(bound_reduced(2, 0, 0.5, 0.1, ReducedBound::global_clifford));
    CHECK_THROWS(bound_reduced(2, 3, 0.5, 0.1, ReducedBound::global_clifford));
    CHECK_THROWS(bound_reduced(2, 1, 0.0, 0.1, ReducedBound::global_clifford));
    CHECK_THROWS(bound_reduced(2, 1, 1.5, 0.1, ReducedBound::global_clifford));
    CHECK_THROWS(bound_reduced(2, 1, 0.5, 0.0, ReducedBound::global_clifford));
    CHECK_THROWS(bound_reduced(2, 1, 0.5, 1.0, ReducedBound::global_clifford));
}

TEST_CASE("overlap bounds reproduce frozen values and scale with the pair count") {
    CHECK(bound_overlap(1, 1.0, 0.5, OverlapBound::global_clifford_pure) == 283);
    CHECK(bound_overlap(10, 0.2, 0.1, OverlapBound::single_qubit_clifford_pure, 2) == 144115);
    int64_t m1 = bound_overlap(100, 0.1, 0.1, OverlapBound::global_clifford_pure);
    int64_t m2 = bound_overlap(200, 0.1, 0.1, OverlapBound::global_clifford_pure);
    // Doubling M adds 68 log(2) * 3 / eps^2, about 14143.
    CHECK(m2 - m1 > 14000);
    CHECK(m2 - m1 < 14300);
    CHECK_THROWS(bound_overlap(0, 0.1, 0.1, OverlapBound::global_clifford_pure));
    CHECK_THROWS(bound_overlap(1, 0.1, 1.1, OverlapBound::global_clifford_pure));
}
