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

#ifndef SHADOWQPT_POSTPROCESS_HPP
#define SHADOWQPT_POSTPROCESS_HPP

#include <string>
#include <vector>

#include "shadowqpt/acquire.hpp"
#include "shadowqpt/qmat.hpp"

namespace shadowqpt {

struct ProjectionReport {
    std::string method;          // cp, tp, purify, mle
    double input_trace = 0.0;
    double output_trace = 0.0;
    double negative_mass = 0.0;  // total negative eigenvalue weight removed
    int iterations = 0;          // mle only
    bool converged = true;
    bool degenerate_top = false; // purify: top eigenvalue was degenerate
    bool regularized = false;    // mle: some probability was clamped
};

// Nearest positive semidefinite matrix with the same trace (Frobenius
// norm): eigenvalues are scanned from the most negative up, each negative
// one is zeroed and its mass spread uniformly over the eigenvalues still
// positive.
ChoiMatrix cp_project(const ChoiMatrix &l, ProjectionReport *report = nullptr);

// The same clipping applied to a plain density-matrix estimate, with the
// result renormalized to unit trace.
CMatrix cp_project_density(const CMatrix &rho, ProjectionReport *report = nullptr);

// Frobenius projection onto trace preservation: subtracts
// ((tr_out L - I) (x) I) / 2^n so the output-traced matrix is exactly the
// identity on the input register.
ChoiMatrix tp_project(const ChoiMatrix &l, ProjectionReport *report = nullptr);

// Rank-1 truncation 2^n v v^dag onto the dominant eigenvector, appropriate
// when the underlying channel is unitary.
ChoiMatrix purify(const ChoiMatrix &l, ProjectionReport *report = nullptr);

struct MleOptions {
    enum class Init { maximally_mixed, random_psd };
    Init init = Init::maximally_mixed;
    uint64_t init_seed = 0;   // random_psd only
    int min_iterations = 100;
    int max_iterations = 500;
    double tol = 1e-3;        // Frobenius step threshold
};

struct MleResult {
    ChoiMatrix choi;          // unnormalized (trace 2^n)
    ProjectionReport report;
    std::vector<double> log_likelihood;  // per accepted iterate
};

// Iterative maximum-likelihood reconstruction of the Choi state from
// ancilla records: rho <- N[R rho R] with R = sum_j (f_j / p_j) Pi_j over
// the observed effects. Stops after min_iterations once the step norm
// drops below tol.
MleResult mle_reconstruct(const std::vector<MeasurementRecord> &records,
                          const MleOptions &options = MleOptions{});

// Overlap prediction from a raw estimate. full: CP then TP on the Choi
// matrix, apply the channel, clip the output state, take tr(rho_out
// sigma). purified: contract against the rank-1 purification directly.
enum class OverlapMode { full, purified };
double overlap_pipeline(const ChoiMatrix &l_raw, const CMatrix &rho_in, const CMatrix &sigma,
                        OverlapMode mode);

}  // namespace shadowqpt

#endif
