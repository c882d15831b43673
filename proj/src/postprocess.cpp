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

#include "shadowqpt/postprocess.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "shadowqpt/rng.hpp"
#include "shadowqpt/shadows.hpp"

namespace shadowqpt {

// Eigenvalue rescaling on a descending spectrum: walk from the smallest
// eigenvalue up, zero it if even the shared correction cannot make it
// non-negative, otherwise spread the accumulated deficit evenly over the
// survivors.
static Eigen::VectorXd clip_spectrum(const Eigen::VectorXd &descending) {
    Eigen::Index d = descending.size();
    Eigen::VectorXd out = descending;
    double deficit = 0.0;
    for (Eigen::Index i = d - 1; i >= 0; --i) {
        double share = deficit / static_cast<double>(i + 1);
        if (out[i] + share < 0.0) {
            deficit += out[i];
            out[i] = 0.0;
        } else {
            for (Eigen::Index j = 0; j <= i; ++j) {
                out[j] += share;
            }
            break;
        }
    }
    return out;
}

static CMatrix clip_psd(const CMatrix &m, double *negative_mass) {
    HermitianEig eig = eig_hermitian(((m + m.adjoint()) * 0.5).eval());
    if (negative_mass) {
        *negative_mass = 0.0;
        for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
            if (eig.values[i] < 0.0) {
                *negative_mass -= eig.values[i];
            }
        }
    }
    Eigen::VectorXd clipped = clip_spectrum(eig.values);
    return eig.vectors * clipped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
}

ChoiMatrix cp_project(const ChoiMatrix &l, ProjectionReport *report) {
    double neg = 0.0;
    ChoiMatrix out;
    out.n = l.n;
    out.normalized = l.normalized;
    out.mat = clip_psd(l.mat, &neg);
    if (report) {
        *report = ProjectionReport{};
        report->method = "cp";
        report->input_trace = l.mat.trace().real();
        report->output_trace = out.mat.trace().real();
        report->negative_mass = neg;
    }
    return out;
}

CMatrix cp_project_density(const CMatrix &rho, ProjectionReport *report) {
    double neg = 0.0;
    CMatrix clipped = clip_psd(rho, &neg);
    double tr = clipped.trace().real();
    if (tr <= 1e-12) {
        throw std::runtime_error("cp_project_density: no positive mass left");
    }
    if (report) {
        *report = ProjectionReport{};
        report->method = "cp";
        report->input_trace = rho.trace().real();
        report->output_trace = 1.0;
        report->negative_mass = neg;
    }
    return clipped / tr;
}

ChoiMatrix tp_project(const ChoiMatrix &l, ProjectionReport *report) {
    if (l.normalized) {
        throw std::invalid_argument("tp_project: expects an unnormalized Choi matrix");
    }
    Eigen::Index dim = Eigen::Index{1} << l.n;
    std::vector<int> inputs(static_cast<size_t>(l.n));
    for (int i = 0; i < l.n; ++i) {
        inputs[static_cast<size_t>(i)] = i;
    }
    CMatrix traced = partial_trace_qubits(l.mat, inputs, 2 * l.n);
    CMatrix deviation = traced - CMatrix::Identity(dim, dim);
    ChoiMatrix out;
    out.n = l.n;
    out.normalized = false;
    out.mat = l.mat - kron(deviation, CMatrix::Identity(dim, dim)) / static_cast<double>(dim);
    if (report) {
        *report = ProjectionReport{};
        report->method = "tp";
        report->input_trace = l.mat.trace().real();
        report->output_trace = out.mat.trace().real();
        report->negative_mass = 0.0;
    }
    return out;
}

// Phase-canonicalized lexicographic order on eigenvectors, used only to
// break exact ties deterministically.
static CVector canonical_vector(const CVector &v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-9) {
            return v * (std::conj(v[i]) / std::abs(v[i]));
        }
    }
    return v;
}

static bool vector_less(const CVector &a, const CVector &b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) {
            return a[i].real() < b[i].real();
        }
        if (a[i].imag() != b[i].imag()) {
            return a[i].imag() < b[i].imag();
        }
    }
    return false;
}

ChoiMatrix purify(const ChoiMatrix &l, ProjectionReport *report) {
    if (l.normalized) {
        throw std::invalid_argument("purify: expects an unnormalized Choi matrix");
    }
    HermitianEig eig = eig_hermitian(((l.mat + l.mat.adjoint()) * 0.5).eval());
    bool degenerate =
        eig.values.size() > 1 && eig.values[0] - eig.values[1] <= 1e-9;
    CVector top = canonical_vector(eig.vectors.col(0));
    if (degenerate) {
        for (Eigen::Index i = 1; i < eig.values.size(); ++i) {
            if (eig.values[0] - eig.values[i] > 1e-9) {
                break;
            }
            CVector cand = canonical_vector(eig.vectors.col(i));
            if (vector_less(cand, top)) {
                top = cand;
            }
        }
    }
    double scale = std::pow(2.0, l.n);
    ChoiMatrix out;
    out.n = l.n;
    out.normalized = false;
    out.mat = scale * (top * top.adjoint());
    if (report) {
        *report = ProjectionReport{};
        report->method = "purify";
        report->input_trace = l.mat.trace().real();
        report->output_trace = scale;
        report->degenerate_top = degenerate;
    }
    return out;
}

namespace {

struct ObservedEffect {
    size_t record_index;
    Eigen::Index outcome;
    double frequency;  // share of all shots
};

}  // namespace

MleResult mle_reconstruct(const std::vector<MeasurementRecord> &records,
                          const MleOptions &options) {
    if (records.empty()) {
        throw std::invalid_argument("mle_reconstruct: no records");
    }
    if (records[0].setting.scheme != Scheme::ancilla) {
        throw std::invalid_argument(
            "mle_reconstruct: requires ancilla records (full-register state tomography)");
    }
    int n = records[0].setting.n;
    Eigen::Index dim = Eigen::Index{1} << (2 * n);

    std::vector<CMatrix> unitaries;
    std::vector<ObservedEffect> effects;
    int64_t total_shots = 0;
    for (const MeasurementRecord &rec : records) {
        total_shots += static_cast<int64_t>(rec.outcomes.size());
    }
    for (size_t r = 0; r < records.size(); ++r) {
        const MeasurementRecord &rec = records[r];
        if (rec.setting.scheme != Scheme::ancilla || rec.setting.n != n) {
            throw std::invalid_argument("mle_reconstruct: records mix schemes or sizes");
        }
        unitaries.push_back(ancilla_setting_unitary(rec.setting));
        std::map<Eigen::Index, int64_t> counts;
        for (const std::string &o : rec.outcomes) {
            Eigen::Index b = 0;
            for (char c : o) {
                b = (b << 1) | (c == '1' ? 1 : 0);
            }
            counts[b] += 1;
        }
        for (const auto &[b, c] : counts) {
            effects.push_back(
                {r, b, static_cast<double>(c) / static_cast<double>(total_shots)});
        }
    }

    CMatrix rho;
    if (options.init == MleOptions::Init::maximally_mixed) {
        rho = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
    } else {
        RngStream rng = substream(options.init_seed, 0, 0x4d4c45);
        CMatrix a(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                a(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            }
        }
        rho = a * a.adjoint();
        rho /= rho.trace().real();
    }

    MleResult result;
    result.report.method = "mle";
    result.report.input_trace = 1.0;
    bool converged = false;
    bool regularized = false;
    int iter = 0;
    while (iter < options.max_iterations) {
        // Effect probabilities and the R operator for the current iterate.
        CMatrix r_op = CMatrix::Zero(dim, dim);
        double log_like = 0.0;
        for (const ObservedEffect &e : effects) {
            const CMatrix &u = unitaries[e.record_index];
            CVector row = u.row(e.outcome).adjoint();  // U^dag |b>
            double p = ((row.adjoint() * rho * row)(0, 0)).real();
            if (p < 1e-12) {
                p = 1e-12;
                regularized = true;
            }
            r_op += (e.frequency / p) * (row * row.adjoint());
            log_like += e.frequency * std::log(p);
        }
        CMatrix next = r_op * rho * r_op;
        next /= next.trace().real();
        double step = (next - rho).norm();
        rho = next;
        ++iter;
        result.log_likelihood.push_back(log_like);
        if (iter >= options.min_iterations && step <= options.tol) {
            converged = true;
            break;
        }
    }
    result.report.iterations = iter;
    result.report.converged = converged;
    result.report.regularized = regularized;
    result.report.output_trace = std::pow(2.0, n);
    result.choi.n = n;
    result.choi.normalized = false;
    result.choi.mat = rho * std::pow(2.0, n);
    return result;
}

double overlap_pipeline(const ChoiMatrix &l_raw, const CMatrix &rho_in, const CMatrix &sigma,
                        OverlapMode mode) {
    if (mode == OverlapMode::purified) {
        return overlap_of(purify(l_raw), rho_in, sigma);
    }
    ChoiMatrix repaired = tp_project(cp_project(l_raw));
    CMatrix rho_out = apply_channel(repaired, rho_in);
    CMatrix clipped = cp_project_density(rho_out);
    return (clipped * sigma).trace().real();
}

}  // namespace shadowqpt
