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

#include "shadowqpt/qmat.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace shadowqpt {

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix kron_all(const std::vector<CMatrix> &factors) {
    if (factors.empty()) {
        return CMatrix::Identity(1, 1);
    }
    CMatrix out = factors[0];
    for (size_t i = 1; i < factors.size(); ++i) {
        out = kron(out, factors[i]);
    }
    return out;
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

bool is_hermitian(const CMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const CMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    CMatrix d = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const CMatrix &m, double tol) {
    if (!is_hermitian(m, tol)) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(
        ((m + m.adjoint()) * 0.5).eval(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() >= -tol;
}

CMatrix partial_trace(const CMatrix &m, const std::vector<int> &keep,
                      const std::vector<int> &dims) {
    Eigen::Index full_dim = 1;
    for (int d : dims) {
        if (d < 1) {
            throw std::invalid_argument("partial_trace: subsystem dimension must be positive");
        }
        full_dim *= d;
    }
    if (m.rows() != full_dim || m.cols() != full_dim) {
        throw std::invalid_argument("partial_trace: matrix does not match subsystem dimensions");
    }
    for (size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= static_cast<int>(dims.size())) {
            throw std::invalid_argument("partial_trace: keep index out of range");
        }
        if (i > 0 && keep[i] <= keep[i - 1]) {
            throw std::invalid_argument("partial_trace: keep indices must be strictly increasing");
        }
    }

    std::vector<bool> kept(dims.size(), false);
    for (int k : keep) {
        kept[k] = true;
    }

    // For every full basis index, split it into a kept part and a traced
    // part, both read big-endian in their own subregisters.
    std::vector<Eigen::Index> kept_index(full_dim), traced_index(full_dim);
    for (Eigen::Index idx = 0; idx < full_dim; ++idx) {
        Eigen::Index rem = idx, ki = 0, ti = 0;
        std::vector<Eigen::Index> digits(dims.size());
        for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
            digits[s] = rem % dims[s];
            rem /= dims[s];
        }
        for (size_t s = 0; s < dims.size(); ++s) {
            if (kept[s]) {
                ki = ki * dims[s] + digits[s];
            } else {
                ti = ti * dims[s] + digits[s];
            }
        }
        kept_index[idx] = ki;
        traced_index[idx] = ti;
    }

    Eigen::Index out_dim = 1;
    for (int k : keep) {
        out_dim *= dims[k];
    }
    CMatrix out = CMatrix::Zero(out_dim, out_dim);
    for (Eigen::Index i = 0; i < full_dim; ++i) {
        for (Eigen::Index j = 0; j < full_dim; ++j) {
            if (traced_index[i] == traced_index[j]) {
                out(kept_index[i], kept_index[j]) += m(i, j);
            }
        }
    }
    return out;
}

CMatrix partial_trace_qubits(const CMatrix &m, const std::vector<int> &keep,
                             int num_qubits) {
    std::vector<int> dims(static_cast<size_t>(num_qubits), 2);
    return partial_trace(m, keep, dims);
}

CMatrix apply_qubit_permutation(const CMatrix &m, const std::vector<int> &perm) {
    int q = static_cast<int>(perm.size());
    Eigen::Index dim = Eigen::Index{1} << q;
    if (m.rows() != dim || m.cols() != dim) {
        throw std::invalid_argument("apply_qubit_permutation: size mismatch");
    }
    std::vector<bool> seen(perm.size(), false);
    for (int p : perm) {
        if (p < 0 || p >= q || seen[p]) {
            throw std::invalid_argument("apply_qubit_permutation: not a permutation");
        }
        seen[p] = true;
    }
    // new_of[i] is the basis index whose slot-p bit equals the bit of qubit
    // perm[p] in the old index i.
    std::vector<Eigen::Index> new_of(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::Index j = 0;
        for (int p = 0; p < q; ++p) {
            Eigen::Index bit = (i >> (q - 1 - perm[p])) & 1;
            j |= bit << (q - 1 - p);
        }
        new_of[i] = j;
    }
    CMatrix out(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            out(new_of[i], new_of[j]) = m(i, j);
        }
    }
    return out;
}

HermitianEig eig_hermitian(const CMatrix &m, double tol) {
    if (!is_hermitian(m, tol)) {
        char msg[80];
        std::snprintf(msg, sizeof msg, "eig_hermitian: matrix is not Hermitian within %g", tol);
        throw std::invalid_argument(msg);
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(((m + m.adjoint()) * 0.5).eval());
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_hermitian: eigensolver failed");
    }
    Eigen::Index d = m.rows();
    HermitianEig out;
    out.values.resize(d);
    out.vectors.resize(d, d);
    // Eigen returns ascending order; flip to descending.
    for (Eigen::Index i = 0; i < d; ++i) {
        out.values[i] = solver.eigenvalues()[d - 1 - i];
        out.vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
    }
    return out;
}

CMatrix expm_i_hermitian(const CMatrix &h, double t) {
    HermitianEig eig = eig_hermitian(h);
    Eigen::Index d = h.rows();
    CVector phases(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        phases[i] = std::exp(Complex(0.0, -eig.values[i] * t));
    }
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

double trace_norm_hermitian(const CMatrix &m) {
    HermitianEig eig = eig_hermitian(m);
    return eig.values.cwiseAbs().sum();
}

static void check_comparable(const ChoiMatrix &a, const ChoiMatrix &b, const char *op) {
    if (a.n != b.n || a.mat.rows() != b.mat.rows()) {
        throw std::invalid_argument(std::string(op) + ": size mismatch");
    }
    if (a.normalized || b.normalized) {
        throw std::invalid_argument(std::string(op) +
                                    ": expects unnormalized Choi matrices (trace 2^n)");
    }
}

double trace_distance(const ChoiMatrix &a, const ChoiMatrix &b) {
    check_comparable(a, b, "trace_distance");
    double scale = std::pow(2.0, a.n + 1);
    return trace_norm_hermitian(a.mat - b.mat) / scale;
}

double frobenius_distance(const ChoiMatrix &a, const ChoiMatrix &b) {
    check_comparable(a, b, "frobenius_distance");
    double scale = std::pow(2.0, a.n);
    return (a.mat - b.mat).norm() / scale;
}

double purity(const ChoiMatrix &m) {
    double scale = std::pow(4.0, m.n);
    // tr(L^2) = ||L||_F^2 for Hermitian L; estimates are Hermitian by
    // construction so the cheaper form is used.
    return m.mat.squaredNorm() / scale;
}

}  // namespace shadowqpt
