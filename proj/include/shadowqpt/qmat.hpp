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

#ifndef SHADOWQPT_QMAT_HPP
#define SHADOWQPT_QMAT_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace shadowqpt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Register convention used throughout:
//   * qubit 0 is the most significant tensor factor, so basis index
//     b = b_0 b_1 ... b_{m-1} in binary with b_0 the bit of qubit 0;
//   * bitstring character 0 refers to the most significant qubit;
//   * a Choi matrix of an n-qubit channel acts on 2n qubits ordered
//     (input copy 0..n-1, output 0..n-1).

// Choi matrix of an n-qubit channel. `mat` is 4^n x 4^n. When
// `normalized` is false the matrix carries the full trace 2^n of the
// channel applied to one half of n maximally entangled pairs; dividing
// by 2^n gives the density-matrix normalization used for sampling.
struct ChoiMatrix {
    int n = 0;
    CMatrix mat;
    bool normalized = false;

    Eigen::Index dim() const { return mat.rows(); }
};

inline Complex cplx(double re, double im = 0.0) { return Complex(re, im); }

CMatrix kron(const CMatrix &a, const CMatrix &b);
CMatrix kron_all(const std::vector<CMatrix> &factors);

CMatrix identity(Eigen::Index dim);

bool is_hermitian(const CMatrix &m, double tol = 1e-10);
bool is_unitary(const CMatrix &m, double tol = 1e-10);
bool is_psd(const CMatrix &m, double tol = 1e-10);

// Partial trace over the subsystems not listed in `keep`. `dims` gives the
// dimension of every subsystem in big-endian order; `keep` lists kept
// subsystem indices in increasing order and fixes the ordering of the
// output.
CMatrix partial_trace(const CMatrix &m, const std::vector<int> &keep,
                      const std::vector<int> &dims);

// Convenience form for a register of equal-dimensional qubits.
CMatrix partial_trace_qubits(const CMatrix &m, const std::vector<int> &keep,
                             int num_qubits);

// Reorders the qubits of an operator on `perm.size()` qubits. Slot p of the
// output register holds qubit perm[p] of the input register.
CMatrix apply_qubit_permutation(const CMatrix &m, const std::vector<int> &perm);

struct HermitianEig {
    Eigen::VectorXd values;  // descending
    CMatrix vectors;         // column i pairs with values[i]
};

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
// Throws std::invalid_argument when the input is not Hermitian within tol.
HermitianEig eig_hermitian(const CMatrix &m, double tol = 1e-10);

// exp(-i h t) for Hermitian h.
CMatrix expm_i_hermitian(const CMatrix &h, double t);

// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm_hermitian(const CMatrix &m);

// Trace distance between two unnormalized Choi matrices of the same size:
// half the trace norm of the difference of the trace-1 normalizations,
// i.e. tr|A - B| / 2^(n+1).
double trace_distance(const ChoiMatrix &a, const ChoiMatrix &b);

// Frobenius distance with the same normalization: ||A - B||_F / 2^n.
double frobenius_distance(const ChoiMatrix &a, const ChoiMatrix &b);

// Purity tr(rho^2) of the trace-1 normalization of a Choi matrix. Equals 1
// exactly when the channel is unitary; shadow estimates may exceed 1.
double purity(const ChoiMatrix &m);

}  // namespace shadowqpt

#endif
