// Copyright 2026 The qlocomp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense complex linear algebra kernel.
//
// Basis conventions (fixed for the whole library):
//   * |a>|b> on H_A (x) H_B has composite index a * dB + b.
//   * |I>> = sum_k |k>|k>, and vec(X) = (X (x) I)|I>>, i.e. vec is the
//     row-major flattening: vec(X)[i * d + k] = X(i, k).
//   * With this vec, vec(A X B) = (A (x) B^T) vec(X). A map with Kraus
//     operators {K} has superoperator sum_K K (x) conj(K).

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qlocomp {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kDefaultGroupTol = 1e-8;

/// Raised on malformed or out-of-contract input (dimensions, positivity,
/// normalization).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an internal numerical consistency check fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local dimensions of a bipartite space H_A (x) H_B.
struct DimPair {
  int dA = 1;
  int dB = 1;

  [[nodiscard]] int total() const { return dA * dB; }
  [[nodiscard]] int index(int a, int b) const { return a * dB + b; }
  friend bool operator==(const DimPair&, const DimPair&) = default;
};

enum class Subsystem { A, B };

CMatrix kron(const CMatrix& X, const CMatrix& Y);

/// Traces out `traced` and returns the reduced matrix on the other factor.
CMatrix partial_trace(const CMatrix& M, DimPair dims, Subsystem traced);

struct HermEig {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

/// Eigendecomposition of a Hermitian matrix. Throws InputError when
/// max|M - M^dagger| exceeds `tol`; the input is symmetrized first.
HermEig herm_eig(const CMatrix& M, double tol = 1e-8);

enum class MatrixFunction { Sqrt, Log, InvSqrt, Pinv };

/// Spectral function on the eigenvalues above rank_tol * max|lambda|.
/// Eigenvalues below the threshold map to zero (log is taken on the support).
CMatrix matrix_fn(const CMatrix& M, MatrixFunction fn,
                  double rank_tol = kDefaultRankTol);

/// M[(a,b),(a',b')] -> R[(a,a'),(b,b')]. Maps a superoperator matrix to its
/// Choi matrix and back (involution for dA == dB).
CMatrix reshuffle(const CMatrix& M, DimPair dims);

/// Number of singular values above rank_tol * sigma_max; 0 for the zero matrix.
int svd_rank(const CMatrix& M, double rank_tol = kDefaultRankTol);

/// Number of eigenvalues above rank_tol * lambda_max for a Hermitian PSD matrix.
int psd_rank(const CMatrix& M, double rank_tol = kDefaultRankTol);

/// Von Neumann entropy in nats. Throws InputError if |tr(rho) - 1| > 1e-10.
double entropy(const CMatrix& rho);

/// -sum p ln p over p > 1e-15.
double entropy_of_spectrum(const RVector& p);

CVector vectorize(const CMatrix& X);
CMatrix devectorize(const CVector& v, int rows, int cols);

/// Superoperator sum_K K (x) conj(K) acting on vectorized operators.
CMatrix superoperator(std::span<const CMatrix> kraus);

CMatrix apply_kraus(std::span<const CMatrix> kraus, const CMatrix& X);

/// (id_A (x) Phi_B)(rho) for a map Phi given by Kraus operators on B.
CMatrix apply_kraus_on_B(std::span<const CMatrix> kraus, const CMatrix& rho,
                         DimPair dims);

/// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const CMatrix& H);

double max_abs(const CMatrix& M);
double hermiticity_defect(const CMatrix& M);
bool all_finite(const CMatrix& M);

/// Orthogonal projector onto the span of the orthonormal columns of `basis`.
CMatrix projector(const CMatrix& basis, int dim);

/// Splits a sorted list of values at gaps larger than `gap`. Returns [begin,
/// end) index ranges.
std::vector<std::pair<int, int>> cluster_sorted(const RVector& sorted_values,
                                                double gap);

/// Orthonormal basis (columns) of the numerical null space of M. Singular
/// values count as nonzero above rank_tol * max(sigma_max, scale), so a
/// matrix that is zero up to rounding has a full null space when `scale`
/// gives the magnitude of its inputs.
CMatrix null_space(const CMatrix& M, double rank_tol = kDefaultRankTol,
                   double scale = 0.0);

/// Orthonormal basis (columns) of the column space of M.
CMatrix range_basis(const CMatrix& M, double rank_tol = kDefaultRankTol);

/// Orthonormal basis (vectorized, as columns) of the commutant
/// {X : [X, Y] = 0 for all Y in generators} of a set of d x d matrices.
CMatrix commutant_basis(std::span<const CMatrix> generators, int d,
                        double rank_tol = kDefaultRankTol);

// Random ensembles. All draw from the caller's engine only.
CMatrix random_ginibre(int rows, int cols, std::mt19937_64& rng);
CMatrix random_hermitian(int d, std::mt19937_64& rng);
CMatrix random_unitary(int d, std::mt19937_64& rng);
CMatrix random_density(int d, int rank, std::mt19937_64& rng);

CMatrix expi_hermitian(const CMatrix& H);

}  // namespace qlocomp
