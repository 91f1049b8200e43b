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

#include "qlocomp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlocomp {

namespace {

void require_square(const CMatrix& M, int n, const char* what) {
  if (M.rows() != n || M.cols() != n) {
    std::ostringstream os;
    os << what << ": expected " << n << "x" << n << " matrix, got " << M.rows()
       << "x" << M.cols();
    throw InputError(os.str());
  }
}

}  // namespace

CMatrix kron(const CMatrix& X, const CMatrix& Y) {
  CMatrix out(X.rows() * Y.rows(), X.cols() * Y.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      out.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
    }
  }
  return out;
}

CMatrix partial_trace(const CMatrix& M, DimPair dims, Subsystem traced) {
  require_square(M, dims.total(), "partial_trace");
  if (traced == Subsystem::B) {
    CMatrix out = CMatrix::Zero(dims.dA, dims.dA);
    for (int a = 0; a < dims.dA; ++a)
      for (int c = 0; c < dims.dA; ++c)
        for (int b = 0; b < dims.dB; ++b)
          out(a, c) += M(dims.index(a, b), dims.index(c, b));
    return out;
  }
  CMatrix out = CMatrix::Zero(dims.dB, dims.dB);
  for (int a = 0; a < dims.dA; ++a)
    out += M.block(a * dims.dB, a * dims.dB, dims.dB, dims.dB);
  return out;
}

double max_abs(const CMatrix& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& M) {
  return max_abs(M - M.adjoint());
}

bool all_finite(const CMatrix& M) { return M.allFinite(); }

HermEig herm_eig(const CMatrix& M, double tol) {
  if (M.rows() != M.cols()) throw InputError("herm_eig: matrix is not square");
  const double defect = hermiticity_defect(M);
  if (defect > tol) {
    std::ostringstream os;
    os << "herm_eig: matrix is not Hermitian (max |M - M^dagger| = " << defect
       << " > " << tol << ")";
    throw InputError(os.str());
  }
  const CMatrix sym = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericalError("herm_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix matrix_fn(const CMatrix& M, MatrixFunction fn, double rank_tol) {
  const HermEig eig = herm_eig(M, 1e-8 * std::max(1.0, max_abs(M)));
  const RVector& w = eig.values;
  const double wmax = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
  if (fn == MatrixFunction::Log && wmax == 0.0)
    throw InputError("matrix_fn: log of the zero matrix");
  const double cut = rank_tol * wmax;
  RVector f = RVector::Zero(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double x = w(k);
    switch (fn) {
      case MatrixFunction::Pinv:
        if (std::abs(x) > cut) f(k) = 1.0 / x;
        break;
      case MatrixFunction::Sqrt:
        if (x > cut) f(k) = std::sqrt(x);
        break;
      case MatrixFunction::InvSqrt:
        if (x > cut) f(k) = 1.0 / std::sqrt(x);
        break;
      case MatrixFunction::Log:
        if (x > cut) f(k) = std::log(x);
        break;
    }
  }
  return eig.vectors * f.asDiagonal() * eig.vectors.adjoint();
}

CMatrix reshuffle(const CMatrix& M, DimPair dims) {
  require_square(M, dims.total(), "reshuffle");
  const int dA = dims.dA;
  const int dB = dims.dB;
  CMatrix out(dA * dA, dB * dB);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dB; ++b)
      for (int ap = 0; ap < dA; ++ap)
        for (int bp = 0; bp < dB; ++bp)
          out(a * dA + ap, b * dB + bp) = M(a * dB + b, ap * dB + bp);
  return out;
}

int svd_rank(const CMatrix& M, double rank_tol) {
  if (M.size() == 0) return 0;
  Eigen::BDCSVD<CMatrix> svd(M);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = rank_tol * s(0);
  return static_cast<int>((s.array() > cut).count());
}

int psd_rank(const CMatrix& M, double rank_tol) {
  const HermEig eig = herm_eig(M, 1e-8 * std::max(1.0, max_abs(M)));
  const double wmax = eig.values.size() ? eig.values.maxCoeff() : 0.0;
  if (wmax <= 0.0) return 0;
  return static_cast<int>((eig.values.array() > rank_tol * wmax).count());
}

double entropy_of_spectrum(const RVector& p) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (p(k) > 1e-15) s -= p(k) * std::log(p(k));
  return s;
}

double entropy(const CMatrix& rho) {
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-10) {
    std::ostringstream os;
    os << "entropy: trace deviates from 1 by " << std::abs(tr - 1.0);
    throw InputError(os.str());
  }
  return entropy_of_spectrum(herm_eig(rho, 1e-8).values);
}

CVector vectorize(const CMatrix& X) {
  CVector v(X.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index k = 0; k < X.cols(); ++k) v(i * X.cols() + k) = X(i, k);
  return v;
}

CMatrix devectorize(const CVector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw InputError("devectorize: length does not match rows * cols");
  CMatrix X(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) X(i, k) = v(i * cols + k);
  return X;
}

CMatrix superoperator(std::span<const CMatrix> kraus) {
  if (kraus.empty()) throw InputError("superoperator: empty Kraus list");
  const Eigen::Index r = kraus.front().rows();
  const Eigen::Index c = kraus.front().cols();
  CMatrix S = CMatrix::Zero(r * r, c * c);
  for (const CMatrix& K : kraus) S += kron(K, K.conjugate());
  return S;
}

CMatrix apply_kraus(std::span<const CMatrix> kraus, const CMatrix& X) {
  if (kraus.empty()) throw InputError("apply_kraus: empty Kraus list");
  CMatrix out = CMatrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const CMatrix& K : kraus) out += K * X * K.adjoint();
  return out;
}

CMatrix apply_kraus_on_B(std::span<const CMatrix> kraus, const CMatrix& rho,
                         DimPair dims) {
  require_square(rho, dims.total(), "apply_kraus_on_B");
  if (kraus.empty()) throw InputError("apply_kraus_on_B: empty Kraus list");
  const int dOut = static_cast<int>(kraus.front().rows());
  const CMatrix idA = CMatrix::Identity(dims.dA, dims.dA);
  CMatrix out = CMatrix::Zero(dims.dA * dOut, dims.dA * dOut);
  for (const CMatrix& K : kraus) {
    if (K.cols() != dims.dB)
      throw InputError("apply_kraus_on_B: Kraus input dimension mismatch");
    const CMatrix big = kron(idA, K);
    out += big * rho * big.adjoint();
  }
  return out;
}

double trace_norm(const CMatrix& H) {
  return herm_eig(H, 1e-8 * std::max(1.0, max_abs(H))).values.cwiseAbs().sum();
}

CMatrix projector(const CMatrix& basis, int dim) {
  if (basis.cols() == 0) return CMatrix::Zero(dim, dim);
  return basis * basis.adjoint();
}

std::vector<std::pair<int, int>> cluster_sorted(const RVector& sorted_values,
                                                double gap) {
  std::vector<std::pair<int, int>> groups;
  const int n = static_cast<int>(sorted_values.size());
  int start = 0;
  for (int k = 1; k <= n; ++k) {
    if (k == n || sorted_values(k) - sorted_values(k - 1) > gap) {
      groups.emplace_back(start, k);
      start = k;
    }
  }
  return groups;
}

CMatrix null_space(const CMatrix& M, double rank_tol, double scale) {
  const Eigen::Index n = M.cols();
  if (M.rows() == 0) return CMatrix::Identity(n, n);
  Eigen::BDCSVD<CMatrix> svd(M, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double smax = std::max(s.size() ? s(0) : 0.0, scale);
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rank_tol * smax && smax > 0.0) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

CMatrix range_basis(const CMatrix& M, double rank_tol) {
  Eigen::BDCSVD<CMatrix> svd(M, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rank_tol * smax && smax > 0.0) ++rank;
  return svd.matrixU().leftCols(rank);
}

CMatrix commutant_basis(std::span<const CMatrix> generators, int d,
                        double rank_tol) {
  const int n = d * d;
  if (generators.empty()) return CMatrix::Identity(n, n);
  const CMatrix id = CMatrix::Identity(d, d);
  CMatrix stacked(static_cast<Eigen::Index>(generators.size()) * n, n);
  Eigen::Index row = 0;
  double scale = 0.0;
  for (const CMatrix& Y : generators) {
    scale = std::max(scale, Y.norm());
    if (Y.rows() != d || Y.cols() != d)
      throw InputError("commutant_basis: generator has wrong size");
    // vec(Y X - X Y) = (Y (x) I - I (x) Y^T) vec(X)
    stacked.middleRows(row, n) = kron(Y, id) - kron(id, Y.transpose());
    row += n;
  }
  return null_space(stacked, rank_tol, scale);
}

CMatrix random_ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  CMatrix G(rows, cols);
  // Fill in a fixed order so results do not depend on Eigen's storage order.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = n01(rng);
      const double im = n01(rng);
      G(i, j) = cplx(re, im);
    }
  return G;
}

CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  const CMatrix G = random_ginibre(d, d, rng);
  return 0.5 * (G + G.adjoint());
}

CMatrix random_unitary(int d, std::mt19937_64& rng) {
  const CMatrix G = random_ginibre(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(G);
  CMatrix Q = qr.householderQ();
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  // Phase fix makes the distribution Haar.
  for (int k = 0; k < d; ++k) {
    const cplx r = R(k, k);
    const double mag = std::abs(r);
    if (mag > 0.0) Q.col(k) *= r / mag;
  }
  return Q;
}

CMatrix random_density(int d, int rank, std::mt19937_64& rng) {
  const CMatrix G = random_ginibre(d, rank, rng);
  CMatrix rho = G * G.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

CMatrix expi_hermitian(const CMatrix& H) {
  const HermEig eig = herm_eig(H, 1e-8 * std::max(1.0, max_abs(H)));
  CVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k)
    phases(k) = std::polar(1.0, eig.values(k));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace qlocomp
