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


#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qlocomp/tensor.hpp"

namespace qlocomp {
namespace {

CMatrix diag(std::initializer_list<double> v) {
  RVector d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<cplx>().asDiagonal();
}

CMatrix pauli_x() {
  CMatrix X(2, 2);
  X << 0, 1, 1, 0;
  return X;
}

CMatrix bell() {
  CVector v = CVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_LT(max_abs(kron(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)) - CMatrix::Identity(4, 4)), 1e-15);
}

TEST(Kron, DiagonalFactors) {
  EXPECT_LT(max_abs(kron(diag({1, 2}), diag({1, 3})) - diag({1, 3, 2, 6})), 1e-15);
}

TEST(Kron, MixedProductOnVectors) {
  std::mt19937_64 rng(1);
  const CMatrix X = random_ginibre(2, 2, rng), Y = random_ginibre(3, 3, rng);
  const CMatrix u = random_ginibre(2, 1, rng), v = random_ginibre(3, 1, rng);
  EXPECT_LT(max_abs(kron(X, Y) * kron(u, v) - kron(X * u, Y * v)), 1e-12);
}

TEST(Kron, MatchesLoopReference) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const CMatrix X = random_ginibre(2 + t % 2, 3, rng), Y = random_ginibre(4, 1 + t, rng);
    EXPECT_LT(max_abs(kron(X, Y) - oracle::kron(X, Y)), 1e-14);
  }
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  EXPECT_LT(max_abs(partial_trace(bell(), {2, 2}, Subsystem::B) - CMatrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, ProductOperator) {
  std::mt19937_64 rng(3);
  const CMatrix X = random_ginibre(2, 2, rng), Y = random_ginibre(3, 3, rng);
  EXPECT_LT(max_abs(partial_trace(kron(X, Y), {2, 3}, Subsystem::B) - X * Y.trace()), 1e-12);
  EXPECT_LT(max_abs(partial_trace(kron(X, Y), {2, 3}, Subsystem::A) - Y * X.trace()), 1e-12);
}

TEST(PartialTrace, IdentityOverFour) {
  const CMatrix r = partial_trace(CMatrix::Identity(4, 4) / 4.0, {2, 2}, Subsystem::A);
  EXPECT_LT(max_abs(r - CMatrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, TracePreservingAndMatchesLoops) {
  std::mt19937_64 rng(4);
  for (int dA = 1; dA <= 4; ++dA)
    for (int dB = 1; dB <= 4; ++dB) {
      const CMatrix M = random_ginibre(dA * dB, dA * dB, rng);
      const CMatrix rA = partial_trace(M, {dA, dB}, Subsystem::B);
      const CMatrix rB = partial_trace(M, {dA, dB}, Subsystem::A);
      EXPECT_LT(std::abs(rA.trace() - M.trace()), 1e-12);
      EXPECT_LT(std::abs(rB.trace() - M.trace()), 1e-12);
      EXPECT_LT(max_abs(rA - oracle::partial_trace(M, dA, dB, true)), 1e-13);
      EXPECT_LT(max_abs(rB - oracle::partial_trace(M, dA, dB, false)), 1e-13);
    }
}

TEST(PartialTrace, RejectsWrongShape) {
  EXPECT_THROW(partial_trace(CMatrix::Identity(5, 5), {2, 2}, Subsystem::A), InputError);
}

TEST(HermEig, PauliX) {
  const HermEig e = herm_eig(pauli_x());
  EXPECT_NEAR(e.values(0), -1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0, 1e-14);
}

TEST(HermEig, SortsAscending) {
  const HermEig e = herm_eig(diag({3, 1, 2}));
  EXPECT_NEAR(e.values(0), 1.0, 1e-14);
  EXPECT_NEAR(e.values(1), 2.0, 1e-14);
  EXPECT_NEAR(e.values(2), 3.0, 1e-14);
}

TEST(HermEig, ReconstructsRandomHermitian) {
  std::mt19937_64 rng(5);
  for (int d : {1, 2, 6, 17, 64}) {
    const CMatrix H = random_hermitian(d, rng);
    const HermEig e = herm_eig(H);
    const CMatrix R = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE((R - H).norm() / H.norm(), 1e-10) << "d=" << d;
    EXPECT_LT(max_abs(e.vectors.adjoint() * e.vectors - CMatrix::Identity(d, d)), 1e-10);
  }
}

TEST(HermEig, RejectsNonHermitian) {
  CMatrix M = CMatrix::Zero(2, 2);
  M(0, 1) = 1.0;
  EXPECT_THROW(herm_eig(M), InputError);
}

TEST(MatrixFn, SqrtOfDiagonal) {
  EXPECT_LT(max_abs(matrix_fn(diag({4, 9}), MatrixFunction::Sqrt) - diag({2, 3})), 1e-14);
}

TEST(MatrixFn, PinvDropsKernel) {
  EXPECT_LT(max_abs(matrix_fn(diag({2, 0}), MatrixFunction::Pinv) - diag({0.5, 0})), 1e-15);
}

TEST(MatrixFn, InvSqrtSandwichIsSupportProjector) {
  std::mt19937_64 rng(6);
  const CMatrix rho = random_density(4, 2, rng);
  const CMatrix s = matrix_fn(rho, MatrixFunction::InvSqrt);
  const CMatrix P = s * rho * s;
  EXPECT_LT(max_abs(P * P - P), 1e-10);
  EXPECT_EQ(psd_rank(P), 2);
  EXPECT_LT(max_abs(P * rho - rho), 1e-10);
}

TEST(MatrixFn, LogOfDiagonal) {
  const CMatrix L = matrix_fn(diag({0.25, 0.75}), MatrixFunction::Log);
  EXPECT_NEAR(L(0, 0).real(), std::log(0.25), 1e-14);
  EXPECT_NEAR(L(1, 1).real(), std::log(0.75), 1e-14);
}

TEST(MatrixFn, SqrtSquaredReproducesInput) {
  std::mt19937_64 rng(7);
  for (int d : {2, 5, 9}) {
    const CMatrix rho = random_density(d, d - 1, rng);
    const CMatrix s = matrix_fn(rho, MatrixFunction::Sqrt);
    EXPECT_LT((s * s - rho).norm(), 1e-10);
  }
}

TEST(Reshuffle, IsAnInvolution) {
  std::mt19937_64 rng(8);
  for (int d : {2, 3, 4}) {
    const CMatrix M = random_ginibre(d * d, d * d, rng);
    EXPECT_LT(max_abs(reshuffle(reshuffle(M, {d, d}), {d, d}) - M), 1e-15);
  }
}

TEST(Reshuffle, IdentitySuperoperatorGivesMaximallyEntangledProjector) {
  for (int d : {2, 3}) {
    const CVector I = vectorize(CMatrix::Identity(d, d));
    EXPECT_LT(max_abs(reshuffle(CMatrix::Identity(d * d, d * d), {d, d}) - I * I.adjoint()), 1e-15);
  }
}

TEST(Reshuffle, RankOneSuperoperator) {
  std::mt19937_64 rng(9);
  const CMatrix X = random_ginibre(3, 3, rng);
  const CVector v = vectorize(X);
  EXPECT_LT(max_abs(reshuffle(kron(X, X.conjugate()), {3, 3}) - v * v.adjoint()), 1e-13);
}

TEST(Reshuffle, HermitianChoiForAdjointClosedKraus) {
  std::mt19937_64 rng(10);
  const CMatrix K = random_ginibre(3, 3, rng);
  const std::vector<CMatrix> kraus{K, K.adjoint()};
  const CMatrix S = superoperator(kraus);
  EXPECT_LT(hermiticity_defect(S), 1e-12);
  EXPECT_LT(hermiticity_defect(reshuffle(S, {3, 3})), 1e-12);
}

TEST(Superoperator, ActsOnVectorizedOperators) {
  std::mt19937_64 rng(11);
  const std::vector<CMatrix> kraus{random_ginibre(3, 3, rng), random_ginibre(3, 3, rng)};
  const CMatrix X = random_ginibre(3, 3, rng);
  EXPECT_LT((superoperator(kraus) * vectorize(X) - vectorize(apply_kraus(kraus, X))).norm(), 1e-12);
  EXPECT_LT(max_abs(devectorize(vectorize(X), 3, 3) - X), 1e-15);
}

TEST(SvdRank, Examples) {
  EXPECT_EQ(svd_rank(CMatrix::Identity(3, 3)), 3);
  EXPECT_EQ(svd_rank(partial_trace(bell(), {2, 2}, Subsystem::A)), 2);
  EXPECT_EQ(svd_rank(CMatrix::Zero(4, 4)), 0);
  std::mt19937_64 rng(12);
  const CMatrix M = random_ginibre(6, 3, rng) * random_ginibre(3, 6, rng);
  EXPECT_EQ(svd_rank(M), 3);
  EXPECT_EQ(svd_rank(M), oracle::matrix_rank(M, 1e-9));
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(bell()), 0.0, 1e-14);
  EXPECT_NEAR(entropy(CMatrix::Identity(2, 2) / 2.0), std::numbers::ln2, 1e-14);
  EXPECT_NEAR(entropy(diag({0.5, 0.25, 0.25})), 1.5 * std::numbers::ln2, 1e-14);
}

TEST(Entropy, RejectsUnnormalized) {
  EXPECT_THROW(entropy(CMatrix::Identity(2, 2)), InputError);
}

TEST(Entropy, AgreesWithReference) {
  std::mt19937_64 rng(13);
  const CMatrix rho = random_density(5, 3, rng);
  EXPECT_NEAR(entropy(rho), oracle::entropy(rho), 1e-12);
}

TEST(ClusterSorted, SplitsAtGaps) {
  RVector v(5);
  v << 0.0, 1e-10, 1.0, 1.0 + 5e-9, 3.0;
  const auto groups = cluster_sorted(v, 1e-8);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0], std::make_pair(0, 2));
  EXPECT_EQ(groups[1], std::make_pair(2, 4));
  EXPECT_EQ(groups[2], std::make_pair(4, 5));
}

TEST(Commutant, MatchesLinearSolve) {
  std::mt19937_64 rng(14);
  const CMatrix Z = diag({1, 1, 2});
  std::vector<CMatrix> gens{Z};
  EXPECT_EQ(commutant_basis(gens, 3).cols(), 5);
  EXPECT_EQ(oracle::commutant_dimension(gens, 3), 5);
  gens.push_back(random_hermitian(3, rng));
  EXPECT_EQ(commutant_basis(gens, 3).cols(), oracle::commutant_dimension(gens, 3));
}

TEST(Commutant, ScalarGeneratorWithRoundoff) {
  std::mt19937_64 rng(17);
  const CMatrix U = random_unitary(3, rng);
  const std::vector<CMatrix> gens{U * (CMatrix::Identity(3, 3) / std::sqrt(3.0)) * U.adjoint()};
  EXPECT_EQ(commutant_basis(gens, 3).cols(), 9);
}

TEST(NullSpace, ScaleFloorsTheThreshold) {
  CMatrix M = CMatrix::Zero(2, 2);
  M(0, 0) = 1e-17;
  EXPECT_EQ(null_space(M).cols(), 1);
  EXPECT_EQ(null_space(M, 1e-9, 1.0).cols(), 2);
}

TEST(NullSpace, OrthonormalKernel) {
  std::mt19937_64 rng(15);
  const CMatrix M = random_ginibre(2, 5, rng);
  const CMatrix N = null_space(M);
  EXPECT_EQ(N.cols(), 3);
  EXPECT_LT(max_abs(M * N), 1e-12);
  EXPECT_LT(max_abs(N.adjoint() * N - CMatrix::Identity(3, 3)), 1e-12);
}

TEST(RandomEnsembles, UnitaryAndDensity) {
  std::mt19937_64 rng(16);
  const CMatrix U = random_unitary(5, rng);
  EXPECT_LT(max_abs(U.adjoint() * U - CMatrix::Identity(5, 5)), 1e-12);
  const CMatrix rho = random_density(5, 2, rng);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_EQ(psd_rank(rho), 2);
  const CMatrix H = random_hermitian(4, rng);
  const CMatrix E = expi_hermitian(H);
  EXPECT_LT(max_abs(E - oracle::expi(H)), 1e-12);
}

}  // namespace
}  // namespace qlocomp
