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


#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qlocomp/sufficiency.hpp"

namespace qlocomp {
namespace {

BipartiteState bell() {
  return make_pure(CMatrix::Identity(2, 2) / std::sqrt(2.0));
}

BipartiteState product(std::mt19937_64& rng, int dA, int dB) {
  return validate_and_restrict(kron(random_density(dA, dA, rng), random_density(dB, dB, rng)), {dA, dB});
}

RMatrix duplicate_table() {
  // Columns 0 and 2 share a conditional.
  RMatrix p(2, 3);
  p << 0.10, 0.20, 0.15,
       0.20, 0.05, 0.30;
  return p;
}

CMatrix choi_of(const std::vector<KrausTerm>& kraus, int dA, bool tilde) {
  const int dB = static_cast<int>(kraus.front().K.cols());
  CMatrix out = CMatrix::Zero(dA * dB, dA * dB);
  for (int a = 0; a < dA; ++a)
    for (int a2 = 0; a2 < dA; ++a2) {
      CMatrix E = CMatrix::Zero(dA, dA);
      E(a, a2) = 1.0;
      out.block(a * dB, a2 * dB, dB, dB) =
          tilde ? apply_omega_tilde(kraus, E) : apply_omega_dagger(kraus, E);
    }
  return out;
}

TEST(BuildJ, ProductStateCancelsMarginal) {
  std::mt19937_64 rng(31);
  const CMatrix rA = random_density(2, 2, rng), rB = random_density(3, 3, rng);
  const BipartiteState s = validate_and_restrict(kron(rA, rB), {2, 3});
  EXPECT_LT(max_abs(build_J(s) - kron(rA, CMatrix::Identity(3, 3))), 1e-12);
}

TEST(BuildJ, BellIsUnnormalizedMaximallyEntangled) {
  const CVector I = vectorize(CMatrix::Identity(2, 2));
  EXPECT_LT(max_abs(build_J(bell()) - I * I.adjoint()), 1e-14);
}

TEST(BuildJ, ClassicalConditionals) {
  const RMatrix p = duplicate_table();
  const BipartiteState s = make_classical(p);
  const CMatrix J = build_J(s);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) {
      const double pb = p.col(b).sum();
      EXPECT_NEAR(J(s.dims.index(a, b), s.dims.index(a, b)).real(), p(a, b) / pb, 1e-14);
    }
  EXPECT_NEAR((J - CMatrix(J.diagonal().asDiagonal())).norm(), 0.0, 1e-14);
}

TEST(BuildJ, MarginalIsIdentity) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 4; ++t) {
    const BipartiteState s = random_full_rank_state({2 + t % 2, 2 + t / 2}, rng);
    const CMatrix J = build_J(s);
    EXPECT_LT(max_abs(partial_trace(J, s.dims, Subsystem::A) - CMatrix::Identity(s.dims.dB, s.dims.dB)), 1e-9);
    EXPECT_GT(herm_eig(J).values.minCoeff(), -1e-12);
  }
}

TEST(ExtractKraus, BellGivesSingleIdentityKraus) {
  const BipartiteState s = bell();
  const auto kraus = extract_kraus(build_J(s), s.dims);
  ASSERT_EQ(kraus.size(), 1u);
  EXPECT_NEAR(kraus[0].omega, 2.0, 1e-14);
  const CMatrix K = kraus[0].K;
  EXPECT_LT(max_abs(K - K(0, 0) * CMatrix::Identity(2, 2)), 1e-14);
  EXPECT_NEAR(std::abs(K(0, 0)), 1.0, 1e-14);
}

TEST(ExtractKraus, ClassicalKrausAreMatrixUnits) {
  const RMatrix p = duplicate_table();
  const BipartiteState s = make_classical(p);
  const auto kraus = extract_kraus(build_J(s), s.dims);
  ASSERT_EQ(kraus.size(), 6u);
  std::vector<double> expected, got;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 3; ++b) expected.push_back(p(a, b) / p.col(b).sum());
  for (const KrausTerm& t : kraus) {
    got.push_back(t.omega);
    int nonzero = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 3; ++b)
        if (std::abs(t.K(a, b)) > 1e-12) {
          ++nonzero;
          EXPECT_NEAR(std::abs(t.K(a, b)), std::sqrt(t.omega), 1e-12);
        }
    EXPECT_EQ(nonzero, 1);
  }
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  for (size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-12);
}

TEST(ExtractKraus, OrthogonalityAndCount) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 5; ++t) {
    const DimPair dims{2 + t % 2, 3};
    const int rank = 1 + t;
    const BipartiteState s =
        validate_and_restrict(random_density(dims.total(), std::min(rank + 2, dims.total()), rng), dims);
    const auto kraus = extract_kraus(build_J(s), s.dims);
    EXPECT_EQ(static_cast<int>(kraus.size()), psd_rank(s.rho));
    for (size_t i = 0; i < kraus.size(); ++i)
      for (size_t j = 0; j < kraus.size(); ++j) {
        const cplx ip = (kraus[i].K.adjoint() * kraus[j].K).trace();
        EXPECT_LT(std::abs(ip - (i == j ? kraus[i].omega : 0.0)), 1e-9);
      }
    EXPECT_LT(max_abs(choi_of(kraus, s.dims.dA, false) - build_J(s)), 1e-9);
  }
}

TEST(OmegaTilde, ChoiIsSqrtJ) {
  std::mt19937_64 rng(34);
  for (const BipartiteState& s : {bell(), random_full_rank_state({2, 3}, rng)}) {
    const CMatrix J = build_J(s);
    const auto kraus = extract_kraus(J, s.dims);
    EXPECT_LT(max_abs(choi_of(kraus, s.dims.dA, true) - matrix_fn(J, MatrixFunction::Sqrt)), 1e-9);
  }
}

TEST(OmegaTilde, ClassicalDiagonalAction) {
  const RMatrix p = duplicate_table();
  const BipartiteState s = make_classical(p);
  const auto kraus = extract_kraus(build_J(s), s.dims);
  for (int a = 0; a < 2; ++a) {
    CMatrix E = CMatrix::Zero(2, 2);
    E(a, a) = 1.0;
    CMatrix expected = CMatrix::Zero(3, 3);
    for (int b = 0; b < 3; ++b) expected(b, b) = std::sqrt(p(a, b) / p.col(b).sum());
    EXPECT_LT(max_abs(apply_omega_tilde(kraus, E) - expected), 1e-12);
  }
  EXPECT_LT(max_abs(apply_omega_tilde(kraus, CMatrix::Zero(2, 2))), 1e-15);
}

TEST(BuildET, ProductStateFixesEverything) {
  std::mt19937_64 rng(35);
  const BipartiteState s = product(rng, 2, 3);
  const auto kraus = extract_kraus(build_J(s), s.dims);
  EXPECT_LT(max_abs(build_ET(kraus, s.dims) - CMatrix::Identity(9, 9)), 1e-9);
}

TEST(BuildET, BellFixedPointsAreScalars) {
  const BipartiteState s = bell();
  const CMatrix E = build_ET(extract_kraus(build_J(s), s.dims), s.dims);
  const CMatrix F = fixed_point_basis(E, 1e-9);
  ASSERT_EQ(F.cols(), 1);
  const CMatrix X = devectorize(F.col(0), 2, 2);
  EXPECT_LT(max_abs(X - X(0, 0) * CMatrix::Identity(2, 2)), 1e-10);
}

TEST(BuildET, ClassicalFixedSpaceDimension) {
  const RMatrix p = duplicate_table();
  const BipartiteState s = make_classical(p);
  const CMatrix E = build_ET(extract_kraus(build_J(s), s.dims), s.dims);
  int expected = 0;
  for (int n : oracle::conditional_classes(p)) expected += n * n;
  EXPECT_EQ(fixed_point_basis(E, 1e-9).cols(), expected);
}

TEST(BuildET, KrausRouteAndSpectralProperties) {
  std::mt19937_64 rng(36);
  for (int t = 0; t < 6; ++t) {
    const BipartiteState s = random_full_rank_state({2 + t % 2, 2 + t % 3}, rng);
    const auto kraus = extract_kraus(build_J(s), s.dims);
    const CMatrix E = build_ET(kraus, s.dims);
    const EnvironmentRoute env = build_ET_environment(kraus, s.dims);
    EXPECT_LT(max_abs(E - env.E_T), 1e-9);
    EXPECT_LT(max_abs(E - superoperator(env.T_kraus)), 1e-9);
    EXPECT_LT(hermiticity_defect(E), 1e-9);
    const RVector ev = herm_eig(E).values;
    EXPECT_GE(ev.minCoeff(), -1.0 - 1e-9);
    EXPECT_LE(ev.maxCoeff(), 1.0 + 1e-9);
    const CVector I = vectorize(CMatrix::Identity(s.dims.dB, s.dims.dB));
    EXPECT_LT((E * I - I).norm(), 1e-9);
    const CMatrix off = env.O_E - CMatrix(env.O_E.diagonal().asDiagonal());
    EXPECT_LT(max_abs(off), 1e-9);
  }
}

TEST(BuildRL, MaximallyMixedGivesZero) {
  EXPECT_LT(max_abs(build_RL(CMatrix::Identity(3, 3) / 3.0)), 1e-14);
}

TEST(BuildRL, QubitSpectrum) {
  const double p = 0.3;
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = p;
  rho(1, 1) = 1 - p;
  const RVector ev = herm_eig(build_RL(rho)).values;
  const double g = std::abs(std::log(p / (1 - p)));
  EXPECT_NEAR(ev(0), -g, 1e-12);
  EXPECT_NEAR(ev(1), 0.0, 1e-12);
  EXPECT_NEAR(ev(2), 0.0, 1e-12);
  EXPECT_NEAR(ev(3), g, 1e-12);
}

TEST(BuildRL, AnnihilatesCommutingOperators) {
  std::mt19937_64 rng(37);
  const CMatrix rho = random_density(3, 3, rng);
  const CMatrix RL = build_RL(rho);
  EXPECT_LT(hermiticity_defect(RL), 1e-12);
  EXPECT_LT((RL * vectorize(rho)).norm(), 1e-12);
  EXPECT_LT((RL * vectorize(CMatrix::Identity(3, 3))).norm(), 1e-12);
  const CMatrix f = rho * rho - 0.5 * rho;
  EXPECT_LT((RL * vectorize(f)).norm(), 1e-12);
  const CMatrix X = random_ginibre(3, 3, rng);
  const CMatrix L = matrix_fn(rho, MatrixFunction::Log);
  EXPECT_LT((RL * vectorize(X) - vectorize(X * L - L * X)).norm(), 1e-11);
}

TEST(ProjectPV, UnitalMarginalGivesP1) {
  std::mt19937_64 rng(38);
  const CMatrix U = random_unitary(4, rng);
  // Maximally mixed rho_B: a random unitary applied to half of a maximally
  // entangled state, mixed with noise on A only.
  CVector psi = vectorize(U) / 2.0;
  const CMatrix rho = 0.7 * psi * psi.adjoint() +
                      0.3 * kron(random_density(4, 4, rng), CMatrix::Identity(4, 4) / 4.0);
  const BipartiteState s = validate_and_restrict(rho, {4, 4});
  const SufficiencyCore core = build_sufficiency_core(s);
  EXPECT_LT(max_abs(core.RL), 1e-9);
  EXPECT_LT(max_abs(core.pv.PV - core.P1), 1e-8);
}

TEST(ProjectPV, BellGivesScalarProjector) {
  const SufficiencyCore core = build_sufficiency_core(bell());
  const CVector I = vectorize(CMatrix::Identity(2, 2));
  EXPECT_LT(max_abs(core.pv.PV - I * I.adjoint() / 2.0), 1e-9);
  EXPECT_EQ(core.pv.basis.cols(), 1);
}

TEST(ProjectPV, ClassicalRankIsSumOfSquaredClassSizes) {
  std::mt19937_64 rng(39);
  for (int t = 0; t < 6; ++t) {
    const int dB = 3 + t % 3;
    const RMatrix p = random_classical_table(3, dB, 1 + t % dB, rng);
    int expected = 0;
    for (int n : oracle::conditional_classes(p)) expected += n * n;
    const SufficiencyCore core = build_sufficiency_core(make_classical(p));
    EXPECT_EQ(core.pv.basis.cols(), expected);
  }
}

TEST(ProjectPV, RankMatchesBruteForceCommutant) {
  std::mt19937_64 rng(40);
  std::vector<BipartiteState> states{bell(), product(rng, 2, 3), random_full_rank_state({2, 2}, rng)};
  for (const auto& shape : std::vector<std::vector<std::pair<int, int>>>{
           {{1, 2}, {1, 1}}, {{2, 2}}, {{2, 1}, {1, 2}}, {{1, 1}, {1, 3}}})
    states.push_back(random_planted(2, shape, rng).state);
  for (const BipartiteState& s : states) {
    const SufficiencyCore core = build_sufficiency_core(s);
    EXPECT_EQ(core.pv.basis.cols(), oracle::redundancy_dimension(s.rho, s.dims.dA, s.dims.dB));
    EXPECT_LT(core.pv.disagreement, 1e-8);
  }
}

TEST(ProjectPV, PlantedRankIsSumOfSquaredRightDimensions) {
  std::mt19937_64 rng(41);
  const PlantedState ps = random_planted(2, {{1, 1}, {2, 1}, {1, 2}}, rng);
  const SufficiencyCore core = build_sufficiency_core(ps.state);
  int expected = 0;
  for (int r : ps.dR) expected += r * r;
  EXPECT_EQ(core.pv.basis.cols(), expected);
}

TEST(ScreenNonabelian, Examples) {
  std::mt19937_64 rng(42);
  EXPECT_FALSE(screen_nonabelian(build_sufficiency_core(bell()).E_T));
  EXPECT_TRUE(screen_nonabelian(build_sufficiency_core(product(rng, 2, 2)).E_T));
  for (int t = 0; t < 5; ++t)
    EXPECT_FALSE(screen_nonabelian(build_sufficiency_core(random_full_rank_state({2, 2}, rng)).E_T));
}

TEST(CoreInvariants, HoldAcrossFamilies) {
  std::mt19937_64 rng(43);
  std::vector<BipartiteState> states{bell(), product(rng, 3, 2), make_classical(duplicate_table()),
                                     random_full_rank_state({3, 3}, rng),
                                     random_planted(2, {{2, 2}, {1, 1}}, rng).state,
                                     make_pure(random_schmidt_coeffs(3, 3, 3, rng))};
  for (size_t i = 0; i < states.size(); ++i) {
    const SufficiencyCore core = build_sufficiency_core(states[i]);
    for (const InvariantCheck& c : check_core_invariants(core, states[i]))
      EXPECT_TRUE(c.pass()) << "state " << i << ": " << c.name << " = " << c.value << " > " << c.threshold;
  }
}

TEST(CoreInvariants, ProjectorsAreOrthogonal) {
  std::mt19937_64 rng(44);
  const SufficiencyCore core = build_sufficiency_core(random_planted(2, {{1, 2}, {1, 1}}, rng).state);
  auto defect = [](const CMatrix& P) { return std::max(max_abs(P * P - P), max_abs(P - P.adjoint())); };
  EXPECT_LT(defect(core.P1), 1e-9);
  EXPECT_LT(defect(core.pv.PV), 1e-9);
  for (const EigenGroup& g : core.Q_list) EXPECT_LT(defect(projector(g.basis, g.basis.rows())), 1e-9);
  EXPECT_LT(max_abs(core.E_T * core.pv.PV - core.pv.PV), 1e-8);
  EXPECT_LT((core.RL * core.pv.PV - core.pv.PV * core.RL).norm(), 1e-8);
}

TEST(BuildJ, SingularMarginalRejected) {
  BipartiteState s = bell();
  s.rho = CMatrix::Zero(4, 4);
  s.rho(0, 0) = 1.0;
  EXPECT_THROW(build_J(s), NumericalError);
}

}  // namespace
}  // namespace qlocomp
