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

// Operators derived from a bipartite state that pin down the redundancy
// algebra on B:
//
//   J      = rho_B^{-1/2} rho_AB rho_B^{-1/2}, the Choi operator of the unital
//            CP map Omega^dagger(X) = tr_A(J (X^T (x) I)) = sum K^dagger X K.
//   E_T    = superoperator of T = R^{tau,Omega_E} o Omega_E, whose fixed points
//            are the commutant of Im Omega^dagger.
//   RL     = superoperator of X -> [X, log rho_B].
//   P_V    = projector onto the RL-invariant part of the fixed space of E_T;
//            it is the superoperator of the conditional expectation onto the
//            redundancy algebra.

#include <string>
#include <vector>

#include "qlocomp/state.hpp"

namespace qlocomp {

struct Tolerances {
  double rank_tol = kDefaultRankTol;
  double group_tol = kDefaultGroupTol;
  double fix_tol = 1e-9;
  double intersect_tol = 1e-7;
  double agree_tol = 1e-8;
  double commute_tol = 1e-7;
};

/// One Kraus operator of Omega^dagger(X) = sum_i K_i^dagger X K_i. K is
/// dA x dB (so K^dagger maps H_A -> H_B) and tr(K_i^dagger K_j) = omega_i
/// delta_ij.
struct KrausTerm {
  CMatrix K;
  double omega = 0.0;
};

struct EigenGroup {
  double eta = 0.0;
  CMatrix basis;  // orthonormal columns spanning the eigenspace
};

struct ProjectionPV {
  CMatrix PV;           // from the SVD intersection (authoritative)
  CMatrix PV_anderson;  // 2 sum_eta Q_eta (Q_eta + P_1)^+ P_1
  CMatrix basis;        // orthonormal columns spanning V
  double disagreement = 0.0;  // Frobenius norm of PV - PV_anderson
};

struct SufficiencyCore {
  DimPair dims;
  CMatrix J;
  std::vector<KrausTerm> kraus;
  RVector O_E;  // diagonal of Omega_E(I_B) in the Kraus eigenbasis
  CMatrix E_T;
  CMatrix RL;
  CMatrix P1_basis;
  CMatrix P1;
  std::vector<EigenGroup> Q_list;
  ProjectionPV pv;
};

CMatrix build_J(const BipartiteState& state, double rank_tol = kDefaultRankTol);

std::vector<KrausTerm> extract_kraus(const CMatrix& J, DimPair dims,
                                     double rank_tol = kDefaultRankTol);

/// Omega^dagger(X) = sum K^dagger X K (unital).
CMatrix apply_omega_dagger(const std::vector<KrausTerm>& kraus, const CMatrix& X);

/// Omega~^dagger(X) = sum omega_i^{-1/2} K_i^dagger X K_i. Its Choi operator
/// is sqrt(J).
CMatrix apply_omega_tilde(const std::vector<KrausTerm>& kraus, const CMatrix& X);

/// E_T = sum_{a,b} Omega~^dagger(|a><b|) (x) conj(Omega~^dagger(|a><b|)).
CMatrix build_ET(const std::vector<KrausTerm>& kraus, DimPair dims);

struct EnvironmentRoute {
  CMatrix O_E;                  // Omega_E(I_B) = sum_a F_a F_a^dagger
  std::vector<CMatrix> T_kraus;  // F_a^dagger O_E^{-1/2} F_b
  CMatrix E_T;
};

/// Builds T through the complementary channel: F_a = sum_i |phi_i><a| K_i,
/// T_(a,b) = F_a^dagger O_E^{-1/2} F_b, with |phi_i> the Kraus eigenbasis
/// order. Independent of build_ET's closed form.
EnvironmentRoute build_ET_environment(const std::vector<KrausTerm>& kraus,
                                      DimPair dims, double rank_tol = kDefaultRankTol);

/// RL = I (x) (log rho_B)^T - log rho_B (x) I; RL vec(X) = vec([X, log rho_B]).
CMatrix build_RL(const CMatrix& rho_B);

/// Orthonormal eigenvectors of E_T with eigenvalue >= 1 - fix_tol.
CMatrix fixed_point_basis(const CMatrix& E_T, double fix_tol);

/// Eigenspaces of RL, clustered at gaps > group_tol * max(1, max|eta|).
std::vector<EigenGroup> modular_groups(const CMatrix& RL, double group_tol);

/// Both routes to P_V; throws NumericalError when they disagree by more than
/// tol.agree_tol in Frobenius norm.
ProjectionPV project_PV(const CMatrix& P1_basis, const std::vector<EigenGroup>& Q_list,
                        const Tolerances& tol);

ProjectionPV project_PV(const CMatrix& E_T, const CMatrix& RL, const Tolerances& tol);

/// True iff the fixed-point algebra of T is non-abelian. A false return
/// certifies that no nontrivial exact compression exists.
bool screen_nonabelian(const CMatrix& E_T, const Tolerances& tol = {});

/// Largest commutator norm among pairs of a fixed-point basis.
double max_fixed_point_commutator(const CMatrix& E_T, double fix_tol);

SufficiencyCore build_sufficiency_core(const BipartiteState& state,
                                       const Tolerances& tol = {});

/// Named residual of a structural property, for diagnostics and self-tests.
struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  [[nodiscard]] bool pass() const { return value <= threshold; }
};

std::vector<InvariantCheck> check_core_invariants(const SufficiencyCore& core,
                                                  const BipartiteState& state);

}  // namespace qlocomp
