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

// Wedderburn decomposition of the redundancy algebra
//   A = U (+)_i (I_{L_i} (x) B(H_{R_i})) U^dagger
// and the compression/recovery channels it induces.

#include <cstdint>
#include <vector>

#include "qlocomp/sufficiency.hpp"

namespace qlocomp {

struct KIBlock {
  CMatrix Pi;       // central projection on H_B
  int dL = 0;
  int dR = 0;
  CMatrix U_iso;    // dB x (dL * dR), column l * dR + r
  double p = 0.0;   // tr(Pi rho_B)
  CMatrix omega_R;  // dR x dR state
};

struct KIDecomposition {
  int dB = 0;
  std::vector<KIBlock> blocks;
  int d_min = 0;
  int d_R_total = 0;

  [[nodiscard]] std::vector<int> dL_list() const;
  [[nodiscard]] std::vector<int> dR_list() const;
  [[nodiscard]] int sum_dL_squared() const;
  /// Minimum of S(B Bbar) over purifying unitaries: H(q) + sum q_i ln dR_i with
  /// q_i = dL_i dR_i / dB, the weights of the blocks in the normalized Choi state.
  [[nodiscard]] double optimal_entropy() const;
};

/// Devectorized orthonormal basis of range(P_V). Throws NumericalError if
/// the span is not closed under adjoint and multiplication within `tol`.
std::vector<CMatrix> algebra_basis(const CMatrix& PV, int dB, double tol = 1e-8);

struct BlockOptions {
  std::uint64_t seed = 0;
  double group_tol = 1e-8;
  double tol = 1e-8;
  int retries = 8;
};

/// Block structure of a unital *-algebra given by a basis. Blocks are
/// ordered by (dL, dR, first basis index in the support of Pi).
KIDecomposition block_structure(const std::vector<CMatrix>& basis, int dB,
                                const BlockOptions& opts = {});

/// Fills in p and omega_R from rho_B.
void attach_state(KIDecomposition& ki, const CMatrix& rho_B);

std::vector<InvariantCheck> check_ki_invariants(const KIDecomposition& ki,
                                                const std::vector<CMatrix>& basis,
                                                const CMatrix& rho_B);

struct CompressionPair {
  std::vector<CMatrix> E_kraus;  // d_Btilde x dB
  std::vector<CMatrix> R_kraus;  // dB x d_Btilde
  int d_Btilde = 0;
  double roundtrip_error = 0.0;  // || (R o E (x) id)(rho) - rho ||_1
};

CompressionPair synthesize_compression(const BipartiteState& state, const KIDecomposition& ki);

/// Kraus operators of the Petz recovery map of E with respect to rho_B,
/// Y -> rho^{1/2} E^dagger(E(rho)^{-1/2} Y E(rho)^{-1/2}) rho^{1/2}.
std::vector<CMatrix> petz_recovery(const std::vector<CMatrix>& E_kraus, const CMatrix& rho_B);

/// mu_B = tr_A((M_A (x) I) rho) / tr(M_A rho_A) for 0 <= M_A <= I.
CMatrix conditional_state(const BipartiteState& state, const CMatrix& M_A);

/// Largest ||R o E(mu_B) - mu_B||_1 over `count` random effects M_A.
double max_conditional_error(const BipartiteState& state, const CompressionPair& pair,
                             int count, std::mt19937_64& rng);

/// (id (x) E)(rho) as a state on A (x) B~.
CMatrix compress_state(const BipartiteState& state, const CompressionPair& pair);

struct OracleResult {
  SufficiencyCore core;
  std::vector<CMatrix> basis;
  KIDecomposition ki;
};

/// Full sufficiency pipeline followed by block_structure; independent of the
/// entropy optimization.
OracleResult oracle_dmin(const BipartiteState& state, const Tolerances& tol = {},
                         std::uint64_t seed = 0);

}  // namespace qlocomp
