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

// Normalized Choi state of the conditional expectation onto the redundancy
// algebra, its canonical purification, and the entropy minimization over
// unitaries on the purifying systems.
//
// System order of the purification is B, B1, Bbar, Bbar1, each of dimension
// dB; the amplitude of |b, b1, bb, bb1> sits at
// ((b * dB + b1) * dB + bb) * dB + bb1. Equivalently the purification is the
// row-major vectorization of the dB^2 x dB^2 matrix Psi = sqrt(C), rows
// indexing (b, b1) and columns (bb, bb1).

#include <cstdint>
#include <vector>

#include "qlocomp/sufficiency.hpp"

namespace qlocomp {

struct ChoiState {
  int dB = 0;
  CMatrix C;      // dB^2 x dB^2 density matrix
  CMatrix sqrtC;
  int rankC = 0;
};

/// C = reshuffle(P_V) / dB. Throws NumericalError if the result is not PSD
/// beyond -1e-9.
ChoiState build_choi(const CMatrix& PV, int dB, double rank_tol = kDefaultRankTol);

struct RankBounds {
  int lower = 0;
  int upper = 0;
};

/// ceil(sqrt(rankC)) <= d_min <= rankC.
RankBounds bounds(const ChoiState& choi);

/// Canonical purification |C> = (sqrt(C) (x) I)|I>>, a unit vector of length dB^4.
CVector purify(const ChoiState& choi);

std::vector<InvariantCheck> check_choi_invariants(const ChoiState& choi);

struct OptimizerOptions {
  int restarts = 16;
  int max_iters = 2000;
  double step_init = 0.5;
  double conv_tol = 1e-10;
  std::uint64_t seed = 0;
  int threads = 1;
  double rank_tol = 1e-6;
};

struct RestartRecord {
  double entropy = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OptimizationResult {
  CMatrix U_opt;        // unitary on Bbar Bbar1
  CVector psi_opt;      // (I (x) U_opt)|C>
  double entropy_min = 0.0;
  int d_min = 0;
  int d_R_total = 0;
  int rank_check = 0;
  int best_restart = -1;
  std::vector<RestartRecord> restarts_log;
  bool converged = false;
};

struct SchmidtRanks {
  int d_min = 0;        // rank of the marginal on Bbar
  int d_R_total = 0;    // rank across B Bbar : B1 Bbar1
  int cross_check = 0;  // rank of the marginal on Bbar Bbar1
};

/// Regroups the four dB-dimensional factors of a purification into a matrix
/// whose rows run over the factors listed in `row_axes` (0 = B, 1 = B1,
/// 2 = Bbar, 3 = Bbar1) and whose columns run over the rest, both in
/// ascending axis order.
CMatrix regroup(const CVector& psi, int dB, std::vector<int> row_axes);

/// S(B Bbar) of the purification Psi (given in its dB^2 x dB^2 matrix form).
double entropy_BBbar(const CMatrix& Psi, int dB);

struct ValueAndGradient {
  double value = 0.0;
  CMatrix gradient;  // Hermitian, dB^2 x dB^2
};

/// Entropy f(K) = S(B Bbar) of Psi exp(iK) and its gradient at K = 0, so that
/// f(K) = f(0) + tr(G K) + O(|K|^2) for Hermitian K. Psi exp(iK) is the state
/// after applying exp(iK^T) on Bbar Bbar1.
ValueAndGradient entropy_gradient(const CMatrix& Psi, int dB);

OptimizationResult minimize_entropy(const CVector& psi, int dB, const OptimizerOptions& opts);

SchmidtRanks schmidt_ranks(const CVector& psi, int dB, double rank_tol = 1e-6);

/// Experimental: minimizes S(tr_B1 U C U^dagger) over unitaries U on B B1 and
/// reports the numeric rank of the resulting B marginal. Not used for results.
struct MarginalRankResult {
  double entropy_min = 0.0;
  int rank = 0;
};
MarginalRankResult experimental_marginal_rank(const ChoiState& choi,
                                              const OptimizerOptions& opts);

}  // namespace qlocomp
