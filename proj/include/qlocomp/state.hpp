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

#include <vector>

#include "qlocomp/tensor.hpp"

namespace qlocomp {

/// A validated bipartite density matrix whose reduced states are strictly
/// positive. If the raw input had rank-deficient marginals, H_A and H_B have
/// been replaced by the supports and `iso_A`, `iso_B` map the restricted
/// spaces back into the original ones.
struct BipartiteState {
  DimPair dims;
  CMatrix rho;
  bool restricted = false;
  DimPair original_dims;
  CMatrix iso_A;  // original_dims.dA x dims.dA, orthonormal columns
  CMatrix iso_B;  // original_dims.dB x dims.dB

  [[nodiscard]] CMatrix rho_A() const;
  [[nodiscard]] CMatrix rho_B() const;

  /// (iso_A (x) iso_B) rho (iso_A (x) iso_B)^dagger.
  [[nodiscard]] CMatrix embedded() const;
};

BipartiteState validate_and_restrict(const CMatrix& raw, DimPair dims,
                                     double rank_tol = kDefaultRankTol);

/// rho = sum p(a,b) |a,b><a,b| for a dA x dB table of probabilities.
BipartiteState make_classical(const RMatrix& p);

/// rho = |psi><psi| with psi = sum coeffs(a,b)|a,b>. Nonzero input is
/// normalized.
BipartiteState make_pure(const CMatrix& coeffs);

struct PlantedBlock {
  CMatrix sigma_AL;  // density matrix on H_A (x) H_L
  CMatrix omega_R;   // density matrix on H_R
  double weight = 0.0;
  int dL = 1;
};

/// State with a known Koashi-Imoto structure, together with the ground truth.
struct PlantedState {
  BipartiteState state;
  std::vector<int> dL;
  std::vector<int> dR;
  std::vector<double> weights;

  [[nodiscard]] int d_min() const;
  [[nodiscard]] int d_R_total() const;
  [[nodiscard]] int sum_dL_squared() const;
};

/// rho = (+)_i p_i sigma_{A L_i} (x) omega_{R_i}, blocks placed in consecutive
/// coordinate subspaces of H_B (B index of block i: offset_i + l * dR_i + r).
PlantedState make_planted(const std::vector<PlantedBlock>& blocks);

/// Random plant with the given (dL, dR) pairs, generic sigma on H_A (x) H_L
/// and random weights. Weights are drawn from [0.5, 1.5] and normalized.
PlantedState random_planted(int dA, const std::vector<std::pair<int, int>>& shape,
                            std::mt19937_64& rng);

/// Random classical table with `classes` distinct conditionals p(.|b),
/// duplicated across the dB columns. Every column and row has positive mass.
RMatrix random_classical_table(int dA, int dB, int classes,
                               std::mt19937_64& rng);

/// Random pure state of Schmidt rank r in dA x dB (r <= min(dA, dB)).
CMatrix random_schmidt_coeffs(int dA, int dB, int r, std::mt19937_64& rng);

/// Random full-rank mixed state on dA x dB.
BipartiteState random_full_rank_state(DimPair dims, std::mt19937_64& rng);

}  // namespace qlocomp
