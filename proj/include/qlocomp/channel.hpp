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

// Channels A -> B in Kraus form, reduced to bipartite states via their
// normalized Choi state (1/dA) sum |a><a'| (x) E(|a><a'|).

#include <cstdint>
#include <vector>

#include "qlocomp/algebra.hpp"

namespace qlocomp {

struct ChannelSpec {
  int dA_in = 0;
  int dB_out = 0;
  std::vector<CMatrix> kraus;  // dB_out x dA_in
};

/// Throws InputError unless the Kraus list is well-formed and
/// trace-preserving within `tol`.
void validate_channel(const ChannelSpec& ch, double tol = 1e-9);

CMatrix apply_channel(const ChannelSpec& ch, const CMatrix& X);

/// (id (x) E)(|Psi><Psi|) with |Psi> maximally entangled, support-restricted.
BipartiteState choi_state(const ChannelSpec& ch);

/// Kraus form of the channel with Choi matrix sum |a><a'| (x) E(|a><a'|).
ChannelSpec channel_from_choi(const CMatrix& choi, int dA, int dB,
                              double rank_tol = kDefaultRankTol);

bool is_unital(const ChannelSpec& ch, double tol = 1e-9);

struct UnitalShortcut {
  std::vector<CMatrix> commutant;  // orthonormal basis of (Im E)'
  KIDecomposition ki;
  int d_min_fast = 0;
};

/// Redundancy algebra of a unital channel's Choi state computed directly as
/// the commutant of the image of E. Throws InputError for non-unital input.
UnitalShortcut unital_shortcut(const ChannelSpec& ch, double tol = 1e-9, std::uint64_t seed = 0);

/// Twirling channel X -> (1/|G|) sum_g U_g X U_g^dagger. Throws InputError
/// unless the list is a group of unitaries (closed under products and
/// inverses within `tol`).
ChannelSpec make_twirl(const std::vector<CMatrix>& unitaries, double tol = 1e-9);

/// Left-regular representation of S_3 as 6 x 6 permutation matrices.
std::vector<CMatrix> s3_regular_representation();

/// {I_2, X}.
std::vector<CMatrix> z2_bit_flip_group();

ChannelSpec identity_channel(int d);
ChannelSpec unitary_channel(const CMatrix& U);
/// X -> tr(X) I/d.
ChannelSpec completely_depolarizing(int d);
/// Dephasing in the computational basis.
ChannelSpec dephasing(int d);
/// sum_k w_k U_k X U_k^dagger with Haar-random U_k and random weights.
ChannelSpec random_unitary_mixture(int d, int terms, std::mt19937_64& rng);
/// second o first.
ChannelSpec compose(const ChannelSpec& second, const ChannelSpec& first);

/// Choi operator sum |a><a'| (x) Rdag(|a><a'|) of the adjoint of the Petz
/// recovery map of E with respect to I/dA, built from its defining formula.
CMatrix adjoint_petz_choi(const ChannelSpec& ch);

}  // namespace qlocomp
