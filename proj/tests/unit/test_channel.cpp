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
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qlocomp/channel.hpp"

namespace qlocomp {
namespace {

ChannelSpec random_channel(int dA, int dB, int k, std::mt19937_64& rng) {
  const CMatrix V = random_unitary(dB * k, rng).leftCols(dA);
  ChannelSpec ch{dA, dB, {}};
  for (int i = 0; i < k; ++i) ch.kraus.push_back(V.block(i * dB, 0, dB, dA));
  return ch;
}

int pipeline_dmin(const ChannelSpec& ch) {
  return oracle_dmin(choi_state(ch)).ki.d_min;
}

TEST(ValidateChannel, AcceptsAndRejects) {
  std::mt19937_64 rng(71);
  EXPECT_NO_THROW(validate_channel(random_channel(2, 3, 2, rng)));
  ChannelSpec bad = identity_channel(2);
  bad.kraus[0] *= 1.1;
  EXPECT_THROW(validate_channel(bad), InputError);
  ChannelSpec shape{2, 3, {CMatrix::Identity(2, 2)}};
  EXPECT_THROW(validate_channel(shape), InputError);
  ChannelSpec empty{2, 2, {}};
  EXPECT_THROW(validate_channel(empty), InputError);
}

TEST(ChoiState, IdentityIsBell) {
  const BipartiteState s = choi_state(identity_channel(2));
  EXPECT_LT(max_abs(s.rho - make_pure(CMatrix::Identity(2, 2) / std::sqrt(2.0)).rho), 1e-14);
  EXPECT_EQ(pipeline_dmin(identity_channel(2)), 2);
}

TEST(ChoiState, CompletelyDepolarizingIsProduct) {
  const BipartiteState s = choi_state(completely_depolarizing(3));
  EXPECT_LT(max_abs(s.rho - CMatrix::Identity(9, 9) / 9.0), 1e-14);
  EXPECT_EQ(pipeline_dmin(completely_depolarizing(3)), 1);
}

TEST(ChoiState, DephasingIsClassicallyCorrelated) {
  const BipartiteState s = choi_state(dephasing(2));
  EXPECT_LT(max_abs(s.rho - make_classical(RMatrix::Identity(2, 2) / 2.0).rho), 1e-14);
  EXPECT_EQ(pipeline_dmin(dephasing(2)), 2);
}

TEST(ChannelFromChoi, RoundTripsTheAction) {
  std::mt19937_64 rng(72);
  const ChannelSpec ch = random_channel(2, 3, 3, rng);
  CMatrix choi = CMatrix::Zero(6, 6);
  for (int a = 0; a < 2; ++a)
    for (int a2 = 0; a2 < 2; ++a2) {
      CMatrix E = CMatrix::Zero(2, 2);
      E(a, a2) = 1.0;
      choi.block(a * 3, a2 * 3, 3, 3) = apply_channel(ch, E);
    }
  const ChannelSpec back = channel_from_choi(choi, 2, 3);
  const CMatrix X = random_ginibre(2, 2, rng);
  EXPECT_LT(max_abs(apply_channel(back, X) - apply_channel(ch, X)), 1e-12);
  EXPECT_THROW(channel_from_choi(-choi, 2, 3), InputError);
}

TEST(UnitalShortcut, UnitaryChannelKeepsEverything) {
  std::mt19937_64 rng(73);
  const UnitalShortcut u = unital_shortcut(unitary_channel(random_unitary(3, rng)));
  EXPECT_EQ(u.commutant.size(), 1u);
  EXPECT_EQ(u.d_min_fast, 3);
}

TEST(UnitalShortcut, CompletelyDepolarizing) {
  const UnitalShortcut u = unital_shortcut(completely_depolarizing(3));
  EXPECT_EQ(u.commutant.size(), 9u);
  EXPECT_EQ(u.d_min_fast, 1);
}

TEST(UnitalShortcut, S3RegularTwirl) {
  const ChannelSpec tw = make_twirl(s3_regular_representation());
  EXPECT_EQ(tw.kraus.size(), 6u);
  EXPECT_TRUE(is_unital(tw));
  const UnitalShortcut u = unital_shortcut(tw);
  EXPECT_EQ(u.d_min_fast, 4);
  EXPECT_EQ(pipeline_dmin(tw), 4);
}

TEST(UnitalShortcut, RejectsNonUnital) {
  ChannelSpec amp{2, 2, {CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)}};
  const double g = 0.3;
  amp.kraus[0](0, 0) = 1.0;
  amp.kraus[0](1, 1) = std::sqrt(1 - g);
  amp.kraus[1](0, 1) = std::sqrt(g);
  EXPECT_FALSE(is_unital(amp));
  EXPECT_THROW(unital_shortcut(amp), InputError);
}

TEST(UnitalShortcut, AgreesWithGeneralPath) {
  std::mt19937_64 rng(74);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + t % 3;
    const ChannelSpec ch = random_unitary_mixture(d, 1 + t % 3, rng);
    EXPECT_EQ(unital_shortcut(ch).d_min_fast, pipeline_dmin(ch)) << "t=" << t;
  }
  // Twirls give nontrivial commutants.
  EXPECT_EQ(unital_shortcut(make_twirl(z2_bit_flip_group())).d_min_fast,
            pipeline_dmin(make_twirl(z2_bit_flip_group())));
}

TEST(MakeTwirl, TrivialGroupIsIdentity) {
  const ChannelSpec tw = make_twirl({CMatrix::Identity(3, 3)});
  std::mt19937_64 rng(75);
  const CMatrix X = random_ginibre(3, 3, rng);
  EXPECT_LT(max_abs(apply_channel(tw, X) - X), 1e-14);
}

TEST(MakeTwirl, Z2IsDephasingInXBasis) {
  const ChannelSpec tw = make_twirl(z2_bit_flip_group());
  CMatrix H(2, 2);
  H << 1, 1, 1, -1;
  H /= std::sqrt(2.0);
  const ChannelSpec expected = compose(unitary_channel(H), compose(dephasing(2), unitary_channel(H)));
  std::mt19937_64 rng(76);
  const CMatrix X = random_ginibre(2, 2, rng);
  EXPECT_LT(max_abs(apply_channel(tw, X) - apply_channel(expected, X)), 1e-14);
  EXPECT_EQ(pipeline_dmin(tw), 2);
}

TEST(MakeTwirl, RejectsNonGroups) {
  CMatrix X(2, 2);
  X << 0, 1, 1, 0;
  CMatrix Z(2, 2);
  Z << 1, 0, 0, -1;
  EXPECT_THROW(make_twirl({CMatrix::Identity(2, 2), X, Z}), InputError);
  EXPECT_THROW(make_twirl({CMatrix::Identity(2, 2), 2.0 * X}), InputError);
  CMatrix S = CMatrix::Zero(2, 2);
  S(0, 0) = 1.0;
  S(1, 1) = cplx(0.0, 1.0);
  EXPECT_THROW(make_twirl({CMatrix::Identity(2, 2), S}), InputError);
}

TEST(MakeTwirl, Idempotent) {
  const ChannelSpec tw = make_twirl(s3_regular_representation());
  const BipartiteState once = choi_state(tw);
  const BipartiteState twice = choi_state(compose(tw, tw));
  EXPECT_EQ(once.dims, twice.dims);
  EXPECT_LT(max_abs(once.rho - twice.rho), 1e-9);
}

TEST(S3Representation, IsAGroupOfPermutations) {
  const auto G = s3_regular_representation();
  ASSERT_EQ(G.size(), 6u);
  for (const CMatrix& U : G) {
    EXPECT_LT(max_abs(U.adjoint() * U - CMatrix::Identity(6, 6)), 1e-15);
    for (int r = 0; r < 6; ++r) EXPECT_NEAR(U.row(r).cwiseAbs().sum(), 1.0, 1e-15);
  }
  // Regular representation: only the identity has fixed points.
  int with_trace = 0;
  for (const CMatrix& U : G) with_trace += std::abs(U.trace()) > 0.5;
  EXPECT_EQ(with_trace, 1);
}

TEST(AdjointPetz, ChoiMatchesJ) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 5; ++t) {
    const ChannelSpec ch = random_channel(2 + t % 2, 2 + t % 3, 3, rng);
    const BipartiteState s = choi_state(ch);
    ASSERT_FALSE(s.restricted);
    EXPECT_LT(max_abs(adjoint_petz_choi(ch) - build_J(s)), 1e-8);
  }
}

TEST(Compose, OrderIsSecondAfterFirst) {
  std::mt19937_64 rng(78);
  const ChannelSpec f = random_channel(2, 3, 2, rng), g = random_channel(3, 2, 2, rng);
  const CMatrix X = random_ginibre(2, 2, rng);
  EXPECT_LT(max_abs(apply_channel(compose(g, f), X) - apply_channel(g, apply_channel(f, X))), 1e-12);
  EXPECT_THROW(compose(f, f), InputError);
}

}  // namespace
}  // namespace qlocomp
