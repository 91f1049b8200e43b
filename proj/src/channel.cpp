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

#include "qlocomp/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qlocomp {

namespace {

CMatrix unit(int d, int a, int b) {
  CMatrix E = CMatrix::Zero(d, d);
  E(a, b) = 1.0;
  return E;
}

bool contains(const std::vector<CMatrix>& list, const CMatrix& X, double tol) {
  return std::any_of(list.begin(), list.end(),
                     [&](const CMatrix& Y) { return max_abs(X - Y) <= tol; });
}

}  // namespace

void validate_channel(const ChannelSpec& ch, double tol) {
  if (ch.dA_in < 1 || ch.dB_out < 1) throw InputError("channel: dimensions must be positive");
  if (ch.kraus.empty()) throw InputError("channel: empty Kraus list");
  CMatrix sum = CMatrix::Zero(ch.dA_in, ch.dA_in);
  for (size_t k = 0; k < ch.kraus.size(); ++k) {
    const CMatrix& K = ch.kraus[k];
    if (K.rows() != ch.dB_out || K.cols() != ch.dA_in) {
      std::ostringstream os;
      os << "channel: Kraus operator " << k << " is " << K.rows() << "x" << K.cols()
         << ", expected " << ch.dB_out << "x" << ch.dA_in;
      throw InputError(os.str());
    }
    if (!all_finite(K)) throw InputError("channel: non-finite Kraus entries");
    sum += K.adjoint() * K;
  }
  const double defect = max_abs(sum - CMatrix::Identity(ch.dA_in, ch.dA_in));
  if (defect > tol) {
    std::ostringstream os;
    os << "channel: Kraus list is not trace-preserving (max |sum K^dagger K - I| = " << defect
       << ")";
    throw InputError(os.str());
  }
}

CMatrix apply_channel(const ChannelSpec& ch, const CMatrix& X) {
  return apply_kraus(ch.kraus, X);
}

BipartiteState choi_state(const ChannelSpec& ch) {
  validate_channel(ch);
  const DimPair dims{ch.dA_in, ch.dB_out};
  CMatrix rho = CMatrix::Zero(dims.total(), dims.total());
  const double norm = 1.0 / std::sqrt(static_cast<double>(ch.dA_in));
  for (const CMatrix& K : ch.kraus) {
    CVector v(dims.total());
    for (int a = 0; a < dims.dA; ++a)
      for (int b = 0; b < dims.dB; ++b) v(dims.index(a, b)) = K(b, a) * norm;
    rho += v * v.adjoint();
  }
  return validate_and_restrict(rho, dims);
}

ChannelSpec channel_from_choi(const CMatrix& choi, int dA, int dB, double rank_tol) {
  const DimPair dims{dA, dB};
  if (choi.rows() != dims.total() || choi.cols() != dims.total())
    throw InputError("channel: Choi matrix has wrong size");
  const HermEig eig = herm_eig(choi, 1e-8);
  if (eig.values.minCoeff() < -1e-9 * std::max(1.0, eig.values.maxCoeff()))
    throw InputError("channel: Choi matrix is not positive semidefinite");
  ChannelSpec ch{dA, dB, {}};
  const double wmax = eig.values.maxCoeff();
  for (int k = dims.total() - 1; k >= 0; --k) {
    const double w = eig.values(k);
    if (w <= rank_tol * wmax) break;
    CMatrix K(dB, dA);
    for (int a = 0; a < dA; ++a)
      for (int b = 0; b < dB; ++b) K(b, a) = std::sqrt(w) * eig.vectors(dims.index(a, b), k);
    ch.kraus.push_back(std::move(K));
  }
  validate_channel(ch, 1e-8);
  return ch;
}

bool is_unital(const ChannelSpec& ch, double tol) {
  if (ch.dA_in != ch.dB_out) return false;
  return max_abs(apply_channel(ch, CMatrix::Identity(ch.dA_in, ch.dA_in)) -
                 CMatrix::Identity(ch.dB_out, ch.dB_out)) <= tol;
}

UnitalShortcut unital_shortcut(const ChannelSpec& ch, double tol, std::uint64_t seed) {
  validate_channel(ch);
  if (!is_unital(ch, tol))
    throw InputError("unital_shortcut: channel is not unital; use the general Choi-state path");
  std::vector<CMatrix> images;
  for (int a = 0; a < ch.dA_in; ++a)
    for (int b = 0; b < ch.dA_in; ++b) images.push_back(apply_channel(ch, unit(ch.dA_in, a, b)));
  const CMatrix comm = commutant_basis(images, ch.dB_out);
  UnitalShortcut out;
  for (Eigen::Index k = 0; k < comm.cols(); ++k)
    out.commutant.push_back(devectorize(comm.col(k), ch.dB_out, ch.dB_out));
  BlockOptions bo;
  bo.seed = seed;
  out.ki = block_structure(out.commutant, ch.dB_out, bo);
  out.d_min_fast = out.ki.d_min;
  return out;
}

ChannelSpec make_twirl(const std::vector<CMatrix>& unitaries, double tol) {
  if (unitaries.empty()) throw InputError("twirl: empty group");
  const Eigen::Index d = unitaries.front().rows();
  for (const CMatrix& U : unitaries) {
    if (U.rows() != d || U.cols() != d) throw InputError("twirl: unitaries must share a square size");
    if (max_abs(U.adjoint() * U - CMatrix::Identity(d, d)) > tol)
      throw InputError("twirl: group element is not unitary");
  }
  for (size_t g = 0; g < unitaries.size(); ++g) {
    if (!contains(unitaries, unitaries[g].adjoint(), tol))
      throw InputError("twirl: list is not closed under inverses");
    for (size_t h = 0; h < unitaries.size(); ++h)
      if (!contains(unitaries, unitaries[g] * unitaries[h], tol)) {
        std::ostringstream os;
        os << "twirl: list is not closed under multiplication (element " << g << " times "
           << h << ")";
        throw InputError(os.str());
      }
  }
  ChannelSpec ch{static_cast<int>(d), static_cast<int>(d), {}};
  const double w = 1.0 / std::sqrt(static_cast<double>(unitaries.size()));
  for (const CMatrix& U : unitaries) ch.kraus.push_back(w * U);
  return ch;
}

std::vector<CMatrix> s3_regular_representation() {
  std::array<std::array<int, 3>, 6> perms{};
  std::array<int, 3> p{0, 1, 2};
  for (auto& slot : perms) {
    slot = p;
    std::next_permutation(p.begin(), p.end());
  }
  auto index_of = [&](const std::array<int, 3>& q) {
    return static_cast<int>(std::find(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<CMatrix> out;
  for (const auto& g : perms) {
    CMatrix U = CMatrix::Zero(6, 6);
    for (int h = 0; h < 6; ++h) {
      std::array<int, 3> gh{};
      for (int k = 0; k < 3; ++k) gh[k] = g[perms[h][k]];
      U(index_of(gh), h) = 1.0;
    }
    out.push_back(std::move(U));
  }
  return out;
}

std::vector<CMatrix> z2_bit_flip_group() {
  CMatrix X = CMatrix::Zero(2, 2);
  X(0, 1) = 1.0;
  X(1, 0) = 1.0;
  return {CMatrix::Identity(2, 2), X};
}

ChannelSpec identity_channel(int d) { return {d, d, {CMatrix::Identity(d, d)}}; }

ChannelSpec unitary_channel(const CMatrix& U) {
  return {static_cast<int>(U.cols()), static_cast<int>(U.rows()), {U}};
}

ChannelSpec completely_depolarizing(int d) {
  ChannelSpec ch{d, d, {}};
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (int b = 0; b < d; ++b)
    for (int a = 0; a < d; ++a) ch.kraus.push_back(w * unit(d, b, a));
  return ch;
}

ChannelSpec dephasing(int d) {
  ChannelSpec ch{d, d, {}};
  for (int k = 0; k < d; ++k) ch.kraus.push_back(unit(d, k, k));
  return ch;
}

ChannelSpec random_unitary_mixture(int d, int terms, std::mt19937_64& rng) {
  if (terms < 1) throw InputError("random_unitary_mixture: need at least one term");
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w(terms);
  double total = 0.0;
  for (double& x : w) total += (x = u(rng));
  ChannelSpec ch{d, d, {}};
  for (int k = 0; k < terms; ++k) ch.kraus.push_back(std::sqrt(w[k] / total) * random_unitary(d, rng));
  return ch;
}

ChannelSpec compose(const ChannelSpec& second, const ChannelSpec& first) {
  if (second.dA_in != first.dB_out) throw InputError("compose: dimension mismatch");
  ChannelSpec ch{first.dA_in, second.dB_out, {}};
  for (const CMatrix& K2 : second.kraus)
    for (const CMatrix& K1 : first.kraus) ch.kraus.push_back(K2 * K1);
  return ch;
}

CMatrix adjoint_petz_choi(const ChannelSpec& ch) {
  validate_channel(ch);
  const int dA = ch.dA_in;
  const CMatrix tau = CMatrix::Identity(dA, dA) / static_cast<double>(dA);
  const CMatrix tau_half = matrix_fn(tau, MatrixFunction::Sqrt);
  const CMatrix s = matrix_fn(apply_channel(ch, tau), MatrixFunction::InvSqrt);
  CMatrix out = CMatrix::Zero(dA * ch.dB_out, dA * ch.dB_out);
  for (int a = 0; a < dA; ++a)
    for (int b = 0; b < dA; ++b) {
      const CMatrix X = unit(dA, a, b);
      out += kron(X, s * apply_channel(ch, tau_half * X * tau_half) * s);
    }
  return out;
}

}  // namespace qlocomp
