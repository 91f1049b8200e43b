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

#include "qlocomp/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qlocomp {

namespace {

constexpr double kStateTol = 1e-10;

// Columns of the support isometry of a PSD marginal: eigenvectors above the
// threshold, descending eigenvalue, ties broken lexicographically on the
// phase-normalized entries. Full-rank marginals keep the identity.
CMatrix support_isometry(const CMatrix& marginal, double rank_tol) {
  const int d = static_cast<int>(marginal.rows());
  const HermEig eig = herm_eig(marginal, 1e-8);
  const double wmax = eig.values.maxCoeff();
  std::vector<int> keep;
  for (int k = 0; k < d; ++k)
    if (eig.values(k) > rank_tol * wmax) keep.push_back(k);
  if (static_cast<int>(keep.size()) == d) return CMatrix::Identity(d, d);

  std::vector<CVector> cols;
  for (int k : keep) {
    CVector v = eig.vectors.col(k);
    Eigen::Index lead = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > best + 1e-12) {
        best = std::abs(v(i));
        lead = i;
      }
    }
    v *= std::conj(v(lead)) / std::abs(v(lead));
    cols.push_back(v);
  }
  std::vector<int> order(keep.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    const double wx = eig.values(keep[x]);
    const double wy = eig.values(keep[y]);
    if (std::abs(wx - wy) > 1e-12 * wmax) return wx > wy;
    for (Eigen::Index i = 0; i < cols[x].size(); ++i) {
      if (std::abs(cols[x](i).real() - cols[y](i).real()) > 1e-12)
        return cols[x](i).real() < cols[y](i).real();
      if (std::abs(cols[x](i).imag() - cols[y](i).imag()) > 1e-12)
        return cols[x](i).imag() < cols[y](i).imag();
    }
    return false;
  });
  CMatrix iso(d, static_cast<Eigen::Index>(keep.size()));
  for (size_t j = 0; j < order.size(); ++j) iso.col(j) = cols[order[j]];
  return iso;
}

}  // namespace

CMatrix BipartiteState::rho_A() const {
  return partial_trace(rho, dims, Subsystem::B);
}

CMatrix BipartiteState::rho_B() const {
  return partial_trace(rho, dims, Subsystem::A);
}

CMatrix BipartiteState::embedded() const {
  const CMatrix V = kron(iso_A, iso_B);
  return V * rho * V.adjoint();
}

BipartiteState validate_and_restrict(const CMatrix& raw, DimPair dims,
                                     double rank_tol) {
  if (dims.dA < 1 || dims.dB < 1)
    throw InputError("state: dimensions must be positive");
  if (raw.rows() != dims.total() || raw.cols() != dims.total()) {
    std::ostringstream os;
    os << "state: rho is " << raw.rows() << "x" << raw.cols()
       << " but dims require " << dims.total() << "x" << dims.total();
    throw InputError(os.str());
  }
  if (!all_finite(raw)) throw InputError("state: rho has non-finite entries");
  const double herm = hermiticity_defect(raw);
  if (herm > kStateTol) {
    std::ostringstream os;
    os << "state: rho is not Hermitian (max |rho - rho^dagger| = " << herm << ")";
    throw InputError(os.str());
  }
  const CMatrix rho = 0.5 * (raw + raw.adjoint());
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kStateTol) {
    std::ostringstream os;
    os << "state: trace is " << tr << ", expected 1";
    throw InputError(os.str());
  }
  const double lmin = herm_eig(rho, 1e-8).values.minCoeff();
  if (lmin < -kStateTol) {
    std::ostringstream os;
    os << "state: rho is not positive semidefinite (smallest eigenvalue "
       << lmin << ")";
    throw InputError(os.str());
  }

  BipartiteState st;
  st.original_dims = dims;
  st.iso_A = support_isometry(partial_trace(rho, dims, Subsystem::B), rank_tol);
  st.iso_B = support_isometry(partial_trace(rho, dims, Subsystem::A), rank_tol);
  st.dims = {static_cast<int>(st.iso_A.cols()), static_cast<int>(st.iso_B.cols())};
  st.restricted = !(st.dims == dims);
  if (!st.restricted) {
    st.rho = rho;
    return st;
  }
  const CMatrix V = kron(st.iso_A, st.iso_B);
  st.rho = V.adjoint() * rho * V;
  st.rho = 0.5 * (st.rho + st.rho.adjoint());
  const double loss = (st.embedded() - rho).norm();
  if (loss > kStateTol) {
    std::ostringstream os;
    os << "state: support restriction is not exact (residual " << loss
       << "); a marginal has eigenvalues just below the rank threshold";
    throw InputError(os.str());
  }
  return st;
}

BipartiteState make_classical(const RMatrix& p) {
  if (p.size() == 0) throw InputError("classical: empty table");
  if ((p.array() < 0.0).any())
    throw InputError("classical: negative probability");
  if (std::abs(p.sum() - 1.0) > 1e-12)
    throw InputError("classical: probabilities do not sum to 1");
  const DimPair dims{static_cast<int>(p.rows()), static_cast<int>(p.cols())};
  CMatrix rho = CMatrix::Zero(dims.total(), dims.total());
  for (int a = 0; a < dims.dA; ++a)
    for (int b = 0; b < dims.dB; ++b) rho(dims.index(a, b), dims.index(a, b)) = p(a, b);
  return validate_and_restrict(rho, dims);
}

BipartiteState make_pure(const CMatrix& coeffs) {
  const double nrm = coeffs.norm();
  if (nrm == 0.0 || !std::isfinite(nrm))
    throw InputError("pure: coefficient matrix is zero");
  const DimPair dims{static_cast<int>(coeffs.rows()), static_cast<int>(coeffs.cols())};
  const CVector psi = vectorize(coeffs) / nrm;
  return validate_and_restrict(psi * psi.adjoint(), dims);
}

int PlantedState::d_min() const {
  return std::accumulate(dL.begin(), dL.end(), 0);
}

int PlantedState::d_R_total() const {
  return std::accumulate(dR.begin(), dR.end(), 0);
}

int PlantedState::sum_dL_squared() const {
  int s = 0;
  for (int l : dL) s += l * l;
  return s;
}

PlantedState make_planted(const std::vector<PlantedBlock>& blocks) {
  if (blocks.empty()) throw InputError("planted: no blocks");
  int dA = -1;
  int dB = 0;
  double wsum = 0.0;
  for (const PlantedBlock& blk : blocks) {
    if (blk.dL < 1 || blk.sigma_AL.rows() % blk.dL != 0)
      throw InputError("planted: sigma_AL size is not a multiple of dL");
    const int a = static_cast<int>(blk.sigma_AL.rows()) / blk.dL;
    if (dA >= 0 && a != dA) throw InputError("planted: inconsistent dA across blocks");
    dA = a;
    if (blk.weight <= 0.0) throw InputError("planted: weights must be positive");
    dB += blk.dL * static_cast<int>(blk.omega_R.rows());
    wsum += blk.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw InputError("planted: weights do not sum to 1");

  const DimPair dims{dA, dB};
  CMatrix rho = CMatrix::Zero(dims.total(), dims.total());
  PlantedState out;
  int offset = 0;
  for (const PlantedBlock& blk : blocks) {
    const int dL = blk.dL;
    const int dR = static_cast<int>(blk.omega_R.rows());
    const int w = dL * dR;
    const CMatrix piece = blk.weight * kron(blk.sigma_AL, blk.omega_R);
    // piece is indexed ((a, l), r) = a * w + l * dR + r.
    for (int a = 0; a < dA; ++a)
      for (int ap = 0; ap < dA; ++ap)
        rho.block(dims.index(a, offset), dims.index(ap, offset), w, w) =
            piece.block(a * w, ap * w, w, w);
    out.dL.push_back(dL);
    out.dR.push_back(dR);
    out.weights.push_back(blk.weight);
    offset += w;
  }
  out.state = validate_and_restrict(rho, dims);
  if (out.state.restricted)
    throw InputError("planted: block marginals must have full rank");
  return out;
}

PlantedState random_planted(int dA, const std::vector<std::pair<int, int>>& shape,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<PlantedBlock> blocks;
  double total = 0.0;
  for (const auto& [dL, dR] : shape) {
    PlantedBlock blk;
    blk.dL = dL;
    blk.sigma_AL = random_density(dA * dL, dA * dL, rng);
    blk.omega_R = random_density(dR, dR, rng);
    blk.weight = u(rng);
    total += blk.weight;
    blocks.push_back(std::move(blk));
  }
  for (PlantedBlock& blk : blocks) blk.weight /= total;
  // Renormalize the last weight so the sum is 1 to machine precision.
  double rest = 1.0;
  for (size_t i = 0; i + 1 < blocks.size(); ++i) rest -= blocks[i].weight;
  blocks.back().weight = rest;
  return make_planted(blocks);
}

RMatrix random_classical_table(int dA, int dB, int classes, std::mt19937_64& rng) {
  if (classes < 1 || classes > dB) throw InputError("classical: need 1 <= classes <= dB");
  if (classes > 1 && dA < 2)
    throw InputError("classical: distinct conditionals need dA >= 2");
  std::uniform_real_distribution<double> u(0.2, 1.0);
  RMatrix cond(dA, classes);
  for (int c = 0; c < classes; ++c) {
    for (int a = 0; a < dA; ++a) cond(a, c) = u(rng);
    cond.col(c) /= cond.col(c).sum();
  }
  // Every class gets at least one column; the rest are assigned at random.
  std::vector<int> label(dB);
  for (int b = 0; b < dB; ++b) label[b] = b < classes ? b : static_cast<int>(rng() % classes);
  std::shuffle(label.begin(), label.end(), rng);
  RMatrix p(dA, dB);
  double total = 0.0;
  for (int b = 0; b < dB; ++b) {
    const double pb = u(rng);
    p.col(b) = pb * cond.col(label[b]);
    total += pb;
  }
  p /= total;
  p /= p.sum();
  return p;
}

CMatrix random_schmidt_coeffs(int dA, int dB, int r, std::mt19937_64& rng) {
  if (r < 1 || r > std::min(dA, dB)) throw InputError("pure: invalid Schmidt rank");
  const CMatrix G = random_ginibre(dA, r, rng) * random_ginibre(r, dB, rng);
  return G / G.norm();
}

BipartiteState random_full_rank_state(DimPair dims, std::mt19937_64& rng) {
  return validate_and_restrict(random_density(dims.total(), dims.total(), rng), dims);
}

}  // namespace qlocomp
