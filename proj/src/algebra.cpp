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

#include "qlocomp/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <tuple>

#include "qlocomp/random.hpp"

namespace qlocomp {

namespace {

constexpr double kCenterTol = 1e-8;
constexpr double kDimTol = 1e-7;

CMatrix random_combination(const std::vector<CMatrix>& elems, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix out = CMatrix::Zero(elems.front().rows(), elems.front().cols());
  for (const CMatrix& e : elems) {
    const double re = g(rng);
    const double im = g(rng);
    out += cplx(re, im) * e;
  }
  return out;
}

CMatrix hermitian_part(const CMatrix& X) { return 0.5 * (X + X.adjoint()); }

// Orthonormal basis of the center of span(basis), as matrices.
std::vector<CMatrix> center_of(const std::vector<CMatrix>& basis) {
  const int m = static_cast<int>(basis.size());
  const int n = static_cast<int>(basis.front().size());
  CMatrix S(static_cast<Eigen::Index>(m) * n, m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      S.block(static_cast<Eigen::Index>(j) * n, k, n, 1) =
          vectorize(basis[k] * basis[j] - basis[j] * basis[k]);
  double scale = 0.0;
  for (const CMatrix& b : basis) scale = std::max(scale, b.norm() * b.norm());
  const CMatrix coeff = null_space(S, kCenterTol, scale);
  std::vector<CMatrix> out;
  for (Eigen::Index c = 0; c < coeff.cols(); ++c) {
    CMatrix Z = CMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (int k = 0; k < m; ++k) Z += coeff(k, c) * basis[k];
    out.push_back(std::move(Z));
  }
  return out;
}

// Splits the spectrum of a Hermitian matrix into clusters relative to its
// largest magnitude.
std::vector<CMatrix> spectral_subspaces(const CMatrix& H, double rel_gap) {
  const HermEig eig = herm_eig(H, 1e-8);
  const double scale = std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<CMatrix> out;
  for (const auto& [lo, hi] : cluster_sorted(eig.values, rel_gap * scale))
    out.push_back(eig.vectors.middleCols(lo, hi - lo));
  return out;
}

std::optional<KIBlock> decompose_block(const CMatrix& Bi, const std::vector<CMatrix>& basis,
                                       const BlockOptions& opts, std::mt19937_64& rng) {
  const int r = static_cast<int>(Bi.cols());
  std::vector<CMatrix> local;
  CMatrix stack(static_cast<Eigen::Index>(r) * r, static_cast<Eigen::Index>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k) {
    local.push_back(Bi.adjoint() * basis[k] * Bi);
    stack.col(k) = vectorize(local.back());
  }
  const int dim = svd_rank(stack, kDimTol);
  const int dR = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
  if (dR < 1 || dR * dR != dim || r % dR != 0) return std::nullopt;
  const int dL = r / dR;

  // Spectral projections of a generic Hermitian element: dR eigenspaces of
  // multiplicity dL each.
  const CMatrix Y = hermitian_part(random_combination(local, rng));
  const std::vector<CMatrix> W = spectral_subspaces(Y, opts.group_tol);
  if (static_cast<int>(W.size()) != dR) return std::nullopt;
  for (const CMatrix& w : W)
    if (w.cols() != dL) return std::nullopt;

  const CMatrix Z = random_combination(local, rng);
  KIBlock blk;
  blk.dL = dL;
  blk.dR = dR;
  blk.Pi = projector(Bi, static_cast<int>(Bi.rows()));
  blk.U_iso = CMatrix(Bi.rows(), r);
  for (int j = 0; j < dR; ++j) {
    CMatrix Uj = CMatrix::Identity(dL, dL);
    if (j > 0) {
      // Unitary polar factor of P_j Z P_1 restricted to the multiplicity spaces.
      const CMatrix A = W[j].adjoint() * Z * W[0];
      Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const RVector& s = svd.singularValues();
      if (s(dL - 1) <= 1e-6 * s(0)) return std::nullopt;
      Uj = svd.matrixU() * svd.matrixV().adjoint();
    }
    const CMatrix cols = Bi * W[j] * Uj;
    for (int m = 0; m < dL; ++m) blk.U_iso.col(m * dR + j) = cols.col(m);
  }

  // Conjugation by U_iso must bring every algebra element to I_L (x) x.
  const DimPair lr{dL, dR};
  for (const CMatrix& X : basis) {
    const CMatrix big = blk.U_iso.adjoint() * X * blk.U_iso;
    const CMatrix x = partial_trace(big, lr, Subsystem::A) / static_cast<double>(dL);
    if (max_abs(big - kron(CMatrix::Identity(dL, dL), x)) > opts.tol) return std::nullopt;
  }
  return blk;
}

int first_support_index(const CMatrix& Pi) {
  for (Eigen::Index k = 0; k < Pi.rows(); ++k)
    if (Pi(k, k).real() > 1e-6) return static_cast<int>(k);
  return static_cast<int>(Pi.rows());
}

}  // namespace

std::vector<int> KIDecomposition::dL_list() const {
  std::vector<int> out;
  for (const KIBlock& b : blocks) out.push_back(b.dL);
  return out;
}

std::vector<int> KIDecomposition::dR_list() const {
  std::vector<int> out;
  for (const KIBlock& b : blocks) out.push_back(b.dR);
  return out;
}

int KIDecomposition::sum_dL_squared() const {
  int s = 0;
  for (const KIBlock& b : blocks) s += b.dL * b.dL;
  return s;
}

double KIDecomposition::optimal_entropy() const {
  double s = 0.0;
  for (const KIBlock& b : blocks) {
    const double q = static_cast<double>(b.dL * b.dR) / dB;
    s += -q * std::log(q) + q * std::log(static_cast<double>(b.dR));
  }
  return s;
}

std::vector<CMatrix> algebra_basis(const CMatrix& PV, int dB, double tol) {
  const int n = dB * dB;
  if (PV.rows() != n || PV.cols() != n) throw InputError("algebra_basis: P_V must be dB^2 x dB^2");
  const HermEig eig = herm_eig(PV, 1e-8);
  std::vector<CMatrix> basis;
  for (int k = n - 1; k >= 0 && eig.values(k) > 0.5; --k)
    basis.push_back(devectorize(eig.vectors.col(k), dB, dB));

  const CMatrix leak = CMatrix::Identity(n, n) - PV;
  double worst_adj = 0.0;
  double worst_mul = 0.0;
  for (const CMatrix& X : basis) {
    worst_adj = std::max(worst_adj, (leak * vectorize(X.adjoint())).norm());
    for (const CMatrix& Y : basis) worst_mul = std::max(worst_mul, (leak * vectorize(X * Y)).norm());
  }
  if (worst_adj > tol || worst_mul > tol) {
    std::ostringstream os;
    os << "algebra_basis: range(P_V) is not a *-algebra (adjoint leak " << worst_adj
       << ", product leak " << worst_mul << ")";
    throw NumericalError(os.str());
  }
  return basis;
}

KIDecomposition block_structure(const std::vector<CMatrix>& basis, int dB,
                                const BlockOptions& opts) {
  if (basis.empty()) throw InputError("block_structure: empty basis");
  const std::vector<CMatrix> center = center_of(basis);
  for (int attempt = 0; attempt < opts.retries; ++attempt) {
    auto rng = make_engine(opts.seed, Stream::CentralElement, static_cast<std::uint64_t>(attempt));
    const CMatrix H = hermitian_part(random_combination(center, rng));
    if (H.norm() < 1e-12) continue;
    auto mu_rng = make_engine(opts.seed, Stream::MatrixUnits, static_cast<std::uint64_t>(attempt));
    KIDecomposition ki;
    ki.dB = dB;
    bool ok = true;
    for (const CMatrix& Bi : spectral_subspaces(H, opts.group_tol)) {
      std::optional<KIBlock> blk = decompose_block(Bi, basis, opts, mu_rng);
      if (!blk) {
        ok = false;
        break;
      }
      ki.blocks.push_back(std::move(*blk));
    }
    if (!ok) continue;
    std::stable_sort(ki.blocks.begin(), ki.blocks.end(), [](const KIBlock& x, const KIBlock& y) {
      return std::make_tuple(x.dL, x.dR, first_support_index(x.Pi)) <
             std::make_tuple(y.dL, y.dR, first_support_index(y.Pi));
    });
    for (const KIBlock& b : ki.blocks) {
      ki.d_min += b.dL;
      ki.d_R_total += b.dR;
    }
    return ki;
  }
  throw NumericalError("block_structure: could not resolve the block structure after " +
                       std::to_string(opts.retries) + " random central elements");
}

void attach_state(KIDecomposition& ki, const CMatrix& rho_B) {
  for (KIBlock& b : ki.blocks) {
    b.p = (b.Pi * rho_B).trace().real();
    if (b.p <= 0.0) throw NumericalError("attach_state: block with zero weight");
    const CMatrix local = b.U_iso.adjoint() * rho_B * b.U_iso;
    b.omega_R = hermitian_part(partial_trace(local, {b.dL, b.dR}, Subsystem::A)) / b.p;
  }
}

std::vector<InvariantCheck> check_ki_invariants(const KIDecomposition& ki,
                                                const std::vector<CMatrix>& basis,
                                                const CMatrix& rho_B) {
  const int dB = ki.dB;
  std::vector<InvariantCheck> out;
  CMatrix sum = CMatrix::Zero(dB, dB);
  double ortho = 0.0;
  double rank_gap = 0.0;
  double iso = 0.0;
  double form = 0.0;
  int dim_sum = 0;
  CMatrix rebuilt = CMatrix::Zero(dB, dB);
  for (size_t i = 0; i < ki.blocks.size(); ++i) {
    const KIBlock& b = ki.blocks[i];
    sum += b.Pi;
    for (size_t j = 0; j < ki.blocks.size(); ++j) {
      const CMatrix expect = i == j ? b.Pi : CMatrix::Zero(dB, dB);
      ortho = std::max(ortho, max_abs(b.Pi * ki.blocks[j].Pi - expect));
    }
    rank_gap = std::max(rank_gap, std::abs(static_cast<double>(psd_rank(b.Pi) - b.dL * b.dR)));
    iso = std::max(iso, max_abs(b.U_iso.adjoint() * b.U_iso -
                                CMatrix::Identity(b.dL * b.dR, b.dL * b.dR)));
    for (const CMatrix& X : basis) {
      const CMatrix big = b.U_iso.adjoint() * X * b.U_iso;
      const CMatrix x = partial_trace(big, {b.dL, b.dR}, Subsystem::A) / static_cast<double>(b.dL);
      form = std::max(form, max_abs(big - kron(CMatrix::Identity(b.dL, b.dL), x)));
    }
    dim_sum += b.dL * b.dR;
    if (b.p > 0.0) {
      const CMatrix local = b.U_iso.adjoint() * rho_B * b.U_iso;
      const CMatrix sigma_L = partial_trace(local, {b.dL, b.dR}, Subsystem::B) / b.p;
      rebuilt += b.p * b.U_iso * kron(sigma_L, b.omega_R) * b.U_iso.adjoint();
    }
  }
  out.push_back({"sum_i Pi_i = I", max_abs(sum - CMatrix::Identity(dB, dB)), 1e-8});
  out.push_back({"Pi_i Pi_j = delta_ij Pi_i", ortho, 1e-8});
  out.push_back({"rank(Pi_i) = dL_i dR_i", rank_gap, 0.0});
  out.push_back({"U_iso isometries", iso, 1e-8});
  out.push_back({"U^dagger X U = I_L (x) x on the algebra", form, 1e-8});
  out.push_back({"sum_i dL_i dR_i = dB", std::abs(static_cast<double>(dim_sum - dB)), 0.0});
  out.push_back({"rho_B = sum_i p_i U_i (sigma_L (x) omega_R) U_i^dagger",
                 (rho_B - rebuilt).norm(), 1e-8});
  return out;
}

CompressionPair synthesize_compression(const BipartiteState& state, const KIDecomposition& ki) {
  const int dB = state.dims.dB;
  if (ki.dB != dB) throw InputError("synthesize_compression: decomposition does not match state");
  CompressionPair out;
  out.d_Btilde = ki.d_min;
  int offset = 0;
  for (const KIBlock& b : ki.blocks) {
    if (b.p <= 0.0) throw NumericalError("synthesize_compression: block weight is zero");
    const CMatrix Ud = b.U_iso.adjoint();
    for (int r = 0; r < b.dR; ++r) {
      CMatrix E = CMatrix::Zero(ki.d_min, dB);
      for (int l = 0; l < b.dL; ++l) E.row(offset + l) = Ud.row(l * b.dR + r);
      out.E_kraus.push_back(std::move(E));
    }
    const HermEig om = herm_eig(b.omega_R, 1e-8);
    for (int k = 0; k < b.dR; ++k) {
      const double s = om.values(k);
      if (s <= 0.0) continue;
      // sqrt(s_k) U_i (I_L (x) |f_k>) J_i^dagger
      CMatrix R = CMatrix::Zero(dB, ki.d_min);
      for (int l = 0; l < b.dL; ++l) {
        CVector col = CVector::Zero(dB);
        for (int rr = 0; rr < b.dR; ++rr) col += b.U_iso.col(l * b.dR + rr) * om.vectors(rr, k);
        R.col(offset + l) = std::sqrt(s) * col;
      }
      out.R_kraus.push_back(std::move(R));
    }
    offset += b.dL;
  }
  const CMatrix compressed = apply_kraus_on_B(out.E_kraus, state.rho, state.dims);
  const CMatrix back =
      apply_kraus_on_B(out.R_kraus, compressed, {state.dims.dA, out.d_Btilde});
  out.roundtrip_error = trace_norm(hermitian_part(back - state.rho));
  return out;
}

std::vector<CMatrix> petz_recovery(const std::vector<CMatrix>& E_kraus, const CMatrix& rho_B) {
  const CMatrix sigma = apply_kraus(E_kraus, rho_B);
  const CMatrix s_inv = matrix_fn(sigma, MatrixFunction::InvSqrt);
  const CMatrix r_half = matrix_fn(rho_B, MatrixFunction::Sqrt);
  std::vector<CMatrix> out;
  for (const CMatrix& E : E_kraus) out.push_back(r_half * E.adjoint() * s_inv);
  return out;
}

CMatrix conditional_state(const BipartiteState& state, const CMatrix& M_A) {
  const int dA = state.dims.dA;
  if (M_A.rows() != dA || M_A.cols() != dA) throw InputError("conditional_state: M_A has wrong size");
  const CMatrix num =
      partial_trace(kron(M_A, CMatrix::Identity(state.dims.dB, state.dims.dB)) * state.rho,
                    state.dims, Subsystem::A);
  const double den = (M_A * state.rho_A()).trace().real();
  if (den <= 1e-14) throw InputError("conditional_state: effect has zero probability");
  return hermitian_part(num) / den;
}

double max_conditional_error(const BipartiteState& state, const CompressionPair& pair, int count,
                             std::mt19937_64& rng) {
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const CMatrix G = random_ginibre(state.dims.dA, state.dims.dA, rng);
    CMatrix M = G * G.adjoint();
    M /= herm_eig(M, 1e-8).values.maxCoeff();
    const CMatrix mu = conditional_state(state, M);
    const CMatrix back = apply_kraus(pair.R_kraus, apply_kraus(pair.E_kraus, mu));
    worst = std::max(worst, trace_norm(hermitian_part(back - mu)));
  }
  return worst;
}

CMatrix compress_state(const BipartiteState& state, const CompressionPair& pair) {
  return hermitian_part(apply_kraus_on_B(pair.E_kraus, state.rho, state.dims));
}

OracleResult oracle_dmin(const BipartiteState& state, const Tolerances& tol, std::uint64_t seed) {
  OracleResult out;
  out.core = build_sufficiency_core(state, tol);
  out.basis = algebra_basis(out.core.pv.PV, state.dims.dB);
  BlockOptions bo;
  bo.seed = seed;
  bo.group_tol = tol.group_tol;
  out.ki = block_structure(out.basis, state.dims.dB, bo);
  attach_state(out.ki, state.rho_B());
  return out;
}

}  // namespace qlocomp
