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

#include "qlocomp/sufficiency.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qlocomp {

CMatrix build_J(const BipartiteState& state, double rank_tol) {
  const CMatrix rhoB = state.rho_B();
  const HermEig eig = herm_eig(rhoB, 1e-8);
  if (eig.values.minCoeff() <= rank_tol * eig.values.maxCoeff())
    throw NumericalError("build_J: rho_B is numerically singular");
  const CMatrix s = matrix_fn(rhoB, MatrixFunction::InvSqrt, rank_tol);
  const CMatrix S = kron(CMatrix::Identity(state.dims.dA, state.dims.dA), s);
  const CMatrix J = S * state.rho * S;
  return 0.5 * (J + J.adjoint());
}

std::vector<KrausTerm> extract_kraus(const CMatrix& J, DimPair dims,
                                     double rank_tol) {
  const HermEig eig = herm_eig(J, 1e-8);
  const int n = static_cast<int>(eig.values.size());
  const double wmax = eig.values(n - 1);
  std::vector<KrausTerm> out;
  for (int k = n - 1; k >= 0; --k) {
    const double w = eig.values(k);
    if (w <= rank_tol * wmax) break;
    const CMatrix V = devectorize(eig.vectors.col(k), dims.dA, dims.dB);
    out.push_back({std::sqrt(w) * V.conjugate(), w});
  }
  return out;
}

CMatrix apply_omega_dagger(const std::vector<KrausTerm>& kraus, const CMatrix& X) {
  const Eigen::Index dB = kraus.front().K.cols();
  CMatrix out = CMatrix::Zero(dB, dB);
  for (const KrausTerm& t : kraus) out += t.K.adjoint() * X * t.K;
  return out;
}

CMatrix apply_omega_tilde(const std::vector<KrausTerm>& kraus, const CMatrix& X) {
  const Eigen::Index dB = kraus.front().K.cols();
  CMatrix out = CMatrix::Zero(dB, dB);
  for (const KrausTerm& t : kraus) out += (t.K.adjoint() * X * t.K) / std::sqrt(t.omega);
  return out;
}

CMatrix build_ET(const std::vector<KrausTerm>& kraus, DimPair dims) {
  const int n = dims.dB * dims.dB;
  CMatrix E = CMatrix::Zero(n, n);
  for (int a = 0; a < dims.dA; ++a) {
    for (int b = 0; b < dims.dA; ++b) {
      // Omega~^dagger(|a><b|) = sum_i omega_i^{-1/2} (<a|K_i)^dagger (<b|K_i)
      CMatrix T = CMatrix::Zero(dims.dB, dims.dB);
      for (const KrausTerm& t : kraus)
        T += (t.K.row(a).adjoint() * t.K.row(b)) / std::sqrt(t.omega);
      E += kron(T, T.conjugate());
    }
  }
  return E;
}

EnvironmentRoute build_ET_environment(const std::vector<KrausTerm>& kraus,
                                      DimPair dims, double rank_tol) {
  const int dE = static_cast<int>(kraus.size());
  std::vector<CMatrix> F(dims.dA, CMatrix::Zero(dE, dims.dB));
  for (int a = 0; a < dims.dA; ++a)
    for (int i = 0; i < dE; ++i) F[a].row(i) = kraus[i].K.row(a);

  EnvironmentRoute out;
  out.O_E = CMatrix::Zero(dE, dE);
  for (const CMatrix& Fa : F) out.O_E += Fa * Fa.adjoint();
  const CMatrix inv_sqrt = matrix_fn(out.O_E, MatrixFunction::InvSqrt, rank_tol);
  const int n = dims.dB * dims.dB;
  out.E_T = CMatrix::Zero(n, n);
  for (int a = 0; a < dims.dA; ++a) {
    for (int b = 0; b < dims.dA; ++b) {
      CMatrix T = F[a].adjoint() * inv_sqrt * F[b];
      out.E_T += kron(T, T.conjugate());
      out.T_kraus.push_back(std::move(T));
    }
  }
  return out;
}

CMatrix build_RL(const CMatrix& rho_B) {
  const HermEig eig = herm_eig(rho_B, 1e-8);
  if (eig.values.minCoeff() <= kDefaultRankTol * eig.values.maxCoeff())
    throw NumericalError("build_RL: rho_B is singular");
  const CMatrix L = matrix_fn(rho_B, MatrixFunction::Log, 0.0);
  const Eigen::Index d = rho_B.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix RL = kron(id, L.transpose()) - kron(L, id);
  return 0.5 * (RL + RL.adjoint());
}

CMatrix fixed_point_basis(const CMatrix& E_T, double fix_tol) {
  const HermEig eig = herm_eig(E_T, 1e-8);
  const int n = static_cast<int>(eig.values.size());
  int first = n;
  while (first > 0 && eig.values(first - 1) >= 1.0 - fix_tol) --first;
  return eig.vectors.rightCols(n - first);
}

std::vector<EigenGroup> modular_groups(const CMatrix& RL, double group_tol) {
  const HermEig eig = herm_eig(RL, 1e-8);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  std::vector<EigenGroup> out;
  for (const auto& [lo, hi] : cluster_sorted(eig.values, group_tol * scale)) {
    EigenGroup g;
    g.eta = eig.values.segment(lo, hi - lo).mean();
    g.basis = eig.vectors.middleCols(lo, hi - lo);
    out.push_back(std::move(g));
  }
  return out;
}

ProjectionPV project_PV(const CMatrix& P1_basis, const std::vector<EigenGroup>& Q_list,
                        const Tolerances& tol) {
  const int n = static_cast<int>(P1_basis.rows());
  ProjectionPV out;

  // Route 1: principal vectors of (range Q_eta, range P_1) with cosine ~ 1.
  std::vector<CVector> cols;
  for (const EigenGroup& g : Q_list) {
    if (P1_basis.cols() == 0) break;
    const CMatrix overlap = g.basis.adjoint() * P1_basis;
    Eigen::JacobiSVD<CMatrix> svd(overlap, Eigen::ComputeFullU);
    const RVector& s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) >= 1.0 - tol.intersect_tol) cols.push_back(g.basis * svd.matrixU().col(k));
  }
  out.basis = CMatrix(n, static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) out.basis.col(k) = cols[k].normalized();
  out.PV = projector(out.basis, n);

  // Route 2: Anderson-Duffin parallel sum, P cap Q = 2 Q (Q + P)^+ P.
  const CMatrix P1 = projector(P1_basis, n);
  out.PV_anderson = CMatrix::Zero(n, n);
  for (const EigenGroup& g : Q_list) {
    const CMatrix Q = projector(g.basis, n);
    const CMatrix pinv = matrix_fn(Q + P1, MatrixFunction::Pinv, tol.rank_tol);
    out.PV_anderson += 2.0 * Q * pinv * P1;
  }
  out.disagreement = (out.PV - out.PV_anderson).norm();
  if (out.disagreement > tol.agree_tol) {
    std::ostringstream os;
    os << "project_PV: Anderson formula and subspace intersection disagree by "
       << out.disagreement << " (Frobenius); the modular spectrum is probably "
       << "mis-clustered, try another --group-tol";
    throw NumericalError(os.str());
  }
  return out;
}

ProjectionPV project_PV(const CMatrix& E_T, const CMatrix& RL, const Tolerances& tol) {
  return project_PV(fixed_point_basis(E_T, tol.fix_tol), modular_groups(RL, tol.group_tol),
                    tol);
}

double max_fixed_point_commutator(const CMatrix& E_T, double fix_tol) {
  const CMatrix basis = fixed_point_basis(E_T, fix_tol);
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(E_T.rows()))));
  std::vector<CMatrix> X;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) X.push_back(devectorize(basis.col(k), d, d));
  double worst = 0.0;
  for (size_t k = 0; k < X.size(); ++k)
    for (size_t l = k + 1; l < X.size(); ++l)
      worst = std::max(worst, (X[k] * X[l] - X[l] * X[k]).norm());
  return worst;
}

bool screen_nonabelian(const CMatrix& E_T, const Tolerances& tol) {
  return max_fixed_point_commutator(E_T, tol.fix_tol) > tol.commute_tol;
}

SufficiencyCore build_sufficiency_core(const BipartiteState& state, const Tolerances& tol) {
  SufficiencyCore core;
  core.dims = state.dims;
  core.J = build_J(state, tol.rank_tol);
  core.kraus = extract_kraus(core.J, state.dims, tol.rank_tol);
  core.O_E = RVector(static_cast<Eigen::Index>(core.kraus.size()));
  for (size_t i = 0; i < core.kraus.size(); ++i) core.O_E(i) = core.kraus[i].omega;
  core.E_T = build_ET(core.kraus, state.dims);
  core.RL = build_RL(state.rho_B());
  core.P1_basis = fixed_point_basis(core.E_T, tol.fix_tol);
  core.P1 = projector(core.P1_basis, state.dims.dB * state.dims.dB);
  core.Q_list = modular_groups(core.RL, tol.group_tol);
  core.pv = project_PV(core.P1_basis, core.Q_list, tol);
  return core;
}

namespace {

double projection_defect(const CMatrix& P) {
  return std::max((P * P - P).cwiseAbs().maxCoeff(), hermiticity_defect(P));
}

}  // namespace

std::vector<InvariantCheck> check_core_invariants(const SufficiencyCore& core,
                                                  const BipartiteState& state) {
  const DimPair dims = core.dims;
  const int dB = dims.dB;
  const int n = dB * dB;
  std::vector<InvariantCheck> out;

  const HermEig jeig = herm_eig(core.J, 1e-8);
  out.push_back({"J positive semidefinite", std::max(0.0, -jeig.values.minCoeff()), 1e-9});
  out.push_back({"tr_A J = I_B",
                 max_abs(partial_trace(core.J, dims, Subsystem::A) - CMatrix::Identity(dB, dB)),
                 1e-9});
  out.push_back({"Omega^dagger unital",
                 max_abs(apply_omega_dagger(core.kraus, CMatrix::Identity(dims.dA, dims.dA)) -
                         CMatrix::Identity(dB, dB)),
                 1e-9});

  double orth = 0.0;
  for (size_t i = 0; i < core.kraus.size(); ++i)
    for (size_t j = 0; j < core.kraus.size(); ++j) {
      const cplx ip = (core.kraus[i].K.adjoint() * core.kraus[j].K).trace();
      const double expect = i == j ? core.kraus[i].omega : 0.0;
      orth = std::max(orth, std::abs(ip - expect));
    }
  out.push_back({"Kraus orthogonality tr(K_i^dagger K_j) = omega_i delta_ij", orth, 1e-9});
  out.push_back({"Kraus count equals rank(rho_AB)",
                 std::abs(static_cast<double>(core.kraus.size()) -
                          psd_rank(state.rho, kDefaultRankTol)),
                 0.0});

  CMatrix choi_tilde = CMatrix::Zero(dims.total(), dims.total());
  for (int a = 0; a < dims.dA; ++a)
    for (int b = 0; b < dims.dA; ++b) {
      CMatrix Eab = CMatrix::Zero(dims.dA, dims.dA);
      Eab(a, b) = 1.0;
      choi_tilde += kron(Eab, apply_omega_tilde(core.kraus, Eab));
    }
  out.push_back({"Choi(Omega~^dagger) = sqrt(J)",
                 max_abs(choi_tilde - matrix_fn(core.J, MatrixFunction::Sqrt)), 1e-9});

  const EnvironmentRoute env = build_ET_environment(core.kraus, dims);
  CMatrix OE_diag = CMatrix::Zero(env.O_E.rows(), env.O_E.cols());
  for (Eigen::Index i = 0; i < core.O_E.size(); ++i) OE_diag(i, i) = core.O_E(i);
  out.push_back({"O_E diagonal with entries omega_i", max_abs(env.O_E - OE_diag), 1e-9});
  out.push_back({"E_T closed form = Kraus route", max_abs(core.E_T - env.E_T), 1e-9});
  out.push_back({"E_T Hermitian (T self-dual)", hermiticity_defect(core.E_T), 1e-9});
  const HermEig teig = herm_eig(core.E_T, 1e-8);
  out.push_back({"spec(E_T) within [-1, 1]",
                 std::max(0.0, teig.values.cwiseAbs().maxCoeff() - 1.0), 1e-9});

  const CVector vecI = vectorize(CMatrix::Identity(dB, dB));
  out.push_back({"E_T vec(I) = vec(I)", (core.E_T * vecI - vecI).cwiseAbs().maxCoeff(), 1e-9});
  out.push_back({"P_1 vec(I) = vec(I)", (core.P1 * vecI - vecI).cwiseAbs().maxCoeff(), 1e-9});
  out.push_back({"P_V vec(I) = vec(I)", (core.pv.PV * vecI - vecI).cwiseAbs().maxCoeff(), 1e-9});

  out.push_back({"P_1 orthogonal projection", projection_defect(core.P1), 1e-9});
  double qdef = 0.0;
  for (const EigenGroup& g : core.Q_list) qdef = std::max(qdef, projection_defect(projector(g.basis, n)));
  out.push_back({"Q_eta orthogonal projections", qdef, 1e-9});
  out.push_back({"P_V orthogonal projection", projection_defect(core.pv.PV), 1e-9});
  out.push_back({"Anderson P_V = intersection P_V", core.pv.disagreement, 1e-8});
  out.push_back({"E_T P_V = P_V", (core.E_T * core.pv.PV - core.pv.PV).norm(), 1e-8});
  out.push_back({"[RL, P_V] = 0", (core.RL * core.pv.PV - core.pv.PV * core.RL).norm(), 1e-8});

  std::vector<CMatrix> X;
  for (Eigen::Index k = 0; k < core.pv.basis.cols(); ++k)
    X.push_back(devectorize(core.pv.basis.col(k), dB, dB));
  const CMatrix leak = CMatrix::Identity(n, n) - core.pv.PV;
  double closure = 0.0;
  for (const CMatrix& x : X) closure = std::max(closure, (leak * vectorize(x.adjoint())).norm());
  for (const CMatrix& x : X)
    for (const CMatrix& y : X) closure = std::max(closure, (leak * vectorize(x * y)).norm());
  out.push_back({"range(P_V) closed under adjoint and products", closure, 1e-8});

  if (dB <= 4) {
    std::vector<CMatrix> images;
    for (int a = 0; a < dims.dA; ++a)
      for (int b = 0; b < dims.dA; ++b) {
        CMatrix Eab = CMatrix::Zero(dims.dA, dims.dA);
        Eab(a, b) = 1.0;
        images.push_back(apply_omega_dagger(core.kraus, Eab));
      }
    const CMatrix comm = commutant_basis(images, dB);
    out.push_back({"rank(P_1) = dim (Im Omega^dagger)'",
                   std::abs(static_cast<double>(comm.cols() - core.P1_basis.cols())), 0.0});
  }
  return out;
}

}  // namespace qlocomp
