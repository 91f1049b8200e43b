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

#include "qlocomp/choi.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <sstream>
#include <thread>

#include "qlocomp/random.hpp"

namespace qlocomp {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kZeroEigen = 1e-15;

double frob_inner(const CMatrix& X, const CMatrix& Y) {
  return (X.array().conjugate() * Y.array()).sum().real();
}

RVector spectrum(const CMatrix& H) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// log on the support; eigenvalues below kZeroEigen contribute nothing.
CMatrix support_log(const CMatrix& H, double* entropy_out) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const RVector& w = es.eigenvalues();
  RVector lw = RVector::Zero(w.size());
  double s = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) > kZeroEigen) {
      lw(k) = std::log(w(k));
      s -= w(k) * lw(k);
    }
  }
  if (entropy_out != nullptr) *entropy_out = s;
  return es.eigenvectors() * lw.asDiagonal() * es.eigenvectors().adjoint();
}

// Objective over unitaries, updated multiplicatively by E = exp(iK).
class Problem {
 public:
  virtual ~Problem() = default;
  virtual double value(const CMatrix& X) const = 0;
  virtual ValueAndGradient gradient(const CMatrix& X) const = 0;
  virtual CMatrix step(const CMatrix& X, const CMatrix& E) const = 0;
  virtual CMatrix accumulate(const CMatrix& acc, const CMatrix& E) const = 0;
};

class PurificationProblem final : public Problem {
 public:
  explicit PurificationProblem(int dB) : dB_(dB) {}
  double value(const CMatrix& X) const override { return entropy_BBbar(X, dB_); }
  ValueAndGradient gradient(const CMatrix& X) const override {
    return entropy_gradient(X, dB_);
  }
  CMatrix step(const CMatrix& X, const CMatrix& E) const override { return X * E; }
  CMatrix accumulate(const CMatrix& acc, const CMatrix& E) const override {
    return acc * E;
  }

 private:
  int dB_;
};

class MarginalProblem final : public Problem {
 public:
  explicit MarginalProblem(int dB) : dims_{dB, dB} {}
  double value(const CMatrix& X) const override {
    return entropy_of_spectrum(spectrum(partial_trace(X, dims_, Subsystem::B)));
  }
  ValueAndGradient gradient(const CMatrix& X) const override {
    ValueAndGradient out;
    const CMatrix L = support_log(partial_trace(X, dims_, Subsystem::B), &out.value);
    const CMatrix Lx = kron(L, CMatrix::Identity(dims_.dB, dims_.dB));
    out.gradient = cplx(0.0, -1.0) * (X * Lx - Lx * X);
    return out;
  }
  CMatrix step(const CMatrix& X, const CMatrix& E) const override {
    return E * X * E.adjoint();
  }
  CMatrix accumulate(const CMatrix& acc, const CMatrix& E) const override {
    return E * acc;
  }

 private:
  DimPair dims_;
};

struct Descent {
  CMatrix X;
  CMatrix acc;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Limited-memory BFGS in the left-trivialized coordinates of the unitary
// group (identity vector transport), Armijo backtracking along
// t -> exp(i t D).
Descent descend(const Problem& p, CMatrix X, CMatrix acc, const OptimizerOptions& o) {
  constexpr size_t kMemory = 8;
  Descent out;
  ValueAndGradient vg = p.gradient(X);
  double f = vg.value;
  CMatrix G = std::move(vg.gradient);
  std::deque<CMatrix> S, Y;
  std::deque<double> rho;
  int quiet_steps = 0;
  int it = 0;
  for (; it < o.max_iters; ++it) {
    // Two-loop recursion.
    CMatrix q = G;
    std::vector<double> alpha(S.size());
    for (size_t k = S.size(); k-- > 0;) {
      alpha[k] = rho[k] * frob_inner(S[k], q);
      q -= alpha[k] * Y[k];
    }
    const double gamma = S.empty() ? o.step_init / std::max(G.norm(), 1e-300)
                                   : frob_inner(S.back(), Y.back()) / Y.back().squaredNorm();
    q *= gamma;
    for (size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * frob_inner(Y[k], q);
      q += (alpha[k] - beta) * S[k];
    }
    CMatrix D = -q;
    double slope = frob_inner(G, D);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      D = -(o.step_init / std::max(G.norm(), 1e-300)) * G;
      slope = frob_inner(G, D);
    }
    if (-slope < 1e-28) {
      out.converged = true;
      break;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (D + D.adjoint()));
    const CMatrix& V = es.eigenvectors();
    const RVector& d = es.eigenvalues();
    CMatrix Xn, En;
    double fn = f;
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < kMaxBacktracks; ++ls) {
      CVector phase(d.size());
      for (Eigen::Index k = 0; k < d.size(); ++k) phase(k) = std::polar(1.0, t * d(k));
      En = V * phase.asDiagonal() * V.adjoint();
      Xn = p.step(X, En);
      fn = p.value(Xn);
      if (fn <= f + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No representable decrease along a descent direction: stationary to
      // working precision.
      out.converged = true;
      break;
    }
    X = std::move(Xn);
    acc = p.accumulate(acc, En);
    const double decrease = f - fn;
    vg = p.gradient(X);
    CMatrix s = t * D;
    CMatrix y = vg.gradient - G;
    const double sy = frob_inner(s, y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (S.size() > kMemory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    G = std::move(vg.gradient);
    f = vg.value;
    if (decrease < o.conv_tol) {
      if (++quiet_steps >= 2) {
        out.converged = true;
        ++it;
        break;
      }
    } else {
      quiet_steps = 0;
    }
  }
  out.X = std::move(X);
  out.acc = std::move(acc);
  out.value = f;
  out.iterations = it;
  return out;
}

// Runs restarts (possibly concurrently) and returns them in restart order.
std::vector<Descent> run_restarts(const Problem& p, const CMatrix& X0, const OptimizerOptions& o) {
  if (o.restarts < 1) throw InputError("optimizer: restarts must be >= 1");
  if (o.max_iters < 1) throw InputError("optimizer: max_iters must be >= 1");
  const int n = static_cast<int>(X0.cols());
  std::vector<Descent> runs(o.restarts);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next++; r < o.restarts; r = next++) {
      auto rng = make_engine(o.seed, Stream::OptimizerRestart, static_cast<std::uint64_t>(r));
      const CMatrix E0 = expi_hermitian(random_hermitian(n, rng));
      runs[r] = descend(p, p.step(X0, E0), E0, o);
    }
  };
  const int nthreads = std::clamp(o.threads, 1, o.restarts);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  return runs;
}

int argmin_value(const std::vector<Descent>& runs) {
  int best = 0;
  for (int r = 1; r < static_cast<int>(runs.size()); ++r)
    if (runs[r].value < runs[best].value) best = r;
  return best;
}

}  // namespace

ChoiState build_choi(const CMatrix& PV, int dB, double rank_tol) {
  const int n = dB * dB;
  if (PV.rows() != n || PV.cols() != n)
    throw InputError("build_choi: P_V must be dB^2 x dB^2");
  ChoiState out;
  out.dB = dB;
  CMatrix C = reshuffle(PV, {dB, dB}) / static_cast<double>(dB);
  C = 0.5 * (C + C.adjoint());
  const double lmin = spectrum(C).minCoeff();
  if (lmin < -1e-9) {
    std::ostringstream os;
    os << "build_choi: reshuffled P_V is not PSD (smallest eigenvalue " << lmin
       << "); P_V is corrupted";
    throw NumericalError(os.str());
  }
  out.C = std::move(C);
  out.sqrtC = matrix_fn(out.C, MatrixFunction::Sqrt, rank_tol);
  out.rankC = svd_rank(out.C, rank_tol);
  return out;
}

RankBounds bounds(const ChoiState& choi) {
  int lower = 0;
  while (lower * lower < choi.rankC) ++lower;
  return {lower, choi.rankC};
}

CVector purify(const ChoiState& choi) {
  const CVector v = vectorize(choi.sqrtC);
  return v / v.norm();
}

std::vector<InvariantCheck> check_choi_invariants(const ChoiState& choi) {
  const DimPair dims{choi.dB, choi.dB};
  const CMatrix mixed = CMatrix::Identity(choi.dB, choi.dB) / static_cast<double>(choi.dB);
  std::vector<InvariantCheck> out;
  out.push_back({"C positive semidefinite", std::max(0.0, -spectrum(choi.C).minCoeff()), 1e-9});
  out.push_back({"tr C = 1", std::abs(choi.C.trace().real() - 1.0), 1e-9});
  out.push_back({"tr_B1 C = I/dB", max_abs(partial_trace(choi.C, dims, Subsystem::B) - mixed),
                 1e-8});
  out.push_back({"tr_B C = I/dB", max_abs(partial_trace(choi.C, dims, Subsystem::A) - mixed),
                 1e-8});
  const CVector psi = purify(choi);
  const CMatrix Psi = devectorize(psi, choi.dB * choi.dB, choi.dB * choi.dB);
  out.push_back({"purification reproduces C", (Psi * Psi.adjoint() - choi.C).norm(), 1e-9});
  return out;
}

CMatrix regroup(const CVector& psi, int dB, std::vector<int> row_axes) {
  std::sort(row_axes.begin(), row_axes.end());
  std::vector<int> col_axes;
  for (int ax = 0; ax < 4; ++ax)
    if (std::find(row_axes.begin(), row_axes.end(), ax) == row_axes.end()) col_axes.push_back(ax);
  int rows = 1;
  for (size_t k = 0; k < row_axes.size(); ++k) rows *= dB;
  const int total = dB * dB * dB * dB;
  if (psi.size() != total) throw InputError("regroup: vector length must be dB^4");
  CMatrix out(rows, total / rows);
  int idx[4];
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    for (int ax = 3; ax >= 0; --ax) {
      idx[ax] = rem % dB;
      rem /= dB;
    }
    int r = 0;
    for (int ax : row_axes) r = r * dB + idx[ax];
    int c = 0;
    for (int ax : col_axes) c = c * dB + idx[ax];
    out(r, c) = psi(flat);
  }
  return out;
}

double entropy_BBbar(const CMatrix& Psi, int dB) {
  const CMatrix M = reshuffle(Psi, {dB, dB});
  return entropy_of_spectrum(spectrum(M * M.adjoint()));
}

ValueAndGradient entropy_gradient(const CMatrix& Psi, int dB) {
  ValueAndGradient out;
  const CMatrix M = reshuffle(Psi, {dB, dB});
  const CMatrix L = support_log(M * M.adjoint(), &out.value);
  // dS = -2 Re <L M, dM>; pull L M back to the (B B1 : Bbar Bbar1) layout.
  const CMatrix Phi = reshuffle(L * M, {dB, dB});
  const CMatrix A = Phi.adjoint() * Psi;
  out.gradient = cplx(0.0, 1.0) * (A.adjoint() - A);
  return out;
}

SchmidtRanks schmidt_ranks(const CVector& psi, int dB, double rank_tol) {
  auto marginal_rank = [&](std::vector<int> axes) {
    const CMatrix M = regroup(psi, dB, std::move(axes));
    return psd_rank(M * M.adjoint(), rank_tol);
  };
  SchmidtRanks out;
  out.d_min = marginal_rank({2});
  out.d_R_total = marginal_rank({0, 2});
  out.cross_check = marginal_rank({2, 3});
  return out;
}

OptimizationResult minimize_entropy(const CVector& psi, int dB, const OptimizerOptions& opts) {
  const int n = dB * dB;
  if (psi.size() != static_cast<Eigen::Index>(n) * n)
    throw InputError("minimize_entropy: state length must be dB^4");
  if (std::abs(psi.norm() - 1.0) > 1e-9)
    throw InputError("minimize_entropy: state is not normalized");
  const CMatrix Psi0 = devectorize(psi, n, n);
  const PurificationProblem problem(dB);
  const std::vector<Descent> runs = run_restarts(problem, Psi0, opts);

  OptimizationResult out;
  for (const Descent& d : runs) {
    out.restarts_log.push_back({d.value, d.iterations, d.converged});
    out.converged = out.converged || d.converged;
  }
  out.best_restart = argmin_value(runs);
  const Descent& best = runs[out.best_restart];
  // Psi W = (I (x) W^T) |Psi>>, so the unitary on Bbar Bbar1 is W^T.
  out.U_opt = best.acc.transpose();
  out.psi_opt = vectorize(best.X);
  out.entropy_min = entropy_BBbar(best.X, dB);
  const SchmidtRanks ranks = schmidt_ranks(out.psi_opt, dB, opts.rank_tol);
  out.d_min = ranks.d_min;
  out.d_R_total = ranks.d_R_total;
  out.rank_check = ranks.cross_check;
  return out;
}

MarginalRankResult experimental_marginal_rank(const ChoiState& choi,
                                              const OptimizerOptions& opts) {
  const MarginalProblem problem(choi.dB);
  const std::vector<Descent> runs = run_restarts(problem, choi.C, opts);
  const Descent& best = runs[argmin_value(runs)];
  MarginalRankResult out;
  out.entropy_min = best.value;
  out.rank = psd_rank(partial_trace(best.X, {choi.dB, choi.dB}, Subsystem::B), opts.rank_tol);
  return out;
}

}  // namespace qlocomp
