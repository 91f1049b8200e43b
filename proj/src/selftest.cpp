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

#include "qlocomp/selftest.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>

#include "qlocomp/random.hpp"

namespace qlocomp {

namespace {

class Tally {
 public:
  void record(const std::string& name, double value, double threshold) {
    auto it = index_.find(name);
    if (it == index_.end()) {
      index_[name] = rows_.size();
      rows_.push_back({name, value, threshold, 1});
      return;
    }
    Row& row = rows_[it->second];
    row.worst = std::max(row.worst, value);
    ++row.count;
  }
  void record(const InvariantCheck& c) { record(c.name, c.value, c.threshold); }
  void record(const std::vector<InvariantCheck>& cs) {
    for (const InvariantCheck& c : cs) record(c);
  }
  void expect_eq(const std::string& name, long long got, long long want) {
    record(name, static_cast<double>(std::llabs(got - want)), 0.0);
  }

  SelftestSummary print(std::ostream& out, bool quiet) const {
    SelftestSummary s;
    for (const Row& row : rows_) {
      const bool ok = row.worst <= row.threshold && std::isfinite(row.worst);
      (ok ? s.passed : s.failed)++;
      if (quiet && ok) continue;
      out << (ok ? "PASS  " : "FAIL  ") << std::left << std::setw(62) << row.name << std::right
          << " worst=" << std::scientific << std::setprecision(2) << row.worst
          << " limit=" << row.threshold << std::defaultfloat << "  (n=" << row.count << ")\n";
    }
    out << "selftest: " << s.passed << " passed, " << s.failed << " failed\n";
    return s;
  }

 private:
  struct Row {
    std::string name;
    double worst;
    double threshold;
    int count;
  };
  std::vector<Row> rows_;
  std::map<std::string, size_t> index_;
};

struct Instance {
  std::string label;
  BipartiteState state;
  std::optional<int> d_min;
  std::optional<int> d_R_total;
  std::optional<int> rankC;
};

CMatrix bell_coeffs() {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = c(1, 1) = 1.0;
  return c;
}

std::vector<Instance> state_instances(bool quick, std::uint64_t seed) {
  std::vector<Instance> out;
  std::uint64_t k = 0;
  auto rng_next = [&]() { return make_engine(seed, Stream::Generator, k++); };

  struct Cls { int dA, dB, m; };
  std::vector<Cls> cls = {{2, 3, 2}, {3, 4, 3}};
  if (!quick) cls.insert(cls.end(), {{4, 6, 3}, {3, 5, 2}});
  for (const Cls& c : cls) {
    auto rng = rng_next();
    out.push_back({"classical " + std::to_string(c.dA) + "x" + std::to_string(c.dB),
                   make_classical(random_classical_table(c.dA, c.dB, c.m, rng)), c.m, c.dB, c.m});
  }

  out.push_back({"bell", make_pure(bell_coeffs()), 2, 1, 4});
  struct Pure { int dA, dB, r; };
  std::vector<Pure> pure = {{3, 3, 2}, {3, 4, 3}};
  if (!quick) pure.push_back({4, 5, 4});
  for (const Pure& p : pure) {
    auto rng = rng_next();
    out.push_back({"pure rank " + std::to_string(p.r),
                   make_pure(random_schmidt_coeffs(p.dA, p.dB, p.r, rng)), p.r, 1, p.r * p.r});
  }

  std::vector<std::vector<std::pair<int, int>>> shapes = {{{1, 2}, {1, 1}}, {{2, 2}}, {{2, 1}, {1, 2}}};
  if (!quick) shapes.insert(shapes.end(), {{{1, 1}, {2, 1}, {1, 2}}, {{2, 2}, {1, 2}}, {{3, 2}, {1, 2}}});
  for (const auto& shape : shapes) {
    auto rng = rng_next();
    PlantedState ps = random_planted(2, shape, rng);
    std::string label = "planted";
    for (const auto& [l, r] : shape) label += " " + std::to_string(l) + "x" + std::to_string(r);
    out.push_back({label, ps.state, ps.d_min(), ps.d_R_total(), ps.sum_dL_squared()});
  }

  {
    auto rng = rng_next();
    const CMatrix rho = kron(random_density(2, 2, rng), random_density(3, 3, rng));
    out.push_back({"product 2x3", validate_and_restrict(rho, {2, 3}), 1, 3, 1});
  }
  for (int d : {2, 3}) {
    auto rng = rng_next();
    out.push_back({"generic " + std::to_string(d) + "x" + std::to_string(d),
                   random_full_rank_state({d, d}, rng), d, 1, d * d});
  }
  return out;
}

double gradient_fd_error(const CVector& psi, int dB, std::mt19937_64& rng) {
  const int n = dB * dB;
  const CMatrix Psi = devectorize(psi, n, n) * random_unitary(n, rng);
  const CMatrix H = random_hermitian(n, rng);
  const double analytic = (entropy_gradient(Psi, dB).gradient * H).trace().real();
  const double h = 1e-5;
  const double fp = entropy_BBbar(Psi * expi_hermitian(h * H), dB);
  const double fm = entropy_BBbar(Psi * expi_hermitian(-h * H), dB);
  const double fd = (fp - fm) / (2.0 * h);
  return std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-8);
}

void check_tensor(Tally& t, const BipartiteState& st, std::mt19937_64& rng) {
  const double tr = st.rho.trace().real();
  t.record("partial_trace preserves trace",
           std::max(std::abs(st.rho_A().trace().real() - tr), std::abs(st.rho_B().trace().real() - tr)),
           1e-12);
  const int n = std::min(64, 4 * st.dims.total());
  const CMatrix H = random_hermitian(n, rng);
  const HermEig e = herm_eig(H);
  t.record("herm_eig reconstruction (relative Frobenius)",
           (e.vectors * e.values.asDiagonal() * e.vectors.adjoint() - H).norm() / H.norm(), 1e-10);
  const DimPair sq{st.dims.dB, st.dims.dB};
  const CMatrix R = random_ginibre(sq.total(), sq.total(), rng);
  t.record("reshuffle is an involution", max_abs(reshuffle(reshuffle(R, sq), sq) - R), 0.0);
  const CMatrix s = matrix_fn(st.rho, MatrixFunction::Sqrt);
  const HermEig re = herm_eig(st.rho);
  RVector kept = re.values;
  for (Eigen::Index i = 0; i < kept.size(); ++i)
    if (kept(i) <= kDefaultRankTol * re.values.maxCoeff()) kept(i) = 0.0;
  t.record("matrix_fn(sqrt)^2 reproduces thresholded input",
           max_abs(s * s - re.vectors * kept.asDiagonal() * re.vectors.adjoint()), 1e-10);
}

void check_state(Tally& t, const BipartiteState& st) {
  const BipartiteState again = validate_and_restrict(st.rho, st.dims);
  t.record("validate_and_restrict idempotent",
           again.restricted ? 1.0 : max_abs(again.rho - st.rho), 1e-15);
}

void check_pipeline(Tally& t, const Instance& inst, const PipelineOptions& po,
                    std::mt19937_64& rng) {
  const PipelineResult r = run_pipeline(inst.state, po);
  const int dB = inst.state.dims.dB;
  t.record(check_core_invariants(r.core, inst.state));
  t.record(check_choi_invariants(r.choi));
  const OptimizationResult& opt = *r.opt;
  const KIDecomposition& ki = *r.ki;
  t.record("U_opt unitary",
           max_abs(opt.U_opt.adjoint() * opt.U_opt - CMatrix::Identity(dB * dB, dB * dB)), 1e-9);
  double worst_restart = 0.0;
  for (const RestartRecord& rec : opt.restarts_log)
    worst_restart = std::max(worst_restart, opt.entropy_min - rec.entropy);
  t.record("entropy_min <= every restart", worst_restart, 1e-12);
  t.expect_eq("optimizer d_min == oracle d_min", opt.d_min, ki.d_min);
  t.expect_eq("optimizer d_R_total == oracle d_R_total", opt.d_R_total, ki.d_R_total);
  t.expect_eq("rank on Bbar Bbar1 == rank(C)", opt.rank_check, r.choi.rankC);
  t.expect_eq("rank(C) == sum dL^2", r.choi.rankC, ki.sum_dL_squared());
  t.record("ceil(sqrt(rankC)) <= d_min <= rankC",
           (opt.d_min < r.bnd.lower || opt.d_min > r.bnd.upper) ? 1.0 : 0.0, 0.0);
  t.record("entropy optimum matches block formula", std::abs(opt.entropy_min - ki.optimal_entropy()),
           1e-6);
  t.record(check_ki_invariants(ki, r.basis, inst.state.rho_B()));
  const CompressionPair& pair = *r.pair;
  double tp_E = 0.0;
  CMatrix sE = CMatrix::Zero(dB, dB);
  for (const CMatrix& E : pair.E_kraus) sE += E.adjoint() * E;
  tp_E = max_abs(sE - CMatrix::Identity(dB, dB));
  CMatrix sR = CMatrix::Zero(pair.d_Btilde, pair.d_Btilde);
  for (const CMatrix& R : pair.R_kraus) sR += R.adjoint() * R;
  t.record("compression and recovery trace-preserving",
           std::max(tp_E, max_abs(sR - CMatrix::Identity(pair.d_Btilde, pair.d_Btilde))), 1e-9);
  t.record("round trip trace distance", pair.roundtrip_error, 1e-8);
  t.record("recovery fixes conditional states mu_B", r.conditional_error, 1e-8);

  const std::vector<CMatrix> petz = petz_recovery(pair.E_kraus, inst.state.rho_B());
  const CMatrix petz_back =
      apply_kraus_on_B(petz, compress_state(inst.state, pair), {inst.state.dims.dA, pair.d_Btilde});
  t.record("Petz recovery also reconstructs exactly", trace_norm(0.5 * (petz_back + petz_back.adjoint()) - inst.state.rho),
           1e-8);

  // Compressing an already compressed state changes nothing.
  const BipartiteState small = validate_and_restrict(compress_state(inst.state, pair),
                                                     {inst.state.dims.dA, pair.d_Btilde});
  const OracleResult again = oracle_dmin(small, po.tol, po.seed);
  t.expect_eq("re-compression keeps d_min", again.ki.d_min, ki.d_min);
  t.expect_eq("re-compression leaves all dR = 1", again.ki.d_R_total,
              static_cast<long long>(again.ki.blocks.size()));

  if (inst.d_min) t.expect_eq("d_min matches construction", ki.d_min, *inst.d_min);
  if (inst.d_R_total) t.expect_eq("d_R_total matches construction", ki.d_R_total, *inst.d_R_total);
  if (inst.rankC) t.expect_eq("rank(C) matches construction", r.choi.rankC, *inst.rankC);
  if (!r.nonabelian)
    t.expect_eq("abelian fixed points imply d_min == dB", opt.d_min, dB);

  if (dB <= 4) t.record("entropy gradient vs central differences (relative)",
                        gradient_fd_error(purify(r.choi), dB, rng), 1e-5);
}

void check_channels(Tally& t, bool quick, const SelftestOptions& opts) {
  PipelineOptions po = opts.pipeline;
  po.seed = opts.seed;
  struct Named {
    std::string label;
    ChannelSpec ch;
    int d_min;
  };
  std::vector<Named> chans = {{"identity channel", identity_channel(2), 2},
                              {"completely depolarizing", completely_depolarizing(3), 1},
                              {"dephasing", dephasing(2), 2},
                              {"Z2 twirl", make_twirl(z2_bit_flip_group()), 2}};
  if (!quick) chans.push_back({"S3 regular twirl", make_twirl(s3_regular_representation()), 4});
  for (const Named& c : chans) {
    const BipartiteState st = choi_state(c.ch);
    const PipelineResult r = run_pipeline(st, po);
    t.expect_eq("channel d_min matches construction", r.ki->d_min, c.d_min);
    t.expect_eq("channel optimizer d_min == oracle d_min", r.opt->d_min, r.ki->d_min);
    const UnitalShortcut fast = unital_shortcut(c.ch, 1e-9, opts.seed);
    t.expect_eq("unital shortcut d_min == full pipeline", fast.d_min_fast, r.ki->d_min);
  }

  for (int k = 0; k < (quick ? 2 : 4); ++k) {
    auto rng = make_engine(opts.seed, Stream::Generator, 1000 + k);
    const int d = 2 + k % 3;
    const ChannelSpec ch = random_unitary_mixture(d, 2 + k % 2, rng);
    const BipartiteState st = choi_state(ch);
    PipelineOptions lean = po;
    lean.run_optimizer = false;
    lean.synthesize = false;
    const PipelineResult r = run_pipeline(st, lean);
    const UnitalShortcut fast = unital_shortcut(ch, 1e-9, opts.seed);
    t.expect_eq("unital shortcut d_min == full pipeline", fast.d_min_fast, r.ki->d_min);
    t.record("J equals the Choi operator of the adjoint Petz map",
             max_abs(r.core.J - adjoint_petz_choi(ch)), 1e-8);
  }

  const std::vector<std::vector<CMatrix>> groups =
      quick ? std::vector<std::vector<CMatrix>>{z2_bit_flip_group()}
            : std::vector<std::vector<CMatrix>>{z2_bit_flip_group(), s3_regular_representation()};
  for (const auto& g : groups) {
    const ChannelSpec tw = make_twirl(g);
    const BipartiteState once = choi_state(tw);
    const BipartiteState twice = choi_state(compose(tw, tw));
    t.record("twirl idempotence (Choi states)", max_abs(once.rho - twice.rho), 1e-9);
  }
}

}  // namespace

SelftestSummary run_selftest(const SelftestOptions& opts, std::ostream& out) {
  Tally t;
  PipelineOptions po = opts.pipeline;
  po.seed = opts.seed;
  po.conditional_checks = 20;
  auto rng = make_engine(opts.seed, Stream::Check, 1);

  for (const Instance& inst : state_instances(opts.quick, opts.seed)) {
    try {
      check_tensor(t, inst.state, rng);
      check_state(t, inst.state);
      check_pipeline(t, inst, po, rng);
      t.record("instance completed without error", 0.0, 0.0);
    } catch (const std::exception& e) {
      out << "error in " << inst.label << ": " << e.what() << "\n";
      t.record("instance completed without error", 1.0, 0.0);
    }
  }

  try {
    // Ranks of the optimum do not depend on an extra unitary on Bbar Bbar1.
    auto grng = make_engine(opts.seed, Stream::Generator, 2000);
    const PlantedState ps = random_planted(2, {{1, 2}, {2, 1}}, grng);
    const SufficiencyCore core = build_sufficiency_core(ps.state, po.tol);
    const ChoiState choi = build_choi(core.pv.PV, ps.state.dims.dB);
    const int n = choi.dB * choi.dB;
    const CVector psi = purify(choi);
    const CVector rotated = vectorize(devectorize(psi, n, n) * random_unitary(n, grng));
    OptimizerOptions oo = po.optimizer;
    oo.seed = opts.seed;
    const OptimizationResult a = minimize_entropy(psi, choi.dB, oo);
    const OptimizationResult b = minimize_entropy(rotated, choi.dB, oo);
    t.expect_eq("d_min invariant under a unitary on Bbar Bbar1", a.d_min, b.d_min);
    t.expect_eq("d_R_total invariant under a unitary on Bbar Bbar1", a.d_R_total, b.d_R_total);

    // Identical seeds give identical reports.
    PipelineOptions lean = po;
    lean.conditional_checks = 0;
    const Json r1 = make_report("selftest", "", report_body(run_pipeline(ps.state, lean), lean), {}, {});
    const Json r2 = make_report("selftest", "", report_body(run_pipeline(ps.state, lean), lean), {}, {});
    t.record("same seed gives an identical report digest",
             r1["report_digest"] == r2["report_digest"] ? 0.0 : 1.0, 0.0);

    check_channels(t, opts.quick, opts);
    t.record("channel checks completed without error", 0.0, 0.0);
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    t.record("channel checks completed without error", 1.0, 0.0);
  }
  return t.print(out, opts.quiet);
}

}  // namespace qlocomp
