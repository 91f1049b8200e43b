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

#include "qlocomp/pipeline.hpp"

#include <sstream>

#include "qlocomp/random.hpp"

namespace qlocomp {

bool PipelineResult::mismatch() const {
  return opt.has_value() && ki.has_value() && opt->d_min != ki->d_min;
}

PipelineResult run_pipeline(const BipartiteState& state, const PipelineOptions& opts) {
  PipelineResult r;
  r.state = state;
  Stopwatch sw;
  r.core = build_sufficiency_core(state, opts.tol);
  r.max_fixed_commutator = max_fixed_point_commutator(r.core.E_T, opts.tol.fix_tol);
  r.nonabelian = r.max_fixed_commutator > opts.tol.commute_tol;
  r.timings_ms.emplace_back("sufficiency", sw.lap_ms());

  r.choi = build_choi(r.core.pv.PV, state.dims.dB, opts.tol.rank_tol);
  r.bnd = bounds(r.choi);
  r.timings_ms.emplace_back("choi", sw.lap_ms());

  if (opts.run_optimizer) {
    OptimizerOptions o = opts.optimizer;
    o.seed = opts.seed;
    r.opt = minimize_entropy(purify(r.choi), state.dims.dB, o);
    r.timings_ms.emplace_back("optimizer", sw.lap_ms());
    if (!r.opt->converged) r.warnings.push_back("NOT_CONVERGED: no optimizer restart met conv_tol");
    if (r.opt->rank_check != r.choi.rankC) {
      std::ostringstream os;
      os << "CROSS_CHECK: rank on Bbar Bbar1 is " << r.opt->rank_check << " but rank(C) is "
         << r.choi.rankC << "; the optimum is not in block form";
      r.warnings.push_back(os.str());
    }
    if (r.opt->d_min < r.bnd.lower || r.opt->d_min > r.bnd.upper)
      r.warnings.push_back("BOUNDS: optimizer d_min lies outside the rank bounds");
  }

  if (opts.run_oracle) {
    r.basis = algebra_basis(r.core.pv.PV, state.dims.dB);
    BlockOptions bo;
    bo.seed = opts.seed;
    bo.group_tol = opts.tol.group_tol;
    r.ki = block_structure(r.basis, state.dims.dB, bo);
    attach_state(*r.ki, state.rho_B());
    r.timings_ms.emplace_back("oracle", sw.lap_ms());
    if (r.ki->sum_dL_squared() != r.choi.rankC)
      r.warnings.push_back("RANK: rank(C) differs from sum of dL^2 of the block structure");
    if (opts.synthesize) {
      r.pair = synthesize_compression(state, *r.ki);
      if (opts.conditional_checks > 0) {
        auto rng = make_engine(opts.seed, Stream::Check, 0);
        r.conditional_error = max_conditional_error(state, *r.pair, opts.conditional_checks, rng);
      }
      r.timings_ms.emplace_back("compression", sw.lap_ms());
      if (r.pair->roundtrip_error > 1e-8)
        r.warnings.push_back("ROUNDTRIP: reconstruction error exceeds 1e-8");
    }
  }

  if (r.mismatch()) {
    std::ostringstream os;
    os << "MISMATCH: entropy route gives d_min = " << r.opt->d_min
       << ", block structure gives d_min = " << r.ki->d_min;
    r.warnings.push_back(os.str());
  }
  if (r.opt && r.ki && r.opt->d_R_total != r.ki->d_R_total)
    r.warnings.push_back("D_R_TOTAL: entropy route and block structure disagree on sum of dR");
  if (!r.nonabelian) {
    const int d = r.ki ? r.ki->d_min : (r.opt ? r.opt->d_min : state.dims.dB);
    if (d != state.dims.dB)
      r.warnings.push_back("SCREEN: fixed-point algebra is abelian but d_min < dB");
  }
  return r;
}

Json report_body(const PipelineResult& r, const PipelineOptions& opts) {
  Json j;
  j["dims"] = {{"original", {{"dA", r.state.original_dims.dA}, {"dB", r.state.original_dims.dB}}},
               {"restricted", {{"dA", r.state.dims.dA}, {"dB", r.state.dims.dB}}}};
  j["support_restricted"] = r.state.restricted;
  j["settings"] = {{"rank_tol", opts.tol.rank_tol},
                   {"group_tol", opts.tol.group_tol},
                   {"fix_tol", opts.tol.fix_tol},
                   {"restarts", opts.optimizer.restarts},
                   {"max_iters", opts.optimizer.max_iters},
                   {"conv_tol", opts.optimizer.conv_tol},
                   {"schmidt_rank_tol", opts.optimizer.rank_tol},
                   {"seed", opts.seed}};
  j["screen_nonabelian"] = r.nonabelian;
  j["rank_P1"] = r.core.P1_basis.cols();
  j["rank_PV"] = r.core.pv.basis.cols();
  j["pv_route_disagreement"] = r.core.pv.disagreement;
  j["rankC"] = r.choi.rankC;
  j["bounds"] = {{"lower", r.bnd.lower}, {"upper", r.bnd.upper}};
  if (r.opt) {
    j["d_min_theorem1"] = r.opt->d_min;
    j["d_R_total_theorem1"] = r.opt->d_R_total;
    j["rank_Bbar_Bbar1"] = r.opt->rank_check;
    j["entropy_min"] = r.opt->entropy_min;
    Json log = Json::array();
    for (const RestartRecord& rec : r.opt->restarts_log)
      log.push_back({{"entropy", rec.entropy}, {"iterations", rec.iterations}, {"converged", rec.converged}});
    j["restarts_log"] = std::move(log);
    j["best_restart"] = r.opt->best_restart;
    j["converged"] = r.opt->converged;
  }
  if (r.ki) {
    j["d_min_oracle"] = r.ki->d_min;
    j["d_R_total_oracle"] = r.ki->d_R_total;
    j["d_L_list"] = r.ki->dL_list();
    j["d_R_list"] = r.ki->dR_list();
    Json p = Json::array();
    for (const KIBlock& b : r.ki->blocks) p.push_back(b.p);
    j["block_weights"] = std::move(p);
    j["entropy_expected"] = r.ki->optimal_entropy();
  }
  if (r.pair) {
    j["d_Btilde"] = r.pair->d_Btilde;
    j["roundtrip_error"] = r.pair->roundtrip_error;
    if (opts.conditional_checks > 0) j["conditional_error"] = r.conditional_error;
  }
  return j;
}

Json make_report(const std::string& command, const std::string& input_digest, Json body,
                 const std::vector<std::string>& warnings,
                 const std::vector<std::pair<std::string, double>>& timings_ms) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["input_digest"] = input_digest;
  for (auto& [key, value] : body.items()) j[key] = value;
  j["warnings"] = warnings;
  j["report_digest"] = sha256_hex(j.dump());
  Json t;
  for (const auto& [stage, ms] : timings_ms) t[stage] = ms;
  j["timings_ms"] = t.is_null() ? Json::object() : t;
  return j;
}

}  // namespace qlocomp
