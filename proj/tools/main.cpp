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

// qlocomp: minimal exact local compression of bipartite states and channels.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qlocomp/pipeline.hpp"
#include "qlocomp/random.hpp"
#include "qlocomp/selftest.hpp"

namespace fs = std::filesystem;
using namespace qlocomp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitNoCompression = 3;
constexpr int kExitInternal = 4;

struct Globals {
  double rank_tol = kDefaultRankTol;
  double group_tol = kDefaultGroupTol;
  double fix_tol = 1e-9;
  int restarts = 16;
  int max_iters = 2000;
  std::uint64_t seed = 0;
  int threads = 1;
  bool quiet = false;

  [[nodiscard]] PipelineOptions pipeline() const {
    PipelineOptions po;
    po.tol.rank_tol = rank_tol;
    po.tol.group_tol = group_tol;
    po.tol.fix_tol = fix_tol;
    po.optimizer.restarts = restarts;
    po.optimizer.max_iters = max_iters;
    po.optimizer.threads = threads;
    po.seed = seed;
    return po;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const Json& report) { std::cout << report.dump(2) << '\n'; }

void note(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

int exit_code_for(const PipelineResult& r) { return r.mismatch() ? kExitMismatch : kExitOk; }

struct LoadedState {
  BipartiteState state;
  std::string digest;
};

LoadedState load_state(const std::string& path, const Globals& g) {
  const std::string text = slurp(path);
  const RawState raw = state_from_json(parse_json(text, path));
  return {validate_and_restrict(raw.rho, raw.dims, g.rank_tol), sha256_hex(text)};
}

int cmd_analyze(const std::string& path, const Globals& g) {
  const LoadedState in = load_state(path, g);
  const PipelineOptions po = g.pipeline();
  const PipelineResult r = run_pipeline(in.state, po);
  emit(make_report("analyze", in.digest, report_body(r, po), r.warnings, r.timings_ms));
  for (const std::string& w : r.warnings) note(g, "warning: " + w);
  return exit_code_for(r);
}

int cmd_bounds(const std::string& path, const Globals& g) {
  const LoadedState in = load_state(path, g);
  PipelineOptions po = g.pipeline();
  po.run_optimizer = false;
  po.run_oracle = false;
  const PipelineResult r = run_pipeline(in.state, po);
  emit(make_report("bounds", in.digest, report_body(r, po), r.warnings, r.timings_ms));
  return kExitOk;
}

// Lifts the compression pair from the support of rho_B to the original space
// of B. Inputs orthogonal to the support are sent to |0><0| on B~.
ChannelSpec embed_compression(const BipartiteState& st, const CompressionPair& pair) {
  const int dB0 = st.original_dims.dB;
  ChannelSpec ch{dB0, pair.d_Btilde, {}};
  for (const CMatrix& E : pair.E_kraus) ch.kraus.push_back(E * st.iso_B.adjoint());
  if (st.restricted) {
    const CMatrix complement =
        null_space(st.iso_B.adjoint());  // orthonormal basis of supp(rho_B)^perp
    for (Eigen::Index k = 0; k < complement.cols(); ++k) {
      CMatrix K = CMatrix::Zero(pair.d_Btilde, dB0);
      K.row(0) = complement.col(k).adjoint();
      ch.kraus.push_back(std::move(K));
    }
  }
  return ch;
}

ChannelSpec embed_recovery(const BipartiteState& st, const CompressionPair& pair) {
  ChannelSpec ch{pair.d_Btilde, st.original_dims.dB, {}};
  for (const CMatrix& R : pair.R_kraus) ch.kraus.push_back(st.iso_B * R);
  return ch;
}

int cmd_compress(const std::string& path, const std::string& out_dir, bool force, const Globals& g) {
  const LoadedState in = load_state(path, g);
  PipelineOptions po = g.pipeline();
  po.conditional_checks = 20;
  const PipelineResult r = run_pipeline(in.state, po);
  Json body = report_body(r, po);
  const BipartiteState& st = r.state;
  const int dB0 = st.original_dims.dB;
  if (r.ki->d_min == dB0 && !force) {
    emit(make_report("compress", in.digest, body, r.warnings, r.timings_ms));
    std::cerr << "no nontrivial compression exists (d_min = dB = " << dB0
              << "); use --force to write the identity-sized pair anyway\n";
    return kExitNoCompression;
  }
  const ChannelSpec E = embed_compression(st, *r.pair);
  const ChannelSpec R = embed_recovery(st, *r.pair);
  validate_channel(E, 1e-8);
  validate_channel(R, 1e-8);

  // Round trip on the state as given, before support restriction.
  const CMatrix rho0 = st.embedded();
  const CMatrix small = apply_kraus_on_B(E.kraus, rho0, st.original_dims);
  const CMatrix back = apply_kraus_on_B(R.kraus, small, {st.original_dims.dA, r.pair->d_Btilde});
  body["roundtrip_error_original"] = trace_norm(0.5 * (back - rho0 + (back - rho0).adjoint()));
  std::vector<std::string> warnings = r.warnings;
  if (body["roundtrip_error_original"].get<double>() > 1e-8)
    warnings.push_back("ROUNDTRIP: reconstruction of the original input exceeds 1e-8");

  fs::create_directories(out_dir);
  write_json_file((fs::path(out_dir) / "compression.json").string(), channel_to_json(E));
  write_json_file((fs::path(out_dir) / "recovery.json").string(), channel_to_json(R));
  write_json_file((fs::path(out_dir) / "compressed_state.json").string(),
                  state_to_json({st.original_dims.dA, r.pair->d_Btilde}, 0.5 * (small + small.adjoint())));
  const Json report = make_report("compress", in.digest, body, warnings, r.timings_ms);
  write_json_file((fs::path(out_dir) / "report.json").string(), report);
  emit(report);
  return exit_code_for(r);
}

int analyze_channel(const std::string& command, const ChannelSpec& ch, const std::string& digest,
                    const Globals& g) {
  const BipartiteState st = choi_state(ch);
  const PipelineOptions po = g.pipeline();
  const PipelineResult r = run_pipeline(st, po);
  Json body;
  body["channel"] = {{"dA", ch.dA_in}, {"dB", ch.dB_out}, {"kraus_count", ch.kraus.size()}};
  std::vector<std::string> warnings = r.warnings;
  const bool unital = is_unital(ch, 1e-9);
  Json shortcut = {{"applicable", unital}};
  bool mismatch = r.mismatch();
  if (unital) {
    const UnitalShortcut fast = unital_shortcut(ch, 1e-9, g.seed);
    shortcut["d_min_fast"] = fast.d_min_fast;
    shortcut["commutant_dimension"] = fast.commutant.size();
    shortcut["agrees"] = fast.d_min_fast == r.ki->d_min;
    if (fast.d_min_fast != r.ki->d_min) {
      warnings.push_back("MISMATCH: unital shortcut and general pipeline disagree on d_min");
      mismatch = true;
    }
  }
  body["unital_shortcut"] = std::move(shortcut);
  const Json rest = report_body(r, po);
  for (const auto& [key, value] : rest.items()) body[key] = value;
  emit(make_report(command, digest, body, warnings, r.timings_ms));
  for (const std::string& w : warnings) note(g, "warning: " + w);
  return mismatch ? kExitMismatch : kExitOk;
}

std::vector<std::pair<int, int>> parse_blocks(const std::string& spec) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw InputError("--blocks: expected entries like 2x1, got '" + item + "'");
    try {
      const int l = std::stoi(item.substr(0, x));
      const int r = std::stoi(item.substr(x + 1));
      if (l < 1 || r < 1) throw InputError("--blocks: sizes must be positive");
      out.emplace_back(l, r);
    } catch (const std::logic_error&) {
      throw InputError("--blocks: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw InputError("--blocks: no blocks given");
  return out;
}

struct GenParams {
  std::string family;
  int dA = 2;
  int dB = 2;
  int classes = 2;
  int schmidt = 2;
  std::string blocks = "1x1,2x1,1x2";
  std::string out;
  std::string truth;
};

void write_or_print(const std::string& path, const Json& j) {
  if (path.empty() || path == "-")
    std::cout << j.dump(2) << '\n';
  else
    write_json_file(path, j);
}

int cmd_gen(const GenParams& p, const Globals& g) {
  auto rng = make_engine(g.seed, Stream::Generator, 0);
  if (p.family == "classical") {
    const BipartiteState st = make_classical(random_classical_table(p.dA, p.dB, p.classes, rng));
    write_or_print(p.out, state_to_json(st.original_dims, st.embedded()));
  } else if (p.family == "pure") {
    const BipartiteState st = make_pure(random_schmidt_coeffs(p.dA, p.dB, p.schmidt, rng));
    write_or_print(p.out, state_to_json(st.original_dims, st.embedded()));
  } else if (p.family == "planted") {
    const PlantedState ps = random_planted(p.dA, parse_blocks(p.blocks), rng);
    write_or_print(p.out, state_to_json(ps.state.dims, ps.state.rho));
    Json truth;
    truth["d_min"] = ps.d_min();
    truth["d_R_total"] = ps.d_R_total();
    truth["rankC"] = ps.sum_dL_squared();
    truth["d_L_list"] = ps.dL;
    truth["d_R_list"] = ps.dR;
    truth["weights"] = ps.weights;
    std::string truth_path = p.truth;
    if (truth_path.empty() && !p.out.empty() && p.out != "-")
      truth_path = (fs::path(p.out).parent_path() / "truth.json").string();
    if (truth_path.empty()) truth_path = "truth.json";
    write_json_file(truth_path, truth);
  } else if (p.family == "product") {
    const CMatrix rho = kron(random_density(p.dA, p.dA, rng), random_density(p.dB, p.dB, rng));
    write_or_print(p.out, state_to_json({p.dA, p.dB}, rho));
  } else if (p.family == "random") {
    write_or_print(p.out, state_to_json({p.dA, p.dB}, random_density(p.dA * p.dB, p.dA * p.dB, rng)));
  } else if (p.family == "twirl_s3") {
    write_or_print(p.out, channel_to_json(make_twirl(s3_regular_representation())));
  } else {
    throw InputError("gen: unknown family '" + p.family + "'");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlocomp: minimal exact local compression of bipartite quantum states and channels"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--rank-tol", g.rank_tol, "Relative numerical rank threshold")->capture_default_str();
  app.add_option("--group-tol", g.group_tol, "Relative gap for eigenvalue clustering")->capture_default_str();
  app.add_option("--fix-tol", g.fix_tol, "Distance from 1 for fixed-point eigenvalues")->capture_default_str();
  app.add_option("--restarts", g.restarts, "Optimizer restarts")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-iters", g.max_iters, "Iterations per restart")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Root random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Threads for optimizer restarts")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress diagnostics on stderr");

  std::string path;
  auto* analyze = app.add_subcommand("analyze", "Full analysis of a state file; report on stdout");
  analyze->add_option("state", path, "State JSON file")->required();

  auto* bnds = app.add_subcommand("bounds", "Rank bounds only (no optimization)");
  bnds->add_option("state", path, "State JSON file")->required();

  std::string out_dir = "compressed";
  bool force = false;
  auto* compress = app.add_subcommand("compress", "Write compression and recovery channels");
  compress->add_option("state", path, "State JSON file")->required();
  compress->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  compress->add_flag("--force", force, "Write files even when no compression is possible");

  auto* channel = app.add_subcommand("channel", "Compression of a channel's output");
  channel->require_subcommand(1);
  auto* ch_analyze = channel->add_subcommand("analyze", "Analyze a channel JSON file");
  ch_analyze->add_option("channel", path, "Channel JSON file")->required();
  auto* ch_twirl = channel->add_subcommand("twirl", "Analyze the twirl over a list of unitaries");
  ch_twirl->add_option("unitaries", path, "Unitary-list JSON file")->required();

  GenParams gp;
  auto* gen = app.add_subcommand("gen", "Generate example states and channels");
  gen->add_option("family", gp.family, "classical|pure|planted|product|twirl_s3|random")
      ->required()
      ->check(CLI::IsMember({"classical", "pure", "planted", "product", "twirl_s3", "random"}));
  gen->add_option("--dA", gp.dA, "Dimension of A")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--dB", gp.dB, "Dimension of B")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--classes", gp.classes, "Distinct conditionals (classical)")->capture_default_str();
  gen->add_option("--schmidt", gp.schmidt, "Schmidt rank (pure)")->capture_default_str();
  gen->add_option("--blocks", gp.blocks, "Block shapes dLxdR,... (planted)")->capture_default_str();
  gen->add_option("-o,--out", gp.out, "Output file (default stdout)");
  gen->add_option("--truth", gp.truth, "Ground-truth file for planted states (default truth.json next to --out)");

  bool quick = false;
  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite on generated instances");
  selftest->add_flag("--quick", quick, "Small instances only (dB <= 4)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(path, g);
    if (*bnds) return cmd_bounds(path, g);
    if (*compress) return cmd_compress(path, out_dir, force, g);
    if (*ch_analyze) {
      const std::string text = slurp(path);
      return analyze_channel("channel analyze", channel_from_json(parse_json(text, path)),
                             sha256_hex(text), g);
    }
    if (*ch_twirl) {
      const std::string text = slurp(path);
      return analyze_channel("channel twirl", make_twirl(unitaries_from_json(parse_json(text, path))),
                             sha256_hex(text), g);
    }
    if (*gen) return cmd_gen(gp, g);
    if (*selftest) {
      SelftestOptions so;
      so.quick = quick;
      so.seed = g.seed;
      so.pipeline = g.pipeline();
      so.quiet = g.quiet;
      Stopwatch sw;
      const SelftestSummary s = run_selftest(so, std::cout);
      std::cout << "elapsed: " << static_cast<long long>(sw.lap_ms()) << " ms\n";
      return s.ok() ? kExitOk : 1;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
