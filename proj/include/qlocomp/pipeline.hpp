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

// End-to-end analysis of a bipartite state and its JSON report.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qlocomp/choi.hpp"
#include "qlocomp/io.hpp"

namespace qlocomp {

inline constexpr const char* kReportSchema = "qlocomp/1";

struct PipelineOptions {
  Tolerances tol;
  OptimizerOptions optimizer;
  std::uint64_t seed = 0;
  bool run_optimizer = true;
  bool run_oracle = true;
  bool synthesize = true;
  int conditional_checks = 0;  // random effects M_A for the recovery check
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct PipelineResult {
  BipartiteState state;
  SufficiencyCore core;
  bool nonabelian = false;
  double max_fixed_commutator = 0.0;
  ChoiState choi;
  RankBounds bnd;
  std::optional<OptimizationResult> opt;
  std::vector<CMatrix> basis;
  std::optional<KIDecomposition> ki;
  std::optional<CompressionPair> pair;
  double conditional_error = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings_ms;

  /// True when both routes ran and disagree on d_min.
  [[nodiscard]] bool mismatch() const;
};

PipelineResult run_pipeline(const BipartiteState& state, const PipelineOptions& opts);

/// Report fields that do not depend on timing, in a fixed order.
Json report_body(const PipelineResult& r, const PipelineOptions& opts);

/// Complete report: schema, input digest, body, warnings, a digest over all of
/// those, then timings.
Json make_report(const std::string& command, const std::string& input_digest, Json body,
                 const std::vector<std::string>& warnings,
                 const std::vector<std::pair<std::string, double>>& timings_ms);

}  // namespace qlocomp
