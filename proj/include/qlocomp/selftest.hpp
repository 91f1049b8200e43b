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

#include <cstdint>
#include <ostream>

#include "qlocomp/pipeline.hpp"

namespace qlocomp {

struct SelftestOptions {
  bool quick = false;  // dB <= 4 instances only
  std::uint64_t seed = 0;
  PipelineOptions pipeline;
  bool quiet = false;  // only print the summary line
};

struct SelftestSummary {
  int passed = 0;
  int failed = 0;
  [[nodiscard]] bool ok() const { return failed == 0; }
};

/// Runs every structural invariant on generated instances and prints one
/// status line per invariant (worst value over all instances).
SelftestSummary run_selftest(const SelftestOptions& opts, std::ostream& out);

}  // namespace qlocomp
