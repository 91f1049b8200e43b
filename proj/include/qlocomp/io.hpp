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

// JSON interchange. Complex numbers are [re, im] pairs and matrices are
// row-major nested arrays of them.
//
//   state:     {"dims": {"dA": 2, "dB": 2}, "rho": [[[re, im], ...], ...]}
//   channel:   {"dA": 2, "dB": 2, "kraus": [matrix, ...]}
//              (or "choi": matrix in place of "kraus")
//   unitaries: {"unitaries": [matrix, ...]}

#include <string>
#include <vector>

#include <json.hpp>

#include "qlocomp/channel.hpp"

namespace qlocomp {

using Json = nlohmann::ordered_json;

/// Parses JSON text; syntax errors become InputError naming the source and
/// the line and column.
Json parse_json(const std::string& text, const std::string& source);

Json read_json_file(const std::string& path);

/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& j);

Json matrix_to_json(const CMatrix& M);
CMatrix matrix_from_json(const Json& j, const std::string& what);

struct RawState {
  DimPair dims;
  CMatrix rho;
};

RawState state_from_json(const Json& j);
Json state_to_json(DimPair dims, const CMatrix& rho);

ChannelSpec channel_from_json(const Json& j);
Json channel_to_json(const ChannelSpec& ch);

std::vector<CMatrix> unitaries_from_json(const Json& j);
Json unitaries_to_json(const std::vector<CMatrix>& unitaries);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace qlocomp
