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

#include "qlocomp/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace qlocomp {

namespace {

int get_dim(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw InputError(what + ": missing integer field \"" + key + "\"");
  const int d = j.at(key).get<int>();
  if (d < 1) throw InputError(what + ": \"" + key + "\" must be positive");
  return d;
}

std::vector<CMatrix> matrix_list(const Json& j, const char* key, const std::string& what) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw InputError(what + ": missing array field \"" + key + "\"");
  std::vector<CMatrix> out;
  for (size_t k = 0; k < j.at(key).size(); ++k)
    out.push_back(matrix_from_json(j.at(key).at(k), what + "." + key + "[" + std::to_string(k) + "]"));
  return out;
}

}  // namespace

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() carries "at line L, column C".
    throw InputError(source + ": malformed JSON: " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot write file");
  out << j.dump(2) << '\n';
}

Json matrix_to_json(const CMatrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back({M(r, c).real(), M(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + ": expected a non-empty array of rows");
  const size_t rows = j.size();
  if (!j.at(0).is_array() || j.at(0).empty())
    throw InputError(what + ": rows must be non-empty arrays");
  const size_t cols = j.at(0).size();
  CMatrix M(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || row.size() != cols)
      throw InputError(what + ": row " + std::to_string(r) + " has the wrong length");
    for (size_t c = 0; c < cols; ++c) {
      const Json& z = row.at(c);
      if (!z.is_array() || z.size() != 2 || !z.at(0).is_number() || !z.at(1).is_number())
        throw InputError(what + ": entry (" + std::to_string(r) + ", " + std::to_string(c) +
                         ") must be a [re, im] pair");
      M(r, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return M;
}

RawState state_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("state: expected a JSON object");
  if (!j.contains("dims") || !j.at("dims").is_object())
    throw InputError("state: missing object field \"dims\"");
  RawState out;
  out.dims = {get_dim(j.at("dims"), "dA", "state.dims"), get_dim(j.at("dims"), "dB", "state.dims")};
  if (!j.contains("rho")) throw InputError("state: missing field \"rho\"");
  out.rho = matrix_from_json(j.at("rho"), "state.rho");
  return out;
}

Json state_to_json(DimPair dims, const CMatrix& rho) {
  Json j;
  j["dims"] = {{"dA", dims.dA}, {"dB", dims.dB}};
  j["rho"] = matrix_to_json(rho);
  return j;
}

ChannelSpec channel_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("channel: expected a JSON object");
  const int dA = get_dim(j, "dA", "channel");
  const int dB = get_dim(j, "dB", "channel");
  if (j.contains("kraus")) {
    ChannelSpec ch{dA, dB, matrix_list(j, "kraus", "channel")};
    validate_channel(ch);
    return ch;
  }
  if (j.contains("choi")) return channel_from_choi(matrix_from_json(j.at("choi"), "channel.choi"), dA, dB);
  throw InputError("channel: need a \"kraus\" or \"choi\" field");
}

Json channel_to_json(const ChannelSpec& ch) {
  Json j;
  j["dA"] = ch.dA_in;
  j["dB"] = ch.dB_out;
  Json list = Json::array();
  for (const CMatrix& K : ch.kraus) list.push_back(matrix_to_json(K));
  j["kraus"] = std::move(list);
  return j;
}

std::vector<CMatrix> unitaries_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("unitaries: expected a JSON object");
  return matrix_list(j, "unitaries", "unitaries");
}

Json unitaries_to_json(const std::vector<CMatrix>& unitaries) {
  Json list = Json::array();
  for (const CMatrix& U : unitaries) list.push_back(matrix_to_json(U));
  Json j;
  j["unitaries"] = std::move(list);
  return j;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("sha256: digest failed");
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return os.str();
}

}  // namespace qlocomp
