// Copyright 2026 The amilkit Authors.
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

#ifndef AMILKIT_JSONL_H_
#define AMILKIT_JSONL_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "amilkit/error.h"
#include "json.hpp"

namespace amilkit {

// Compact single-line dump. Object keys come out sorted, so output is
// byte-stable for equal values.
inline std::string DumpJson(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline void WriteJsonLine(std::ostream& out, const nlohmann::json& j) {
  out << DumpJson(j) << '\n';
}

// Calls fn(json, line_number) for every non-blank line.
template <typename Fn>
void ForEachJsonLine(std::istream& in, Fn&& fn) {
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    fn(j, line_no);
  }
}

// Reads a whole JSON document; `//` and `/* */` comments are allowed.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace amilkit

#endif  // AMILKIT_JSONL_H_
