// Copyright 2026 The ecdetect Authors.
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

#ifndef ECDETECT_CORE_JSONL_HPP_
#define ECDETECT_CORE_JSONL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "json.hpp"

namespace ecd::jsonl {

using nlohmann::json;

using RecordFn = std::function<void(const json& record, std::size_t line)>;

// Iterates the records of a JSON-lines stream. Blank lines and header records
// ({"header": {...}}) are skipped. Any JSON or schema failure raised inside
// `fn` is rethrown as Error(kParse) naming `name` and the 1-based line.
void for_each_record(std::istream& in, std::string_view name, const RecordFn& fn);
void for_each_record(const std::filesystem::path& path, const RecordFn& fn);

bool is_header(const json& record);

// Throws Error(kIo) naming the path when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view bytes);
std::string content_hash(std::string_view bytes);
// Hash of a file's records with any header record removed, so reruns that
// differ only in creation time fingerprint identically.
std::string payload_hash(const std::filesystem::path& path);

// Writes one compact JSON document per line.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);

  void write(const json& record);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace ecd::jsonl

#endif  // ECDETECT_CORE_JSONL_HPP_
