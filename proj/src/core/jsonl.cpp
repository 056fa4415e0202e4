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

#include "core/jsonl.hpp"

#include <cstdio>
#include <istream>
#include <sstream>

#include "core/error.hpp"

namespace ecd::jsonl {

void for_each_record(std::istream& in, std::string_view name,
                     const RecordFn& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where =
        std::string(name) + ":" + std::to_string(line_no) + ": ";
    try {
      json record = json::parse(line);
      if (!record.is_object()) {
        fail(ErrorCode::kParse, "expected a JSON object");
      }
      if (is_header(record)) continue;
      fn(record, line_no);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, where + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      fail(e.code(), where + e.what());
    }
  }
}

void for_each_record(const std::filesystem::path& path, const RecordFn& fn) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  for_each_record(in, path.string(), fn);
}

bool is_header(const json& record) {
  return record.size() == 1 && record.contains("header");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string content_hash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

std::string payload_hash(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  json doc = json::parse(bytes, nullptr, false);
  if (!doc.is_discarded()) {
    if (doc.is_object()) doc.erase("header");
    return content_hash(doc.dump());
  }
  std::string payload;
  std::istringstream in(bytes);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("{\"header\":", 0) == 0) continue;
    payload += line;
    payload += '\n';
  }
  return content_hash(payload);
}

Writer::Writer(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) fail(ErrorCode::kIo, "cannot write " + path.string());
}

void Writer::write(const json& record) {
  out_ << record.dump() << '\n';
  if (!out_) fail(ErrorCode::kIo, "write failed for " + path_.string());
}

void Writer::close() {
  out_.close();
  if (out_.fail()) fail(ErrorCode::kIo, "close failed for " + path_.string());
}

}  // namespace ecd::jsonl
