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

#ifndef ECDETECT_CORE_UTF8_HPP_
#define ECDETECT_CORE_UTF8_HPP_

#include <cstddef>
#include <string>
#include <string_view>

// Offsets exposed by the library count Unicode scalar values, so text that
// is sliced by offset goes through these helpers.
namespace ecd::utf8 {

// Throws Error(kParse) on malformed input.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

std::size_t length(std::string_view text);

inline bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == U'\u00A0';
}

}  // namespace ecd::utf8

#endif  // ECDETECT_CORE_UTF8_HPP_
