// Copyright 2026 The QJoin Authors.
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

#include <cstddef>
#include <string>
#include <string_view>

namespace qjoin {

// Decodes UTF-8 into Unicode scalar values. Malformed bytes decode to
// U+FFFD one byte at a time, so decoding never fails.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view text);

// Number of Unicode scalar values in `text`.
std::size_t utf8_length(std::string_view text);

}  // namespace qjoin
