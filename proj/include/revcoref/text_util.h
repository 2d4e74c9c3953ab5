// Copyright 2026 The revcoref Authors.
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

#ifndef REVCOREF_TEXT_UTIL_H_
#define REVCOREF_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace revcoref {

// ASCII lowercase.
std::string ToLower(std::string_view s);

// Splits on runs of ASCII whitespace; empty pieces are dropped.
std::vector<std::string> SplitWhitespace(std::string_view s);

// Splits on a single delimiter, keeping empty pieces.
std::vector<std::string> Split(std::string_view s, char delim);

std::string Trim(std::string_view s);

// True for entries of the bundled English stopword list (lowercase input).
bool IsStopword(std::string_view lowercase_word);

// Whole-file helpers. Throw Error on I/O failure.
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, std::string_view contents);

// Hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);

}  // namespace revcoref

#endif  // REVCOREF_TEXT_UTIL_H_
