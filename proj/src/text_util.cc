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

#include "revcoref/text_util.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "revcoref/error.h"

namespace revcoref {
namespace {

// Function words that never count as knowledge phrases.
constexpr std::string_view kStopwords[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",
    "also",    "am",      "an",     "and",     "any",     "are",     "as",
    "at",      "be",      "because", "been",   "before",  "being",   "below",
    "between", "both",    "but",    "by",      "can",     "could",   "did",
    "do",      "does",    "doing",  "down",    "during",  "each",    "few",
    "for",     "from",    "further", "get",    "got",     "had",     "has",
    "have",    "having",  "he",     "her",     "here",    "hers",    "him",
    "his",     "how",     "i",      "if",      "in",      "into",    "is",
    "it",      "its",     "itself", "just",    "me",      "more",    "most",
    "my",      "myself",  "no",     "nor",     "not",     "now",     "of",
    "off",     "on",      "once",   "only",    "or",      "other",   "our",
    "out",     "over",    "own",    "same",    "she",     "should",  "so",
    "some",    "such",    "than",   "that",    "the",     "their",   "them",
    "then",    "there",   "these",  "they",    "this",    "those",   "through",
    "to",      "too",     "under",  "until",   "up",      "very",    "was",
    "we",      "were",    "what",   "when",    "where",   "which",   "while",
    "who",     "whom",    "why",    "will",    "with",    "would",   "you",
    "your",    "yours",   "yourself", "'s",    "n't",     "'m",      "'re",
    "'ve",     "'ll",
};

}  // namespace

std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> Split(std::string_view s, char delim) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool IsStopword(std::string_view lowercase_word) {
  static const std::vector<std::string_view> sorted = [] {
    std::vector<std::string_view> v(std::begin(kStopwords), std::end(kStopwords));
    std::sort(v.begin(), v.end());
    return v;
  }();
  return std::binary_search(sorted.begin(), sorted.end(), lowercase_word);
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string &path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed: " + path);
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace revcoref
