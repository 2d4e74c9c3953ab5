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

#include "revcoref/tokenizer.h"

#include <fstream>
#include <map>
#include <set>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {

namespace {
constexpr size_t kMaxWordChars = 100;
}  // namespace

Vocabulary::Vocabulary() { Add(std::string(kUnknown)); }

Vocabulary::Vocabulary(const std::vector<std::string> &pieces) : Vocabulary() {
  for (const auto &p : pieces) Add(p);
}

int Vocabulary::Add(const std::string &piece) {
  auto [it, inserted] = ids_.emplace(piece, size());
  if (inserted) pieces_.push_back(piece);
  return it->second;
}

int Vocabulary::Id(std::string_view piece) const {
  auto it = ids_.find(std::string(piece));
  return it == ids_.end() ? -1 : it->second;
}

Vocabulary LoadVocabulary(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary: " + path);
  Vocabulary vocab;
  std::string line;
  while (std::getline(in, line)) {
    std::string piece = Trim(line);
    if (!piece.empty()) vocab.Add(piece);
  }
  return vocab;
}

void SaveVocabulary(const std::string &path, const Vocabulary &vocab) {
  std::string out;
  for (const auto &p : vocab.pieces()) out += p + "\n";
  WriteFile(path, out);
}

std::vector<int> SubwordTokenizer::TokenizeWord(std::string_view word) const {
  std::string w = ToLower(word);
  if (w.empty()) return {};
  if (w.size() > kMaxWordChars) return {0};
  std::vector<int> out;
  size_t start = 0;
  while (start < w.size()) {
    int found = -1;
    size_t end = w.size();
    for (; end > start; --end) {
      std::string piece = w.substr(start, end - start);
      if (start > 0) piece = "##" + piece;
      found = vocab_->Id(piece);
      if (found >= 0) break;
    }
    if (found < 0) return {0};
    out.push_back(found);
    start = end;
  }
  return out;
}

std::vector<int> SubwordTokenizer::Tokenize(
    const std::vector<std::string> &words) const {
  std::vector<int> out;
  for (const auto &w : words) {
    auto ids = TokenizeWord(w);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

Vocabulary BuildVocabulary(
    const Vocabulary &base,
    const std::vector<std::shared_ptr<const ParsedDocument>> &docs,
    const std::vector<std::string> &extra_phrases, int min_count) {
  std::map<std::string, int> counts;
  for (const auto &doc : docs) {
    for (const Token &t : doc->tokens) ++counts[ToLower(t.surface)];
  }
  std::set<std::string> words;
  for (const auto &[w, n] : counts) {
    if (n >= min_count) words.insert(w);
  }
  for (const auto &p : extra_phrases) {
    for (const auto &w : SplitWhitespace(ToLower(p))) words.insert(w);
  }
  Vocabulary vocab = base;
  for (const auto &w : words) {
    if (!w.empty() && w.size() <= kMaxWordChars && vocab.Id(w) < 0) vocab.Add(w);
  }
  return vocab;
}

}  // namespace revcoref
