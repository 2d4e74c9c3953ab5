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

#ifndef REVCOREF_TOKENIZER_H_
#define REVCOREF_TOKENIZER_H_

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revcoref/corpus.h"

namespace revcoref {

// Sub-token vocabulary. Id 0 is always "[UNK]". Continuation pieces carry a
// "##" prefix.
class Vocabulary {
 public:
  static constexpr std::string_view kUnknown = "[UNK]";

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string> &pieces);

  // Returns the id of `piece`, adding it if new.
  int Add(const std::string &piece);
  // -1 if absent.
  int Id(std::string_view piece) const;
  const std::string &Piece(int id) const { return pieces_[id]; }
  int size() const { return static_cast<int>(pieces_.size()); }
  const std::vector<std::string> &pieces() const { return pieces_; }

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> ids_;
};

// One piece per line.
Vocabulary LoadVocabulary(const std::string &path);
void SaveVocabulary(const std::string &path, const Vocabulary &vocab);

// Greedy longest-match-first word-piece segmentation of lowercased words.
class SubwordTokenizer {
 public:
  explicit SubwordTokenizer(const Vocabulary &vocab) : vocab_(&vocab) {}

  std::vector<int> TokenizeWord(std::string_view word) const;
  std::vector<int> Tokenize(const std::vector<std::string> &words) const;

 private:
  const Vocabulary *vocab_;
};

// Extends `base`, in sorted order, with every lowercase word seen at least
// `min_count` times in `docs` and every word of `extra_phrases`. Rarer words
// are left to sub-word segmentation.
Vocabulary BuildVocabulary(
    const Vocabulary &base,
    const std::vector<std::shared_ptr<const ParsedDocument>> &docs,
    const std::vector<std::string> &extra_phrases, int min_count = 1);

}  // namespace revcoref

#endif  // REVCOREF_TOKENIZER_H_
