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

#ifndef REVCOREF_GENERAL_KB_H_
#define REVCOREF_GENERAL_KB_H_

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "revcoref/corpus.h"
#include "revcoref/knowledge.h"

namespace revcoref {

struct Triple {
  std::string e1;
  std::string relation;
  std::string e2;
};

// Commonsense triples with a full-word inverted index over both entities.
class TripleStore {
 public:
  TripleStore() = default;
  explicit TripleStore(std::vector<Triple> triples);

  const std::vector<Triple> &triples() const { return triples_; }
  size_t size() const { return triples_.size(); }

  // Ids of triples whose e1 or e2 contains `word` (lowercase) as a full word,
  // in ascending order.
  const std::vector<int> &Lookup(const std::string &word) const;

 private:
  std::vector<Triple> triples_;
  std::unordered_map<std::string, std::vector<int>> word_index_;
};

// Reads `e1<TAB>relation<TAB>e2` rows. Empty fields and wrong column counts
// raise IngestError with the row number.
TripleStore LoadTripleStore(const std::string &path);

// For every triple where one entity contains a mention word, returns the
// other entity. Deduplicated in order of discovery and truncated to `cap`.
std::vector<KnowledgePhrase> LookupGeneralKnowledge(
    const TripleStore &store, const std::vector<std::string> &mention_words,
    int cap = 50);

// Lemma -> fixed-width affect vector. Unknown lemmas map to zeros.
class AffectLexicon {
 public:
  explicit AffectLexicon(int width = 0) : width_(width) {}

  void Add(const std::string &lemma, Eigen::VectorXd values);
  int width() const { return width_; }
  size_t size() const { return table_.size(); }
  const std::map<std::string, Eigen::VectorXd> &entries() const {
    return table_;
  }
  Eigen::VectorXd Lookup(const std::string &lemma) const;
  Eigen::VectorXd Vector(const Token &token) const {
    return Lookup(token.lemma);
  }

 private:
  int width_;
  std::map<std::string, Eigen::VectorXd> table_;
};

// CSV with header `lemma,v1,...,vk`; the header fixes the width k.
AffectLexicon LoadAffectLexicon(const std::string &path);

}  // namespace revcoref

#endif  // REVCOREF_GENERAL_KB_H_
