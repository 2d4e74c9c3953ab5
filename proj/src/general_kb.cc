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

#include "revcoref/general_kb.h"

#include <fstream>
#include <set>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {

TripleStore::TripleStore(std::vector<Triple> triples)
    : triples_(std::move(triples)) {
  for (int id = 0; id < static_cast<int>(triples_.size()); ++id) {
    std::set<std::string> words;
    for (const auto &w : SplitWhitespace(ToLower(triples_[id].e1))) words.insert(w);
    for (const auto &w : SplitWhitespace(ToLower(triples_[id].e2))) words.insert(w);
    for (const auto &w : words) word_index_[w].push_back(id);
  }
}

const std::vector<int> &TripleStore::Lookup(const std::string &word) const {
  static const std::vector<int> kEmpty;
  auto it = word_index_.find(word);
  return it == word_index_.end() ? kEmpty : it->second;
}

TripleStore LoadTripleStore(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<Triple> triples;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = Split(line, '\t');
    if (cols.size() != 3) {
      throw IngestError(path, row, "<row>",
                        "expected 3 tab-separated columns, got " +
                            std::to_string(cols.size()));
    }
    static constexpr const char *kNames[] = {"e1", "relation", "e2"};
    for (int c = 0; c < 3; ++c) {
      cols[c] = Trim(cols[c]);
      if (cols[c].empty()) throw IngestError(path, row, kNames[c], "empty");
    }
    triples.push_back({cols[0], cols[1], cols[2]});
  }
  return TripleStore(std::move(triples));
}

namespace {

bool ContainsWord(const std::string &entity, const std::string &word) {
  for (const auto &w : SplitWhitespace(ToLower(entity))) {
    if (w == word) return true;
  }
  return false;
}

}  // namespace

std::vector<KnowledgePhrase> LookupGeneralKnowledge(
    const TripleStore &store, const std::vector<std::string> &mention_words,
    int cap) {
  if (cap < 1) throw ConfigError("knowledge cap must be at least 1");
  std::vector<KnowledgePhrase> out;
  std::set<std::string> seen;
  auto emit = [&](const std::string &entity) {
    if (static_cast<int>(out.size()) >= cap) return;
    if (seen.insert(entity).second) {
      out.push_back(MaterializePhrase(entity, 0.0, KnowledgeSource::kGeneral));
    }
  };
  for (const std::string &word : mention_words) {
    for (int id : store.Lookup(word)) {
      const Triple &t = store.triples()[id];
      if (ContainsWord(t.e1, word)) emit(t.e2);
      if (ContainsWord(t.e2, word)) emit(t.e1);
    }
  }
  return out;
}

void AffectLexicon::Add(const std::string &lemma, Eigen::VectorXd values) {
  if (values.size() != width_) {
    throw ShapeError("affect vector for '" + lemma + "' has width " +
                     std::to_string(values.size()) + ", expected " +
                     std::to_string(width_));
  }
  table_[ToLower(lemma)] = std::move(values);
}

Eigen::VectorXd AffectLexicon::Lookup(const std::string &lemma) const {
  auto it = table_.find(ToLower(lemma));
  if (it == table_.end()) return Eigen::VectorXd::Zero(width_);
  return it->second;
}

AffectLexicon LoadAffectLexicon(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError(path, 1, "<header>", "missing");
  auto header = Split(Trim(line), ',');
  if (header.size() < 2 || Trim(header[0]) != "lemma") {
    throw IngestError(path, 1, "<header>", "expected 'lemma,v1,...,vk'");
  }
  AffectLexicon lex(static_cast<int>(header.size()) - 1);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    auto cols = Split(trimmed, ',');
    if (static_cast<int>(cols.size()) != lex.width() + 1) {
      throw IngestError(path, row, "<row>", "wrong number of columns");
    }
    if (Trim(cols[0]).empty()) throw IngestError(path, row, "lemma", "empty");
    Eigen::VectorXd v(lex.width());
    for (int k = 0; k < lex.width(); ++k) {
      try {
        size_t used = 0;
        std::string cell = Trim(cols[k + 1]);
        v[k] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception &) {
        throw IngestError(path, row, header[k + 1], "not a number");
      }
    }
    lex.Add(Trim(cols[0]), std::move(v));
  }
  return lex;
}

}  // namespace revcoref
