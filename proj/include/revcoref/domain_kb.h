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

#ifndef REVCOREF_DOMAIN_KB_H_
#define REVCOREF_DOMAIN_KB_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "revcoref/corpus.h"
#include "revcoref/knowledge.h"

namespace revcoref {

inline constexpr double kDefaultRho = 5.0;
inline constexpr int kDefaultKnowledgeCap = 50;

struct KbEntry {
  std::string phrase;  // lowercase lemma
  Pos pos = Pos::kNoun;  // kNoun, kAdj or kVerb
  int count = 0;         // sentences in which phrase and word co-occur
  double score = 0;      // tf * idf

  bool operator==(const KbEntry &) const = default;
};

// Mined domain knowledge: mention word -> phrases sorted by descending score,
// ties broken by phrase.
struct DomainKb {
  std::string domain;
  double rho = kDefaultRho;
  int corpus_size = 0;
  std::map<std::string, std::vector<KbEntry>> entries;
  // Provenance written alongside the entries (seed, config fingerprint).
  nlohmann::json meta = nlohmann::json::object();

  const std::vector<KbEntry> *Find(const std::string &word) const;
  bool operator==(const DomainKb &) const = default;
};

// A token qualifies as a mention word if it is nominal or part of a named
// entity.
bool IsMentionWordToken(const Token &token);

// Phrase class of a content token: NOUN (including PROPN), ADJ or VERB.
std::optional<Pos> PhraseClass(const Token &token);

// Lowercased lemmas of the qualifying tokens of `mention`, deduplicated in
// order of appearance.
std::vector<std::string> ExtractMentionWords(const Span &mention,
                                             const ParsedDocument &doc);

// Mines co-occurring content phrases for every mention word in `unlabeled`
// and keeps those whose tf-idf is at least `rho`.
//
// tf  = C_k / max_k' C_k'      (C = sentences where word and phrase co-occur)
// idf = ln(|reviews| / |reviews containing phrase k|)
DomainKb MineDomainKb(const std::vector<ParsedDocument> &unlabeled, double rho,
                      const std::string &domain = "");

// Union of the entry lists of the mention's words, deduplicated by phrase
// (keeping the maximum score), sorted by score and truncated to `cap`.
std::vector<KnowledgePhrase> LookupDomainKnowledge(
    const DomainKb &kb, const Span &mention, const ParsedDocument &doc,
    int cap = kDefaultKnowledgeCap);

// Canonical JSON text (lexicographic keys, fixed formatting).
std::string DomainKbToJson(const DomainKb &kb);
DomainKb DomainKbFromJson(const std::string &text);
void SaveDomainKb(const std::string &path, const DomainKb &kb);
DomainKb LoadDomainKb(const std::string &path);

}  // namespace revcoref

#endif  // REVCOREF_DOMAIN_KB_H_
