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

#include "revcoref/knowledge.h"

#include <set>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {

KnowledgePhrase MaterializePhrase(const std::string &text, double score,
                                  KnowledgeSource source) {
  std::vector<std::string> words = SplitWhitespace(text);
  if (words.empty()) throw Error("empty knowledge phrase");
  ParsedDocument doc;
  doc.doc_id = "kb:" + text;
  int n = static_cast<int>(words.size());
  for (int i = 0; i < n; ++i) {
    Token t;
    t.surface = words[i];
    t.lemma = ToLower(words[i]);
    t.pos = i == n - 1 ? Pos::kNoun : Pos::kOther;
    t.dep_head = i == n - 1 ? kRoot : n - 1;
    t.dep_label = i == n - 1 ? "ROOT" : "dep";
    doc.tokens.push_back(std::move(t));
  }
  doc.sentences.push_back({0, n});

  KnowledgePhrase phrase;
  phrase.text = text;
  phrase.score = score;
  phrase.source = source;
  phrase.span = Span{doc.doc_id, 0, n, n - 1, SpanKind::kKnowledgePhrase};
  phrase.context = std::make_shared<const ParsedDocument>(std::move(doc));
  return phrase;
}

std::vector<KnowledgePhrase> MergeKnowledge(
    std::vector<KnowledgePhrase> domain, std::vector<KnowledgePhrase> general,
    int cap) {
  std::vector<KnowledgePhrase> out;
  std::set<std::string> seen;
  for (auto *list : {&domain, &general}) {
    for (auto &p : *list) {
      if (static_cast<int>(out.size()) >= cap) return out;
      if (seen.insert(p.text).second) out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace revcoref
