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

#ifndef REVCOREF_KNOWLEDGE_H_
#define REVCOREF_KNOWLEDGE_H_

#include <memory>
#include <string>
#include <vector>

#include "revcoref/corpus.h"

namespace revcoref {

enum class KnowledgeSource { kDomain, kGeneral };

// One candidate knowledge phrase for a mention, materialized as a span over
// its own synthetic context so it can be embedded like any other span.
struct KnowledgePhrase {
  std::string text;
  double score = 0;  // tf-idf for domain entries, 0 for general entries
  KnowledgeSource source = KnowledgeSource::kDomain;
  std::shared_ptr<const ParsedDocument> context;
  Span span;
};

// Builds the synthetic context for a phrase: one token per whitespace word,
// every word attached to the last one, which is the sentence root.
KnowledgePhrase MaterializePhrase(const std::string &text, double score,
                                  KnowledgeSource source);

// Concatenates domain then general phrases, dropping repeated texts, and
// truncates to `cap`.
std::vector<KnowledgePhrase> MergeKnowledge(
    std::vector<KnowledgePhrase> domain, std::vector<KnowledgePhrase> general,
    int cap);

}  // namespace revcoref

#endif  // REVCOREF_KNOWLEDGE_H_
