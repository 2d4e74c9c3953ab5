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

#ifndef REVCOREF_SYNTAX_H_
#define REVCOREF_SYNTAX_H_

#include <vector>

#include "revcoref/corpus.h"

namespace revcoref {

// Nouns, verbs and adjectives attached to a span through one chunk-level
// dependency edge.
struct SyntaxPhraseSet {
  Span for_span;
  std::vector<Span> phrases;  // kind kSyntaxPhrase, sorted by start
};

// Collects, for the span's head (lifted to its enclosing noun chunk when the
// head is a nominal modifier such as a possessive):
//   * the governing verb/adjective/noun, looking through a preposition;
//   * verbs, adjectives and noun chunks sharing that governor;
//   * verbs, adjectives and noun chunks it governs, looking through
//     prepositions.
// Returned spans never include tokens of `span`.
SyntaxPhraseSet ExtractSyntaxPhrases(const Span &span,
                                     const ParsedDocument &doc);

// Noun chunk headed by `noun`: the head plus the contiguous run of tokens
// to its left whose dependency heads point rightwards into the chunk.
TokenRange NounChunk(const ParsedDocument &doc, int noun);

// Path length from every token of the span to the span head, following
// dependency edges (in either direction) that stay inside the span. -1 for
// tokens not connected to the head inside the span.
std::vector<int> SpanDependencyDistances(const ParsedDocument &doc,
                                         const Span &span);

}  // namespace revcoref

#endif  // REVCOREF_SYNTAX_H_
