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

#include "revcoref/syntax.h"

#include <algorithm>
#include <deque>
#include <set>
#include <string_view>

namespace revcoref {
namespace {

// Relations under which a token sits inside the noun chunk of its governor.
bool IsChunkInternal(std::string_view label) {
  static constexpr std::string_view kLabels[] = {
      "poss", "nmod:poss", "det", "amod", "compound", "nummod", "predet"};
  return std::find(std::begin(kLabels), std::end(kLabels), label) !=
         std::end(kLabels);
}

bool IsPredicate(Pos pos) { return pos == Pos::kVerb || pos == Pos::kAdj; }

class PhraseCollector {
 public:
  PhraseCollector(const ParsedDocument &doc, const Span &span)
      : doc_(doc), span_(span) {}

  // Adds the phrase headed by token `i` if it is a verb, adjective or noun.
  void Offer(int i) {
    if (i == kRoot || span_.Contains(i)) return;
    Pos pos = doc_.tokens[i].pos;
    if (IsPredicate(pos)) {
      Emit({i, i + 1}, i);
    } else if (IsNominal(pos)) {
      Emit(NounChunk(doc_, i), i);
    }
  }

  // Offers `i`, or the objects of `i` when it is a preposition.
  void OfferThroughPreposition(int i, const std::vector<int> &children_of_i) {
    if (span_.Contains(i)) return;
    if (doc_.tokens[i].pos == Pos::kAdp) {
      for (int c : children_of_i) Offer(c);
    } else {
      Offer(i);
    }
  }

  std::vector<Span> Take() {
    std::sort(out_.begin(), out_.end(), [](const Span &a, const Span &b) {
      return a.start < b.start;
    });
    return std::move(out_);
  }

 private:
  void Emit(TokenRange range, int head) {
    // Trim tokens that belong to the owning span.
    if (span_.start <= range.begin && span_.end > range.begin) {
      range.begin = span_.end;
    }
    if (span_.start < range.end && span_.end >= range.end) {
      range.end = span_.start;
    }
    if (range.begin >= range.end || !range.Contains(head)) return;
    if (!seen_.insert(head).second) return;
    out_.push_back(Span{doc_.doc_id, range.begin, range.end, head,
                        SpanKind::kSyntaxPhrase});
  }

  const ParsedDocument &doc_;
  const Span &span_;
  std::set<int> seen_;
  std::vector<Span> out_;
};

}  // namespace

TokenRange NounChunk(const ParsedDocument &doc, int noun) {
  int begin = noun;
  int sentence_begin = doc.sentences[doc.SentenceOf(noun)].begin;
  for (int k = noun - 1; k >= sentence_begin; --k) {
    int h = doc.tokens[k].dep_head;
    Pos pos = doc.tokens[k].pos;
    if (h <= k || h > noun || pos == Pos::kPunct || pos == Pos::kCconj) break;
    begin = k;
  }
  return {begin, noun + 1};
}

SyntaxPhraseSet ExtractSyntaxPhrases(const Span &span,
                                     const ParsedDocument &doc) {
  const TokenRange sent = doc.sentences[doc.SentenceOf(span.head)];
  std::vector<std::vector<int>> children(doc.size());
  for (int i = sent.begin; i < sent.end; ++i) {
    int h = doc.tokens[i].dep_head;
    if (h != kRoot) children[h].push_back(i);
  }

  PhraseCollector collect(doc, span);

  int anchor = span.head;
  int governor = doc.tokens[anchor].dep_head;
  // A possessive or determiner-like head is represented by its noun chunk.
  if (governor != kRoot && !span.Contains(governor) &&
      IsNominal(doc.tokens[governor].pos) &&
      IsChunkInternal(doc.tokens[anchor].dep_label)) {
    collect.Offer(governor);
    anchor = governor;
    governor = doc.tokens[anchor].dep_head;
  }

  if (governor != kRoot) {
    int target = governor;
    if (doc.tokens[target].pos == Pos::kAdp &&
        doc.tokens[target].dep_head != kRoot) {
      target = doc.tokens[target].dep_head;
    }
    collect.Offer(target);
    for (int sibling : children[governor]) {
      if (sibling == anchor) continue;
      collect.OfferThroughPreposition(sibling, children[sibling]);
    }
  }

  // Verb heads contribute the noun chunks they govern; nominal heads also
  // contribute governed verbs and adjectives (relative clauses, modifiers).
  for (int owner : {span.head, anchor}) {
    bool nominal_owner = !IsPredicate(doc.tokens[owner].pos);
    for (int child : children[owner]) {
      Pos pos = doc.tokens[child].pos;
      if (pos == Pos::kAdp) {
        for (int obj : children[child]) {
          if (IsNominal(doc.tokens[obj].pos)) collect.Offer(obj);
        }
      } else if (IsNominal(pos) || (nominal_owner && IsPredicate(pos))) {
        collect.Offer(child);
      }
    }
  }

  return SyntaxPhraseSet{span, collect.Take()};
}

std::vector<int> SpanDependencyDistances(const ParsedDocument &doc,
                                         const Span &span) {
  int n = span.size();
  std::vector<std::vector<int>> adj(n);
  for (int i = span.start; i < span.end; ++i) {
    int h = doc.tokens[i].dep_head;
    if (h != kRoot && span.Contains(h)) {
      adj[i - span.start].push_back(h - span.start);
      adj[h - span.start].push_back(i - span.start);
    }
  }
  std::vector<int> dist(n, -1);
  std::deque<int> queue{span.head - span.start};
  dist[span.head - span.start] = 0;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace revcoref
