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

#ifndef REVCOREF_CORPUS_H_
#define REVCOREF_CORPUS_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace revcoref {

// Coarse part-of-speech tags (universal dependencies tag set plus OTHER).
enum class Pos {
  kAdj, kAdp, kAdv, kAux, kCconj, kDet, kIntj, kNoun, kNum, kPart,
  kPron, kPropn, kPunct, kSconj, kSym, kVerb, kX, kOther,
};

std::string_view PosName(Pos pos);
std::optional<Pos> ParsePos(std::string_view name);

// True for NOUN and PROPN.
inline bool IsNominal(Pos pos) { return pos == Pos::kNoun || pos == Pos::kPropn; }

// Named-entity tags. kNone marks tokens outside any entity.
enum class Ner {
  kNone, kPerson, kNorp, kFac, kOrg, kGpe, kLoc, kProduct, kEvent,
  kWorkOfArt, kLaw, kLanguage, kDate, kTime, kPercent, kMoney, kQuantity,
  kOrdinal, kCardinal,
};

std::string_view NerName(Ner ner);
std::optional<Ner> ParseNer(std::string_view name);

// Sentinel dependency head for sentence roots.
inline constexpr int kRoot = -1;

struct Token {
  std::string surface;
  std::string lemma;
  Pos pos = Pos::kOther;
  Ner ner = Ner::kNone;
  int dep_head = kRoot;  // document-global token index or kRoot
  std::string dep_label;

  bool operator==(const Token &) const = default;
};

// Half-open token range [begin, end).
struct TokenRange {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool Contains(int i) const { return i >= begin && i < end; }
  bool operator==(const TokenRange &) const = default;
};

// A review with its parse. Token dependency heads are document-global.
struct ParsedDocument {
  std::string doc_id;
  std::string domain;
  std::vector<Token> tokens;
  std::vector<TokenRange> sentences;

  int size() const { return static_cast<int>(tokens.size()); }

  // Index of the sentence containing token `i`.
  int SentenceOf(int i) const;

  bool operator==(const ParsedDocument &) const = default;
};

// Throws StructuralError if a ParsedDocument invariant is violated.
void ValidateDocument(const ParsedDocument &doc);

enum class SpanKind { kMention, kAnaphor, kKnowledgePhrase, kSyntaxPhrase };

std::string_view SpanKindName(SpanKind kind);
std::optional<SpanKind> ParseSpanKind(std::string_view name);

struct Span {
  std::string doc_id;
  int start = 0;  // inclusive
  int end = 0;    // exclusive
  int head = 0;
  SpanKind kind = SpanKind::kMention;

  int size() const { return end - start; }
  bool Contains(int i) const { return i >= start && i < end; }
  bool Overlaps(const Span &o) const { return start < o.end && o.start < end; }
  bool operator==(const Span &) const = default;
};

// Returns the head of [start, end): the first token whose dependency head is
// ROOT or lies outside the range.
int SelectHead(const ParsedDocument &doc, int start, int end);

// Builds a span with its head resolved by SelectHead. Throws
// StructuralError if the range is invalid or crosses a sentence boundary.
Span MakeSpan(const ParsedDocument &doc, int start, int end, SpanKind kind);

// Throws StructuralError if `span` is not valid inside `doc`.
void ValidateSpan(const ParsedDocument &doc, const Span &span);

// Space-joined surface text of a span.
std::string SpanText(const ParsedDocument &doc, const Span &span);

struct LabeledTriple {
  std::shared_ptr<const ParsedDocument> context;
  Span mention;
  Span anaphor;
  int label = 0;
};

struct CorefAnnotation {
  std::string doc_id;
  std::vector<std::vector<Span>> clusters;
};

// Documents keyed by doc_id with shared ownership so triples can reference
// their context cheaply.
class DocumentSet {
 public:
  DocumentSet() = default;
  explicit DocumentSet(std::vector<ParsedDocument> docs);

  void Add(ParsedDocument doc);
  std::shared_ptr<const ParsedDocument> Find(const std::string &doc_id) const;
  const std::vector<std::shared_ptr<const ParsedDocument>> &docs() const {
    return docs_;
  }
  size_t size() const { return docs_.size(); }

 private:
  std::vector<std::shared_ptr<const ParsedDocument>> docs_;
  std::unordered_map<std::string, size_t> index_;
};

// JSON (de)serialization of the parsed-corpus record format. `line` is used
// for error messages only.
ParsedDocument DocumentFromJson(const nlohmann::json &record,
                                const std::string &source = "<json>",
                                int line = 0);
nlohmann::json DocumentToJson(const ParsedDocument &doc);

// Reads a JSONL parsed corpus. Keeps only documents whose domain equals
// `domain`; an empty `domain` keeps everything.
std::vector<ParsedDocument> IngestParsedCorpus(const std::string &path,
                                               const std::string &domain);
void WriteParsedCorpus(const std::string &path,
                       const std::vector<ParsedDocument> &docs);

// Reads annotation JSONL. Spans are resolved against `docs`; unknown doc ids
// and invalid spans are errors.
std::vector<CorefAnnotation> LoadAnnotations(const std::string &path,
                                             const DocumentSet &docs);
void WriteAnnotations(const std::string &path,
                      const std::vector<CorefAnnotation> &annotations);

struct TripleOptions {
  // Negatives kept per positive within a review; <= 0 keeps every negative.
  double negative_ratio = 2.4;
  uint64_t seed = 0;
};

// Builds positive pairs within clusters and cross-cluster negatives, then
// downsamples negatives per review.
std::vector<LabeledTriple> BuildTriples(
    const std::vector<CorefAnnotation> &annotations, const DocumentSet &docs,
    const TripleOptions &options = {});

struct DatasetSplit {
  std::vector<LabeledTriple> train;
  std::vector<LabeledTriple> dev;
  std::vector<LabeledTriple> test;
};

// Review-level split: all triples of one review land in the same part.
DatasetSplit SplitDataset(const std::vector<LabeledTriple> &triples,
                          const std::array<double, 3> &ratios, uint64_t seed);

// Triple JSONL: {doc_id, mention: {start, end, head}, anaphor: {...}, label}.
void WriteTriples(const std::string &path,
                  const std::vector<LabeledTriple> &triples);
std::vector<LabeledTriple> ReadTriples(const std::string &path,
                                       const DocumentSet &docs);

}  // namespace revcoref

#endif  // REVCOREF_CORPUS_H_
