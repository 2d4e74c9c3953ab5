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

#include "revcoref/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {
namespace {

using nlohmann::json;

constexpr std::pair<Pos, std::string_view> kPosNames[] = {
    {Pos::kAdj, "ADJ"},     {Pos::kAdp, "ADP"},     {Pos::kAdv, "ADV"},
    {Pos::kAux, "AUX"},     {Pos::kCconj, "CCONJ"}, {Pos::kDet, "DET"},
    {Pos::kIntj, "INTJ"},   {Pos::kNoun, "NOUN"},   {Pos::kNum, "NUM"},
    {Pos::kPart, "PART"},   {Pos::kPron, "PRON"},   {Pos::kPropn, "PROPN"},
    {Pos::kPunct, "PUNCT"}, {Pos::kSconj, "SCONJ"}, {Pos::kSym, "SYM"},
    {Pos::kVerb, "VERB"},   {Pos::kX, "X"},         {Pos::kOther, "OTHER"},
};

constexpr std::pair<Ner, std::string_view> kNerNames[] = {
    {Ner::kNone, "NONE"},         {Ner::kPerson, "PERSON"},
    {Ner::kNorp, "NORP"},         {Ner::kFac, "FAC"},
    {Ner::kOrg, "ORG"},           {Ner::kGpe, "GPE"},
    {Ner::kLoc, "LOC"},           {Ner::kProduct, "PRODUCT"},
    {Ner::kEvent, "EVENT"},       {Ner::kWorkOfArt, "WORK_OF_ART"},
    {Ner::kLaw, "LAW"},           {Ner::kLanguage, "LANGUAGE"},
    {Ner::kDate, "DATE"},         {Ner::kTime, "TIME"},
    {Ner::kPercent, "PERCENT"},   {Ner::kMoney, "MONEY"},
    {Ner::kQuantity, "QUANTITY"}, {Ner::kOrdinal, "ORDINAL"},
    {Ner::kCardinal, "CARDINAL"},
};

constexpr std::pair<SpanKind, std::string_view> kSpanKindNames[] = {
    {SpanKind::kMention, "MENTION"},
    {SpanKind::kAnaphor, "ANAPHOR"},
    {SpanKind::kKnowledgePhrase, "KNOWLEDGE_PHRASE"},
    {SpanKind::kSyntaxPhrase, "SYNTAX_PHRASE"},
};

template <typename E, size_t N>
std::string_view NameOf(const std::pair<E, std::string_view> (&table)[N],
                        E value) {
  for (const auto &[v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E, size_t N>
std::optional<E> ValueOf(const std::pair<E, std::string_view> (&table)[N],
                         std::string_view name) {
  for (const auto &[v, n] : table) {
    if (n == name) return v;
  }
  return std::nullopt;
}

// 64-bit FNV-1a; stable across platforms, used to derive per-review seeds.
uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

const json &Require(const json &obj, const char *key, json::value_t type,
                    const std::string &source, int line,
                    const std::string &path) {
  auto it = obj.find(key);
  std::string field = path.empty() ? key : path + "." + key;
  if (it == obj.end()) throw IngestError(source, line, field, "missing");
  bool ok = it->type() == type ||
            (type == json::value_t::number_integer &&
             it->type() == json::value_t::number_unsigned);
  if (!ok) throw IngestError(source, line, field, "wrong type");
  return *it;
}

template <typename Fn>
void ForEachJsonLine(const std::string &path, Fn &&fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error &e) {
      throw IngestError(path, lineno, "<record>", e.what());
    }
    if (!record.is_object()) {
      throw IngestError(path, lineno, "<record>", "not a JSON object");
    }
    fn(record, lineno);
  }
}

Span SpanFromJson(const json &obj, const ParsedDocument &doc, SpanKind kind,
                  const std::string &source, int line,
                  const std::string &path) {
  int start = Require(obj, "start", json::value_t::number_integer, source,
                      line, path).get<int>();
  int end = Require(obj, "end", json::value_t::number_integer, source, line,
                    path).get<int>();
  Span span;
  try {
    span = MakeSpan(doc, start, end, kind);
  } catch (const StructuralError &e) {
    throw StructuralError(source + ":" + std::to_string(line) + ": " + path +
                          ": " + e.what());
  }
  if (auto it = obj.find("head"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      throw IngestError(source, line, path + ".head", "wrong type");
    }
    span.head = it->get<int>();
  }
  if (auto it = obj.find("kind"); it != obj.end() && !it->is_null()) {
    auto parsed = it->is_string() ? ParseSpanKind(it->get<std::string>())
                                  : std::nullopt;
    if (!parsed) throw IngestError(source, line, path + ".kind", "unknown kind");
    span.kind = *parsed;
  }
  ValidateSpan(doc, span);
  return span;
}

json SpanToJson(const Span &span) {
  return json{{"start", span.start}, {"end", span.end}, {"head", span.head}};
}

// Orients a pair so that the anaphor is the explicitly marked one, or else
// the later-starting span.
std::pair<Span, Span> Orient(const Span &a, const Span &b) {
  bool a_ana = a.kind == SpanKind::kAnaphor;
  bool b_ana = b.kind == SpanKind::kAnaphor;
  if (a_ana != b_ana) return a_ana ? std::pair{b, a} : std::pair{a, b};
  bool a_first = a.start < b.start || (a.start == b.start && a.end <= b.end);
  return a_first ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

std::string_view PosName(Pos pos) { return NameOf(kPosNames, pos); }
std::optional<Pos> ParsePos(std::string_view name) {
  return ValueOf(kPosNames, name);
}
std::string_view NerName(Ner ner) { return NameOf(kNerNames, ner); }
std::optional<Ner> ParseNer(std::string_view name) {
  return ValueOf(kNerNames, name);
}
std::string_view SpanKindName(SpanKind kind) {
  return NameOf(kSpanKindNames, kind);
}
std::optional<SpanKind> ParseSpanKind(std::string_view name) {
  return ValueOf(kSpanKindNames, name);
}

int ParsedDocument::SentenceOf(int i) const {
  auto it = std::upper_bound(
      sentences.begin(), sentences.end(), i,
      [](int v, const TokenRange &r) { return v < r.end; });
  if (it == sentences.end() || !it->Contains(i)) return -1;
  return static_cast<int>(it - sentences.begin());
}

void ValidateDocument(const ParsedDocument &doc) {
  int expected = 0;
  for (const TokenRange &s : doc.sentences) {
    if (s.begin != expected || s.end <= s.begin) {
      throw StructuralError("document " + doc.doc_id +
                            ": sentence ranges must be sorted, non-empty and "
                            "contiguous");
    }
    expected = s.end;
  }
  if (expected != doc.size()) {
    throw StructuralError("document " + doc.doc_id +
                          ": sentences do not cover all tokens");
  }
  for (int i = 0; i < doc.size(); ++i) {
    int head = doc.tokens[i].dep_head;
    if (head == kRoot) continue;
    int sent = doc.SentenceOf(i);
    if (head == i || head < 0 || !doc.sentences[sent].Contains(head)) {
      throw StructuralError("document " + doc.doc_id + ": token " +
                            std::to_string(i) +
                            " has a dependency head outside its sentence");
    }
  }
}

int SelectHead(const ParsedDocument &doc, int start, int end) {
  for (int i = start; i < end; ++i) {
    int h = doc.tokens[i].dep_head;
    if (h == kRoot || h < start || h >= end) return i;
  }
  // Cyclic parse inside the range; fall back to the last token.
  return end - 1;
}

void ValidateSpan(const ParsedDocument &doc, const Span &span) {
  if (span.start < 0 || span.start >= span.end || span.end > doc.size()) {
    throw StructuralError("span [" + std::to_string(span.start) + ", " +
                          std::to_string(span.end) + ") out of range in " +
                          doc.doc_id);
  }
  if (!span.Contains(span.head)) {
    throw StructuralError("span head outside span in " + doc.doc_id);
  }
  if (doc.SentenceOf(span.start) != doc.SentenceOf(span.end - 1)) {
    throw StructuralError("span [" + std::to_string(span.start) + ", " +
                          std::to_string(span.end) +
                          ") crosses a sentence boundary in " + doc.doc_id);
  }
}

Span MakeSpan(const ParsedDocument &doc, int start, int end, SpanKind kind) {
  Span span{doc.doc_id, start, end, start, kind};
  if (start < 0 || start >= end || end > doc.size()) {
    ValidateSpan(doc, span);  // throws
  }
  span.head = SelectHead(doc, start, end);
  ValidateSpan(doc, span);
  return span;
}

std::string SpanText(const ParsedDocument &doc, const Span &span) {
  std::string out;
  for (int i = span.start; i < span.end; ++i) {
    if (i > span.start) out += ' ';
    out += doc.tokens[i].surface;
  }
  return out;
}

DocumentSet::DocumentSet(std::vector<ParsedDocument> docs) {
  for (auto &d : docs) Add(std::move(d));
}

void DocumentSet::Add(ParsedDocument doc) {
  std::string id = doc.doc_id;
  auto ptr = std::make_shared<const ParsedDocument>(std::move(doc));
  auto [it, inserted] = index_.emplace(id, docs_.size());
  if (!inserted) throw StructuralError("duplicate doc_id: " + id);
  docs_.push_back(std::move(ptr));
}

std::shared_ptr<const ParsedDocument> DocumentSet::Find(
    const std::string &doc_id) const {
  auto it = index_.find(doc_id);
  return it == index_.end() ? nullptr : docs_[it->second];
}

ParsedDocument DocumentFromJson(const json &record, const std::string &source,
                                int line) {
  ParsedDocument doc;
  doc.doc_id = Require(record, "doc_id", json::value_t::string, source, line,
                       "").get<std::string>();
  doc.domain = Require(record, "domain", json::value_t::string, source, line,
                       "").get<std::string>();
  const json &sentences = Require(record, "sentences", json::value_t::array,
                                  source, line, "");
  for (size_t s = 0; s < sentences.size(); ++s) {
    std::string spath = "sentences[" + std::to_string(s) + "]";
    if (!sentences[s].is_array() || sentences[s].empty()) {
      throw IngestError(source, line, spath, "must be a non-empty array");
    }
    int offset = doc.size();
    int len = static_cast<int>(sentences[s].size());
    for (int t = 0; t < len; ++t) {
      const json &tok = sentences[s][t];
      std::string tpath = spath + "[" + std::to_string(t) + "]";
      if (!tok.is_object()) throw IngestError(source, line, tpath, "not an object");
      Token token;
      token.surface = Require(tok, "surface", json::value_t::string, source,
                              line, tpath).get<std::string>();
      token.lemma = Require(tok, "lemma", json::value_t::string, source, line,
                            tpath).get<std::string>();
      auto pos = ParsePos(Require(tok, "pos", json::value_t::string, source,
                                  line, tpath).get<std::string>());
      if (!pos) throw IngestError(source, line, tpath + ".pos", "unknown POS tag");
      token.pos = *pos;
      auto ner = ParseNer(Require(tok, "ner", json::value_t::string, source,
                                  line, tpath).get<std::string>());
      if (!ner) throw IngestError(source, line, tpath + ".ner", "unknown NER tag");
      token.ner = *ner;
      int head = Require(tok, "dep_head", json::value_t::number_integer,
                         source, line, tpath).get<int>();
      if (head != kRoot && (head < 0 || head >= len || head == t)) {
        throw StructuralError(source + ":" + std::to_string(line) + ": " +
                              tpath + ".dep_head " + std::to_string(head) +
                              " does not point inside its sentence");
      }
      token.dep_head = head == kRoot ? kRoot : offset + head;
      token.dep_label = Require(tok, "dep_label", json::value_t::string,
                                source, line, tpath).get<std::string>();
      doc.tokens.push_back(std::move(token));
    }
    doc.sentences.push_back({offset, doc.size()});
  }
  ValidateDocument(doc);
  return doc;
}

json DocumentToJson(const ParsedDocument &doc) {
  json sentences = json::array();
  for (const TokenRange &s : doc.sentences) {
    json toks = json::array();
    for (int i = s.begin; i < s.end; ++i) {
      const Token &t = doc.tokens[i];
      toks.push_back(json{
          {"surface", t.surface},
          {"lemma", t.lemma},
          {"pos", PosName(t.pos)},
          {"ner", NerName(t.ner)},
          {"dep_head", t.dep_head == kRoot ? kRoot : t.dep_head - s.begin},
          {"dep_label", t.dep_label},
      });
    }
    sentences.push_back(std::move(toks));
  }
  return json{{"doc_id", doc.doc_id},
              {"domain", doc.domain},
              {"sentences", std::move(sentences)}};
}

std::vector<ParsedDocument> IngestParsedCorpus(const std::string &path,
                                               const std::string &domain) {
  std::vector<ParsedDocument> docs;
  std::set<std::string> seen;
  ForEachJsonLine(path, [&](const json &record, int line) {
    ParsedDocument doc = DocumentFromJson(record, path, line);
    if (!domain.empty() && doc.domain != domain) return;
    if (!seen.insert(doc.doc_id).second) {
      throw IngestError(path, line, "doc_id", "duplicate doc_id " + doc.doc_id);
    }
    docs.push_back(std::move(doc));
  });
  return docs;
}

void WriteParsedCorpus(const std::string &path,
                       const std::vector<ParsedDocument> &docs) {
  std::string out;
  for (const auto &doc : docs) {
    out += DocumentToJson(doc).dump();
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<CorefAnnotation> LoadAnnotations(const std::string &path,
                                             const DocumentSet &docs) {
  std::vector<CorefAnnotation> out;
  ForEachJsonLine(path, [&](const json &record, int line) {
    CorefAnnotation ann;
    ann.doc_id = Require(record, "doc_id", json::value_t::string, path, line,
                         "").get<std::string>();
    auto doc = docs.Find(ann.doc_id);
    if (!doc) {
      throw IngestError(path, line, "doc_id", "unknown doc_id " + ann.doc_id);
    }
    const json &clusters = Require(record, "clusters", json::value_t::array,
                                   path, line, "");
    std::set<std::pair<int, int>> used;
    for (size_t c = 0; c < clusters.size(); ++c) {
      std::string cpath = "clusters[" + std::to_string(c) + "]";
      if (!clusters[c].is_array()) {
        throw IngestError(path, line, cpath, "must be an array");
      }
      std::vector<Span> cluster;
      for (size_t k = 0; k < clusters[c].size(); ++k) {
        std::string kpath = cpath + "[" + std::to_string(k) + "]";
        if (!clusters[c][k].is_object()) {
          throw IngestError(path, line, kpath, "not an object");
        }
        Span span = SpanFromJson(clusters[c][k], *doc, SpanKind::kMention,
                                 path, line, kpath);
        if (!used.insert({span.start, span.end}).second) {
          throw StructuralError(path + ":" + std::to_string(line) + ": " +
                                kpath + " appears in more than one cluster");
        }
        cluster.push_back(span);
      }
      ann.clusters.push_back(std::move(cluster));
    }
    out.push_back(std::move(ann));
  });
  return out;
}

void WriteAnnotations(const std::string &path,
                      const std::vector<CorefAnnotation> &annotations) {
  std::string out;
  for (const auto &ann : annotations) {
    json clusters = json::array();
    for (const auto &cluster : ann.clusters) {
      json spans = json::array();
      for (const Span &s : cluster) {
        json j = SpanToJson(s);
        j["kind"] = SpanKindName(s.kind);
        spans.push_back(std::move(j));
      }
      clusters.push_back(std::move(spans));
    }
    out += json{{"doc_id", ann.doc_id}, {"clusters", clusters}}.dump();
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<LabeledTriple> BuildTriples(
    const std::vector<CorefAnnotation> &annotations, const DocumentSet &docs,
    const TripleOptions &options) {
  std::vector<LabeledTriple> out;
  for (const CorefAnnotation &ann : annotations) {
    auto doc = docs.Find(ann.doc_id);
    if (!doc) throw Error("annotation references unknown doc_id " + ann.doc_id);

    std::vector<LabeledTriple> positives, negatives;
    auto emit = [&](const Span &a, const Span &b, int label) {
      if (a.Overlaps(b)) return;
      auto [mention, anaphor] = Orient(a, b);
      auto &dst = label ? positives : negatives;
      dst.push_back({doc, mention, anaphor, label});
    };

    std::vector<std::vector<Span>> clusters = ann.clusters;
    for (auto &cluster : clusters) {
      std::sort(cluster.begin(), cluster.end(), [](const Span &a, const Span &b) {
        return std::pair{a.start, a.end} < std::pair{b.start, b.end};
      });
    }
    for (const auto &cluster : clusters) {
      for (size_t i = 0; i < cluster.size(); ++i)
        for (size_t j = i + 1; j < cluster.size(); ++j)
          emit(cluster[i], cluster[j], 1);
    }
    for (size_t ci = 0; ci < clusters.size(); ++ci)
      for (size_t cj = ci + 1; cj < clusters.size(); ++cj)
        for (const Span &a : clusters[ci])
          for (const Span &b : clusters[cj]) emit(a, b, 0);

    if (options.negative_ratio > 0 && !positives.empty()) {
      size_t keep = static_cast<size_t>(std::llround(
          options.negative_ratio * static_cast<double>(positives.size())));
      if (keep < negatives.size()) {
        std::vector<size_t> idx(negatives.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 rng(options.seed ^ Fnv1a(ann.doc_id));
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        std::vector<LabeledTriple> kept;
        for (size_t i : idx) kept.push_back(std::move(negatives[i]));
        negatives = std::move(kept);
      }
    }
    for (auto &t : positives) out.push_back(std::move(t));
    for (auto &t : negatives) out.push_back(std::move(t));
  }
  return out;
}

DatasetSplit SplitDataset(const std::vector<LabeledTriple> &triples,
                          const std::array<double, 3> &ratios, uint64_t seed) {
  double total = 0;
  for (double r : ratios) {
    if (r < 0) throw ConfigError("split ratios must be non-negative");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }

  std::vector<std::string> reviews;
  std::set<std::string> seen;
  for (const auto &t : triples) {
    if (seen.insert(t.mention.doc_id).second) reviews.push_back(t.mention.doc_id);
  }
  int needed = static_cast<int>(std::count_if(
      ratios.begin(), ratios.end(), [](double r) { return r > 0; }));
  int n = static_cast<int>(reviews.size());
  if (n < needed) {
    throw ConfigError("cannot split " + std::to_string(n) + " reviews into " +
                      std::to_string(needed) + " parts");
  }

  std::mt19937_64 rng(seed);
  std::shuffle(reviews.begin(), reviews.end(), rng);

  std::array<int, 3> counts{};
  counts[0] = static_cast<int>(std::llround(ratios[0] * n));
  counts[1] = static_cast<int>(std::llround(ratios[1] * n));
  counts[1] = std::min(counts[1], n - counts[0]);
  counts[2] = n - counts[0] - counts[1];
  // Every part with a positive ratio receives at least one review, taken
  // from the currently largest part.
  for (int p = 0; p < 3; ++p) {
    if (ratios[p] > 0 && counts[p] == 0) {
      int donor = static_cast<int>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      --counts[donor];
      ++counts[p];
    }
  }

  std::unordered_map<std::string, int> part;
  int idx = 0;
  for (int p = 0; p < 3; ++p)
    for (int k = 0; k < counts[p]; ++k) part[reviews[idx++]] = p;

  DatasetSplit split;
  for (const auto &t : triples) {
    switch (part[t.mention.doc_id]) {
      case 0: split.train.push_back(t); break;
      case 1: split.dev.push_back(t); break;
      default: split.test.push_back(t); break;
    }
  }
  return split;
}

void WriteTriples(const std::string &path,
                  const std::vector<LabeledTriple> &triples) {
  std::string out;
  for (const auto &t : triples) {
    out += json{{"doc_id", t.mention.doc_id},
                {"mention", SpanToJson(t.mention)},
                {"anaphor", SpanToJson(t.anaphor)},
                {"label", t.label}}
               .dump();
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<LabeledTriple> ReadTriples(const std::string &path,
                                       const DocumentSet &docs) {
  std::vector<LabeledTriple> out;
  ForEachJsonLine(path, [&](const json &record, int line) {
    std::string doc_id = Require(record, "doc_id", json::value_t::string,
                                 path, line, "").get<std::string>();
    auto doc = docs.Find(doc_id);
    if (!doc) throw IngestError(path, line, "doc_id", "unknown doc_id " + doc_id);
    LabeledTriple t;
    t.context = doc;
    t.mention = SpanFromJson(
        Require(record, "mention", json::value_t::object, path, line, ""),
        *doc, SpanKind::kMention, path, line, "mention");
    t.anaphor = SpanFromJson(
        Require(record, "anaphor", json::value_t::object, path, line, ""),
        *doc, SpanKind::kAnaphor, path, line, "anaphor");
    t.label = Require(record, "label", json::value_t::number_integer, path,
                      line, "").get<int>();
    if (t.label != 0 && t.label != 1) {
      throw IngestError(path, line, "label", "must be 0 or 1");
    }
    if (t.mention.Overlaps(t.anaphor)) {
      throw StructuralError(path + ":" + std::to_string(line) +
                            ": mention and anaphor overlap");
    }
    out.push_back(std::move(t));
  });
  return out;
}

}  // namespace revcoref
