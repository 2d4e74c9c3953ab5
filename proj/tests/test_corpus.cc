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

#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "revcoref/corpus.h"
#include "revcoref/error.h"
#include "revcoref/text_util.h"
#include "test_util.h"

namespace revcoref {
namespace {

using nlohmann::json;
using testing::MakeDocument;
using testing::ScratchDir;
using testing::W;

ParsedDocument PurchaseDocument() {
  return MakeDocument("d1", {{{"I", "PRON", 1, "nsubj"},
                              {"bought", "VERB", -1, "ROOT", "NONE", "buy"},
                              {"a", "DET", 4, "det"},
                              {"green", "ADJ", 4, "amod"},
                              {"Moonbeam", "PROPN", 1, "dobj", "PRODUCT"},
                              {"for", "ADP", 6, "case"},
                              {"myself", "PRON", 1, "obl"},
                              {".", "PUNCT", 1, "punct"}}});
}

// Two sentences, four noun phrases: "A1 ... B1 . A2 ... B2 ."
std::shared_ptr<const ParsedDocument> FourMentionDocument(const std::string &id) {
  return std::make_shared<const ParsedDocument>(
      MakeDocument(id, {{{"Ann", "PROPN", 1, "nsubj"},
                         {"met", "VERB", -1, "ROOT"},
                         {"Bob", "PROPN", 1, "dobj"},
                         {".", "PUNCT", 1, "punct"}},
                        {{"She", "PRON", 1, "nsubj"},
                         {"thanked", "VERB", -1, "ROOT"},
                         {"him", "PRON", 1, "dobj"},
                         {".", "PUNCT", 1, "punct"}}}));
}

Span S(const ParsedDocument &doc, int start, int end,
       SpanKind kind = SpanKind::kMention) {
  return MakeSpan(doc, start, end, kind);
}

TEST_CASE("a one-sentence purchase review ingests as 8 tokens in 1 sentence") {
  std::string dir = ScratchDir("corpus_ingest");
  std::string path = dir + "/corpus.jsonl";
  WriteParsedCorpus(path, {PurchaseDocument()});
  auto docs = IngestParsedCorpus(path, "");
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].size() == 8);
  CHECK(docs[0].sentences.size() == 1);
  CHECK(docs[0].tokens[4].ner == Ner::kProduct);
  CHECK(docs[0].tokens[4].dep_head == 1);
}

TEST_CASE("ingest keeps only the requested domain") {
  std::string dir = ScratchDir("corpus_domain");
  ParsedDocument a = PurchaseDocument();
  ParsedDocument b = PurchaseDocument();
  b.doc_id = "d2";
  b.domain = "camera";
  WriteParsedCorpus(dir + "/c.jsonl", {a, b});
  CHECK(IngestParsedCorpus(dir + "/c.jsonl", "camera").size() == 1);
  CHECK(IngestParsedCorpus(dir + "/c.jsonl", "").size() == 2);
}

TEST_CASE("a dependency head outside its sentence is a structural error") {
  std::string dir = ScratchDir("corpus_dangling");
  json record = DocumentToJson(PurchaseDocument());
  record["sentences"][0][2]["dep_head"] = 8;
  WriteFile(dir + "/bad.jsonl", record.dump() + "\n");
  CHECK_THROWS_AS(IngestParsedCorpus(dir + "/bad.jsonl", ""), StructuralError);
}

TEST_CASE("malformed records name the line and field") {
  std::string dir = ScratchDir("corpus_malformed");
  json good = DocumentToJson(PurchaseDocument());
  json bad = good;
  bad["doc_id"] = "d2";
  bad["sentences"][0][3]["pos"] = "ADJECTIVE";
  WriteFile(dir + "/bad.jsonl", good.dump() + "\n" + bad.dump() + "\n");
  try {
    IngestParsedCorpus(dir + "/bad.jsonl", "");
    FAIL("expected an ingest error");
  } catch (const IngestError &e) {
    CHECK(e.line() == 2);
    CHECK(e.field().find("pos") != std::string::npos);
  }

  json missing = good;
  missing.erase("domain");
  WriteFile(dir + "/missing.jsonl", missing.dump() + "\n");
  CHECK_THROWS_AS(IngestParsedCorpus(dir + "/missing.jsonl", ""), IngestError);

  WriteFile(dir + "/garbage.jsonl", "{not json\n");
  CHECK_THROWS_AS(IngestParsedCorpus(dir + "/garbage.jsonl", ""), IngestError);
}

TEST_CASE("serialize then ingest yields an equal document") {
  std::mt19937_64 rng(5);
  std::vector<ParsedDocument> docs;
  for (int i = 0; i < 50; ++i) {
    docs.push_back(testing::RandomDocument(rng, "r" + std::to_string(i),
                                           {"clock", "ring", "loud", "band"}, 4, 9));
  }
  std::string dir = ScratchDir("corpus_roundtrip");
  WriteParsedCorpus(dir + "/c.jsonl", docs);
  auto back = IngestParsedCorpus(dir + "/c.jsonl", "");
  REQUIRE(back.size() == docs.size());
  for (size_t i = 0; i < docs.size(); ++i) CHECK(back[i] == docs[i]);
}

TEST_CASE("span heads follow the first token whose head leaves the span") {
  ParsedDocument doc = PurchaseDocument();
  Span m = S(doc, 2, 5);
  CHECK(m.head == 4);
  CHECK(SpanText(doc, m) == "a green Moonbeam");
  CHECK_THROWS_AS(S(doc, 5, 5), StructuralError);
  CHECK_THROWS_AS(S(doc, 6, 9), StructuralError);

  auto two = FourMentionDocument("x");
  CHECK_THROWS_AS(S(*two, 3, 5), StructuralError);  // crosses sentences
}

TEST_CASE("two clusters give one positive and the cross-cluster negatives") {
  auto doc = FourMentionDocument("x");
  DocumentSet docs;
  docs.Add(*doc);
  // {Ann, She} and {Bob}.
  CorefAnnotation ann{"x", {{S(*doc, 0, 1), S(*doc, 4, 5)}, {S(*doc, 2, 3)}}};
  auto triples = BuildTriples({ann}, docs, TripleOptions{0, 1});
  int pos = 0, neg = 0;
  std::set<std::pair<int, int>> negatives;
  for (const auto &t : triples) {
    CHECK(t.mention.start < t.anaphor.start);
    if (t.label) {
      ++pos;
      CHECK(t.mention.start == 0);
      CHECK(t.anaphor.start == 4);
    } else {
      ++neg;
      negatives.insert({t.mention.start, t.anaphor.start});
    }
  }
  CHECK(pos == 1);
  CHECK(neg == 2);
  CHECK(negatives == std::set<std::pair<int, int>>{{0, 2}, {2, 4}});
}

TEST_CASE("a single-cluster document yields positives only") {
  auto doc = FourMentionDocument("x");
  DocumentSet docs;
  docs.Add(*doc);
  CorefAnnotation ann{"x", {{S(*doc, 0, 1), S(*doc, 4, 5), S(*doc, 2, 3)}}};
  auto triples = BuildTriples({ann}, docs);
  CHECK(triples.size() == 3);
  for (const auto &t : triples) CHECK(t.label == 1);
}

TEST_CASE("singleton clusters produce no positives") {
  auto doc = FourMentionDocument("x");
  DocumentSet docs;
  docs.Add(*doc);
  CorefAnnotation ann{"x", {{S(*doc, 0, 1)}, {S(*doc, 2, 3)}}};
  auto triples = BuildTriples({ann}, docs, TripleOptions{0, 1});
  REQUIRE(triples.size() == 1);
  CHECK(triples[0].label == 0);
}

TEST_CASE("an explicitly marked anaphor wins over position") {
  auto doc = FourMentionDocument("x");
  DocumentSet docs;
  docs.Add(*doc);
  CorefAnnotation ann{"x", {{S(*doc, 0, 1, SpanKind::kAnaphor), S(*doc, 4, 5)}}};
  auto triples = BuildTriples({ann}, docs);
  REQUIRE(triples.size() == 1);
  CHECK(triples[0].anaphor.start == 0);
  CHECK(triples[0].mention.start == 4);
}

TEST_CASE("unknown annotation doc ids are rejected") {
  DocumentSet docs;
  docs.Add(*FourMentionDocument("x"));
  CorefAnnotation ann{"missing", {}};
  CHECK_THROWS(BuildTriples({ann}, docs));
}

TEST_CASE("negative downsampling keeps round(ratio * positives) per review") {
  auto doc = FourMentionDocument("x");
  DocumentSet docs;
  docs.Add(*doc);
  // One pair and two singletons: 1 positive, 5 negatives.
  CorefAnnotation ann{"x",
                      {{S(*doc, 0, 1), S(*doc, 4, 5)}, {S(*doc, 2, 3)}, {S(*doc, 6, 7)}}};
  auto all = BuildTriples({ann}, docs, TripleOptions{0, 3});
  auto kept = BuildTriples({ann}, docs, TripleOptions{2.4, 3});
  int all_neg = 0, kept_neg = 0;
  for (const auto &t : all) all_neg += 1 - t.label;
  for (const auto &t : kept) kept_neg += 1 - t.label;
  CHECK(all_neg == 5);
  CHECK(kept_neg == 2);
  auto again = BuildTriples({ann}, docs, TripleOptions{2.4, 3});
  REQUIRE(again.size() == kept.size());
  for (size_t i = 0; i < kept.size(); ++i) CHECK(again[i].mention == kept[i].mention);
}

TEST_CASE("labels agree with cluster membership on random annotations") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto doc = FourMentionDocument("x");
    DocumentSet docs;
    docs.Add(*doc);
    std::vector<Span> spans = {S(*doc, 0, 1), S(*doc, 2, 3), S(*doc, 4, 5),
                               S(*doc, 6, 7)};
    std::vector<std::vector<Span>> clusters(3);
    std::map<int, int> cluster_of;
    for (const Span &s : spans) {
      int c = std::uniform_int_distribution<int>(0, 2)(rng);
      clusters[c].push_back(s);
      cluster_of[s.start] = c;
    }
    std::erase_if(clusters, [](const auto &c) { return c.empty(); });
    auto triples = BuildTriples({{"x", clusters}}, docs, TripleOptions{0, 1});
    for (const auto &t : triples) {
      bool same = cluster_of[t.mention.start] == cluster_of[t.anaphor.start];
      CHECK(t.label == (same ? 1 : 0));
      CHECK_FALSE(t.mention.Overlaps(t.anaphor));
    }
  }
}

std::vector<LabeledTriple> TriplesOverReviews(int reviews) {
  std::vector<LabeledTriple> out;
  for (int r = 0; r < reviews; ++r) {
    auto doc = FourMentionDocument("r" + std::to_string(r));
    for (int k = 0; k < 3; ++k) {
      out.push_back({doc, S(*doc, 0, 1), S(*doc, 4, 5), k == 0});
    }
  }
  return out;
}

std::set<std::string> Reviews(const std::vector<LabeledTriple> &triples) {
  std::set<std::string> ids;
  for (const auto &t : triples) ids.insert(t.context->doc_id);
  return ids;
}

TEST_CASE("ten reviews split 8/1/1 at the review level") {
  auto split = SplitDataset(TriplesOverReviews(10), {0.8, 0.1, 0.1}, 7);
  CHECK(Reviews(split.train).size() == 8);
  CHECK(Reviews(split.dev).size() == 1);
  CHECK(Reviews(split.test).size() == 1);
  CHECK(split.train.size() + split.dev.size() + split.test.size() == 30);
}

TEST_CASE("splits are disjoint, exhaustive and seed-determined") {
  for (int n : {3, 7, 20, 57}) {
    auto triples = TriplesOverReviews(n);
    auto a = SplitDataset(triples, {0.8, 0.1, 0.1}, 11);
    auto b = SplitDataset(triples, {0.8, 0.1, 0.1}, 11);
    auto tr = Reviews(a.train), dv = Reviews(a.dev), te = Reviews(a.test);
    CHECK(tr.size() + dv.size() + te.size() == static_cast<size_t>(n));
    for (const auto &id : dv) CHECK(tr.count(id) == 0);
    for (const auto &id : te) CHECK((tr.count(id) + dv.count(id)) == 0);
    CHECK(Reviews(b.train) == tr);
    CHECK(Reviews(b.test) == te);
  }
}

TEST_CASE("too few reviews or bad ratios are rejected") {
  CHECK_THROWS_AS(SplitDataset(TriplesOverReviews(2), {0.8, 0.1, 0.1}, 1), ConfigError);
  CHECK_THROWS_AS(SplitDataset(TriplesOverReviews(5), {0.8, 0.1, 0.2}, 1), ConfigError);
}

TEST_CASE("triples and annotations round-trip through JSONL") {
  auto doc = FourMentionDocument("x");
  DocumentSet docs;
  docs.Add(*doc);
  std::string dir = ScratchDir("corpus_triples");
  CorefAnnotation ann{"x", {{S(*doc, 0, 1), S(*doc, 4, 5, SpanKind::kAnaphor)},
                            {S(*doc, 2, 3)}}};
  WriteAnnotations(dir + "/a.jsonl", {ann});
  auto loaded = LoadAnnotations(dir + "/a.jsonl", docs);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].clusters == ann.clusters);

  auto triples = BuildTriples(loaded, docs, TripleOptions{0, 1});
  WriteTriples(dir + "/t.jsonl", triples);
  auto back = ReadTriples(dir + "/t.jsonl", docs);
  REQUIRE(back.size() == triples.size());
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].mention.start == triples[i].mention.start);
    CHECK(back[i].anaphor.end == triples[i].anaphor.end);
    CHECK(back[i].label == triples[i].label);
  }

  WriteFile(dir + "/bad.jsonl",
            R"({"doc_id":"x","mention":{"start":0,"end":1},"anaphor":{"start":4,"end":5},"label":2})"
            "\n");
  CHECK_THROWS_AS(ReadTriples(dir + "/bad.jsonl", docs), IngestError);
}

}  // namespace
}  // namespace revcoref
