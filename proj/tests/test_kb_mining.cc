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

#include <cmath>
#include <set>

#include "doctest.h"
#include "revcoref/domain_kb.h"
#include "revcoref/error.h"
#include "revcoref/text_util.h"
#include "test_util.h"

namespace revcoref {
namespace {

using testing::MakeDocument;
using testing::W;

const std::vector<std::string> kLemmas = {"clock", "alarm", "ring",  "loud",
                                          "band",  "time",  "the",   "snooze",
                                          "good",  "set",   "radio", "also"};

std::vector<ParsedDocument> RandomCorpus(std::mt19937_64 &rng, int docs) {
  std::vector<ParsedDocument> out;
  for (int i = 0; i < docs; ++i) {
    out.push_back(testing::RandomDocument(rng, "u" + std::to_string(i), kLemmas, 3, 8));
  }
  return out;
}

TEST_CASE("mention words are nominal or entity lemmas, deduplicated") {
  ParsedDocument doc = MakeDocument(
      "m", {{{"a", "DET", 2, "det"},
             {"westclox", "PROPN", 2, "compound"},
             {"clock", "NOUN", 3, "nsubj"},
             {"rings", "VERB", -1, "ROOT", "NONE", "ring"},
             {"it", "PRON", 3, "dobj"},
             {"a", "DET", 7, "det"},
             {"green", "ADJ", 7, "amod"},
             {"Moonbeam", "ADJ", 3, "obl", "PRODUCT"},
             {"Clock", "NOUN", 3, "obl"}}});
  CHECK(ExtractMentionWords(MakeSpan(doc, 0, 3, SpanKind::kMention), doc) ==
        std::vector<std::string>{"westclox", "clock"});
  CHECK(ExtractMentionWords(MakeSpan(doc, 4, 5, SpanKind::kAnaphor), doc).empty());
  // Moonbeam is tagged ADJ here, so only its entity tag qualifies it.
  CHECK(ExtractMentionWords(MakeSpan(doc, 5, 8, SpanKind::kMention), doc) ==
        std::vector<std::string>{"moonbeam"});
  CHECK(ExtractMentionWords(MakeSpan(doc, 1, 9, SpanKind::kMention), doc) ==
        std::vector<std::string>{"westclox", "clock", "moonbeam"});
}

TEST_CASE("a phrase present in every review scores zero") {
  ParsedDocument doc = MakeDocument("u", {{{"moonbeam", "NOUN", 1, "nsubj"},
                                           {"rings", "VERB", -1, "ROOT", "NONE", "ring"},
                                           {"loudly", "ADV", 1, "advmod"}}});
  DomainKb kept = MineDomainKb({doc}, 0.0);
  REQUIRE(kept.Find("moonbeam"));
  const KbEntry &e = kept.Find("moonbeam")->front();
  CHECK(e.phrase == "ring");
  CHECK(e.count == 1);
  CHECK(e.score == 0.0);
  CHECK(MineDomainKb({doc}, 1e-12).entries.empty());
}

TEST_CASE("five hand-counted reviews match the hand arithmetic") {
  auto review = [](const std::string &id, std::vector<std::vector<W>> s) {
    return MakeDocument(id, std::move(s));
  };
  std::vector<ParsedDocument> docs = {
      review("r1", {{{"clock", "NOUN", 1}, {"ring", "VERB", -1}},
                    {{"clock", "NOUN", 1}, {"ring", "VERB", -1}, {"loud", "ADJ", 1}}}),
      review("r2", {{{"clock", "NOUN", 1}, {"tick", "VERB", -1}}}),
      review("r3", {{{"radio", "NOUN", 1}, {"ring", "VERB", -1}}}),
      review("r4", {{{"lamp", "NOUN", -1}}}),
      review("r5", {{{"fan", "NOUN", -1}}}),
  };
  DomainKb kb = MineDomainKb(docs, 0.0);
  const auto *clock = kb.Find("clock");
  REQUIRE(clock);
  REQUIRE(clock->size() == 3);
  // C(ring)=2, C(loud)=1, C(tick)=1; max 2. df: ring 2, loud 1, tick 1.
  std::map<std::string, double> expected = {
      {"ring", 1.0 * std::log(5.0 / 2.0)},
      {"loud", 0.5 * std::log(5.0)},
      {"tick", 0.5 * std::log(5.0)},
  };
  for (const KbEntry &e : *clock) {
    CHECK(e.score == doctest::Approx(expected.at(e.phrase)).epsilon(1e-12));
  }
  // Sorted by score, ties by phrase.
  CHECK((*clock)[0].phrase == "ring");
  CHECK((*clock)[1].phrase == "loud");
  CHECK((*clock)[2].phrase == "tick");
  CHECK((*clock)[0].count == 2);
  CHECK(testing::CompareWithOracle(kb, testing::BruteForceKb(docs, 0.0), 1e-12) == "");
}

TEST_CASE("randomized corpora equal the brute-force oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rho_dist(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    auto docs = RandomCorpus(rng, 2 + trial % 12);
    double rho = trial % 5 == 0 ? 0.0 : rho_dist(rng);
    DomainKb kb = MineDomainKb(docs, rho);
    INFO("trial " << trial << " rho " << rho);
    CHECK(testing::CompareWithOracle(kb, testing::BruteForceKb(docs, rho), 1e-9) == "");
  }
}

TEST_CASE("entry invariants: score >= rho, counts >= 1, sorted, tf and idf bounds") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    auto docs = RandomCorpus(rng, 3 + trial % 8);
    const double n = static_cast<double>(docs.size());
    DomainKb all = MineDomainKb(docs, 0.0);
    for (const auto &[word, list] : all.entries) {
      int max_count = 0;
      for (const KbEntry &e : list) max_count = std::max(max_count, e.count);
      int at_max = 0;
      for (size_t i = 0; i < list.size(); ++i) {
        const KbEntry &e = list[i];
        CHECK(e.count >= 1);
        CHECK(e.score >= 0.0);
        CHECK(e.phrase != word);
        CHECK_FALSE(IsStopword(e.phrase));
        at_max += e.count == max_count;
        // score / tf recovers idf, which lies in [0, ln n].
        double tf = static_cast<double>(e.count) / max_count;
        CHECK(tf > 0.0);
        CHECK(tf <= 1.0);
        CHECK(e.score / tf <= std::log(n) + 1e-12);
        if (i > 0) {
          const KbEntry &prev = list[i - 1];
          CHECK((prev.score > e.score ||
                 (prev.score == e.score && prev.phrase < e.phrase)));
        }
      }
      CHECK(at_max >= 1);
    }
  }
}

TEST_CASE("raising rho only removes entries") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto docs = RandomCorpus(rng, 8);
    DomainKb low = MineDomainKb(docs, 0.3);
    DomainKb high = MineDomainKb(docs, 0.9);
    for (const auto &[word, list] : high.entries) {
      const auto *lower = low.Find(word);
      REQUIRE(lower);
      std::set<std::string> phrases;
      for (const KbEntry &e : *lower) phrases.insert(e.phrase);
      for (const KbEntry &e : list) {
        CHECK(phrases.count(e.phrase) == 1);
        CHECK(e.score >= 0.9);
      }
    }
  }
}

TEST_CASE("empty corpora and negative rho are rejected") {
  CHECK_THROWS_AS(MineDomainKb({}, 5.0), ConfigError);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(MineDomainKb(RandomCorpus(rng, 2), -1.0), ConfigError);
}

TEST_CASE("the KB file is canonical and round-trips") {
  std::mt19937_64 rng(3);
  auto docs = RandomCorpus(rng, 10);
  DomainKb kb = MineDomainKb(docs, 0.2, "alarm");
  kb.meta = {{"seed", 4}};
  std::string text = DomainKbToJson(kb);
  CHECK(DomainKbToJson(MineDomainKb(docs, 0.2, "alarm")) ==
        DomainKbToJson(MineDomainKb(docs, 0.2, "alarm")));
  DomainKb back = DomainKbFromJson(text);
  CHECK(back == kb);
  CHECK(DomainKbToJson(back) == text);
  CHECK(text.find("\"rho\": 0.2") != std::string::npos);

  CHECK_THROWS_AS(DomainKbFromJson("{"), Error);
  // An entry below rho.
  CHECK_THROWS_AS(DomainKbFromJson(R"({"domain":"a","rho":1.0,"corpus_size":1,
      "entries":{"w":[{"phrase":"x","pos":"NOUN","count":1,"score":0.5}]}})"),
                  Error);
}

TEST_CASE("lookup unions entry lists, keeps the maximum score and truncates") {
  DomainKb kb;
  kb.rho = 0;
  kb.entries["westclox"] = {{"clock", Pos::kNoun, 2, 3.0}, {"ring", Pos::kVerb, 1, 1.0}};
  kb.entries["alarm"] = {{"loud", Pos::kAdj, 1, 4.0}, {"clock", Pos::kNoun, 1, 2.0}};
  ParsedDocument doc = MakeDocument("d", {{{"westclox", "PROPN", 1, "compound"},
                                           {"alarm", "NOUN", -1, "ROOT"}}});
  Span m = MakeSpan(doc, 0, 2, SpanKind::kMention);
  auto k = LookupDomainKnowledge(kb, m, doc, 50);
  REQUIRE(k.size() == 3);
  CHECK(k[0].text == "loud");
  CHECK(k[1].text == "clock");
  CHECK(k[1].score == 3.0);
  CHECK(k[2].text == "ring");
  CHECK(k[0].span.kind == SpanKind::kKnowledgePhrase);
  CHECK(k[0].context->size() == 1);

  CHECK(LookupDomainKnowledge(kb, m, doc, 2).size() == 2);
  CHECK_THROWS_AS(LookupDomainKnowledge(kb, m, doc, 0), ConfigError);

  ParsedDocument pron = MakeDocument("p", {{{"it", "PRON", -1, "ROOT"}}});
  CHECK(LookupDomainKnowledge(kb, MakeSpan(pron, 0, 1, SpanKind::kMention), pron, 5)
            .empty());
}

TEST_CASE("the planted alias links to its category words") {
  SyntheticDataset data = GenerateSynthetic({});
  DomainKb kb = MineDomainKb(data.unlabeled, 1.0, "alarm");
  auto triple = RunningExampleTriple();
  auto k = LookupDomainKnowledge(kb, triple.mention, *triple.context, 50);
  std::set<std::string> texts;
  for (const auto &p : k) texts.insert(p.text);
  CHECK(texts.count("clock") == 1);
  CHECK(texts.count("alarm") == 1);
  CHECK(texts.count("hang") == 1);
  CHECK(texts.count("radio") == 0);
}

}  // namespace
}  // namespace revcoref
