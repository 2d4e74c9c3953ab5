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

#include "revcoref/domain_kb.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {
namespace {

using nlohmann::json;

bool EntryOrder(const KbEntry &a, const KbEntry &b) {
  if (a.score != b.score) return a.score > b.score;
  return a.phrase < b.phrase;
}

int ClassIndex(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return 0;
    case Pos::kAdj: return 1;
    default: return 2;
  }
}

constexpr Pos kClassByIndex[] = {Pos::kNoun, Pos::kAdj, Pos::kVerb};

}  // namespace

const std::vector<KbEntry> *DomainKb::Find(const std::string &word) const {
  auto it = entries.find(word);
  return it == entries.end() ? nullptr : &it->second;
}

bool IsMentionWordToken(const Token &token) {
  return IsNominal(token.pos) || token.ner != Ner::kNone;
}

std::optional<Pos> PhraseClass(const Token &token) {
  if (IsNominal(token.pos)) return Pos::kNoun;
  if (token.pos == Pos::kAdj) return Pos::kAdj;
  if (token.pos == Pos::kVerb) return Pos::kVerb;
  return std::nullopt;
}

std::vector<std::string> ExtractMentionWords(const Span &mention,
                                             const ParsedDocument &doc) {
  std::vector<std::string> words;
  for (int i = mention.start; i < mention.end; ++i) {
    const Token &t = doc.tokens[i];
    if (!IsMentionWordToken(t)) continue;
    std::string w = ToLower(t.lemma);
    if (w.empty()) continue;
    if (std::find(words.begin(), words.end(), w) == words.end()) {
      words.push_back(std::move(w));
    }
  }
  return words;
}

DomainKb MineDomainKb(const std::vector<ParsedDocument> &unlabeled, double rho,
                      const std::string &domain) {
  if (unlabeled.empty()) throw ConfigError("cannot mine an empty corpus");
  if (!(rho >= 0)) throw ConfigError("rho must be non-negative");

  // Review frequency of every lemma.
  std::unordered_map<std::string, int> review_freq;
  // Co-occurrence sentence counts: word -> phrase -> C.
  std::unordered_map<std::string, std::unordered_map<std::string, int>> cooc;
  // Corpus-wide class votes per phrase.
  std::unordered_map<std::string, std::array<int, 3>> class_votes;

  for (const ParsedDocument &doc : unlabeled) {
    std::set<std::string> in_review;
    for (const Token &t : doc.tokens) in_review.insert(ToLower(t.lemma));
    for (const auto &lemma : in_review) ++review_freq[lemma];

    for (const TokenRange &sent : doc.sentences) {
      std::set<std::string> words;
      std::set<std::string> phrases;
      for (int i = sent.begin; i < sent.end; ++i) {
        const Token &t = doc.tokens[i];
        std::string lemma = ToLower(t.lemma);
        if (lemma.empty()) continue;
        if (IsMentionWordToken(t)) words.insert(lemma);
        auto cls = PhraseClass(t);
        if (cls && !IsStopword(lemma)) {
          phrases.insert(lemma);
          ++class_votes[lemma][ClassIndex(*cls)];
        }
      }
      for (const auto &w : words) {
        auto &row = cooc[w];
        for (const auto &k : phrases) {
          if (k != w) ++row[k];
        }
      }
    }
  }

  DomainKb kb;
  kb.domain = domain.empty() ? unlabeled.front().domain : domain;
  kb.rho = rho;
  kb.corpus_size = static_cast<int>(unlabeled.size());
  const double n = static_cast<double>(unlabeled.size());

  for (const auto &[word, row] : cooc) {
    int max_count = 0;
    for (const auto &[k, c] : row) max_count = std::max(max_count, c);
    std::vector<KbEntry> kept;
    for (const auto &[k, c] : row) {
      double tf = static_cast<double>(c) / max_count;
      double idf = std::log(n / review_freq.at(k));
      double score = tf * idf;
      if (score < rho) continue;
      const auto &votes = class_votes.at(k);
      int best = static_cast<int>(
          std::max_element(votes.begin(), votes.end()) - votes.begin());
      kept.push_back({k, kClassByIndex[best], c, score});
    }
    if (kept.empty()) continue;
    std::sort(kept.begin(), kept.end(), EntryOrder);
    kb.entries.emplace(word, std::move(kept));
  }
  return kb;
}

std::vector<KnowledgePhrase> LookupDomainKnowledge(const DomainKb &kb,
                                                   const Span &mention,
                                                   const ParsedDocument &doc,
                                                   int cap) {
  if (cap < 1) throw ConfigError("knowledge cap must be at least 1");
  std::map<std::string, double> best;
  for (const std::string &w : ExtractMentionWords(mention, doc)) {
    const auto *list = kb.Find(w);
    if (!list) continue;
    for (const KbEntry &e : *list) {
      auto [it, inserted] = best.emplace(e.phrase, e.score);
      if (!inserted) it->second = std::max(it->second, e.score);
    }
  }
  std::vector<std::pair<std::string, double>> ranked(best.begin(), best.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(ranked.size()) > cap) ranked.resize(cap);

  std::vector<KnowledgePhrase> out;
  out.reserve(ranked.size());
  for (const auto &[phrase, score] : ranked) {
    out.push_back(MaterializePhrase(phrase, score, KnowledgeSource::kDomain));
  }
  return out;
}

std::string DomainKbToJson(const DomainKb &kb) {
  json entries = json::object();
  for (const auto &[word, list] : kb.entries) {
    json arr = json::array();
    for (const KbEntry &e : list) {
      arr.push_back(json{{"phrase", e.phrase},
                         {"pos", PosName(e.pos)},
                         {"count", e.count},
                         {"score", e.score}});
    }
    entries[word] = std::move(arr);
  }
  json root{{"format", "revcoref-domain-kb"},
            {"schema_version", 1},
            {"domain", kb.domain},
            {"rho", kb.rho},
            {"corpus_size", kb.corpus_size},
            {"entries", std::move(entries)}};
  if (!kb.meta.empty()) root["meta"] = kb.meta;
  return root.dump(1) + "\n";
}

DomainKb DomainKbFromJson(const std::string &text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(std::string("malformed KB file: ") + e.what());
  }
  DomainKb kb;
  try {
    kb.domain = root.at("domain").get<std::string>();
    kb.rho = root.at("rho").get<double>();
    kb.corpus_size = root.at("corpus_size").get<int>();
    kb.meta = root.value("meta", json::object());
    for (const auto &[word, arr] : root.at("entries").items()) {
      std::vector<KbEntry> list;
      for (const auto &e : arr) {
        KbEntry entry;
        entry.phrase = e.at("phrase").get<std::string>();
        auto pos = ParsePos(e.at("pos").get<std::string>());
        if (!pos) throw Error("unknown POS in KB entry " + entry.phrase);
        entry.pos = *pos;
        entry.count = e.at("count").get<int>();
        entry.score = e.at("score").get<double>();
        if (entry.count < 1 || entry.score < kb.rho) {
          throw Error("KB entry " + word + "/" + entry.phrase +
                      " violates count/score invariants");
        }
        list.push_back(std::move(entry));
      }
      if (!std::is_sorted(list.begin(), list.end(), EntryOrder)) {
        throw Error("KB entries for " + word + " are not sorted");
      }
      kb.entries.emplace(word, std::move(list));
    }
  } catch (const json::exception &e) {
    throw Error(std::string("malformed KB file: ") + e.what());
  }
  return kb;
}

void SaveDomainKb(const std::string &path, const DomainKb &kb) {
  WriteFile(path, DomainKbToJson(kb));
}

DomainKb LoadDomainKb(const std::string &path) {
  return DomainKbFromJson(ReadFile(path));
}

}  // namespace revcoref
