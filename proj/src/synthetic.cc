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

#include "revcoref/synthetic.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <random>
#include <set>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {
namespace {

struct Word {
  std::string text;
  Pos pos;
  int head;  // sentence-local, kRoot for the root
  std::string dep;
  std::string lemma = {};
  Ner ner = Ner::kNone;
};

class DocBuilder {
 public:
  DocBuilder(std::string doc_id, std::string domain) {
    doc_.doc_id = std::move(doc_id);
    doc_.domain = std::move(domain);
  }

  // Returns the document index of the sentence's first token.
  int AddSentence(const std::vector<Word> &words) {
    const int base = doc_.size();
    for (const Word &w : words) {
      Token t;
      t.surface = w.text;
      t.lemma = w.lemma.empty() ? ToLower(w.text) : w.lemma;
      t.pos = w.pos;
      t.ner = w.ner;
      t.dep_head = w.head == kRoot ? kRoot : base + w.head;
      t.dep_label = w.dep;
      doc_.tokens.push_back(std::move(t));
    }
    doc_.sentences.push_back({base, doc_.size()});
    return base;
  }

  ParsedDocument Build() {
    ValidateDocument(doc_);
    return std::move(doc_);
  }

 private:
  ParsedDocument doc_;
};

const std::vector<std::string> kColors = {"green", "red",    "blue",  "black",
                                          "white", "silver", "brown", "yellow"};
const std::vector<std::string> kSyllables = {
    "moon", "beam", "zor", "blat", "kri", "vex", "lo",  "tan", "quo", "rin",
    "sel",  "dar",  "mip", "fen",  "gal", "tro", "nix", "pel", "vor", "ula"};

std::string Capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(s[0]));
  return s;
}

struct Alias {
  std::string name;
  int category;
};

// S1 of a labeled review: "I bought a <c> <A1> [, a <c> <Ai>] and a <c> <Ak>
// for myself ." Returns the mention spans.
std::vector<Span> AddPurchaseSentence(DocBuilder &builder,
                                      const std::vector<Alias> &aliases,
                                      const std::vector<std::string> &colors,
                                      const std::string &doc_id) {
  std::vector<Word> words = {{"I", Pos::kPron, 1, "nsubj"},
                             {"bought", Pos::kVerb, kRoot, "ROOT", "buy"}};
  std::vector<int> alias_pos;
  int first_alias = -1;
  const int k = static_cast<int>(aliases.size());
  for (int j = 0; j < k; ++j) {
    int here = static_cast<int>(words.size());
    int alias_index = here + (j > 0 ? 3 : 2);
    if (j > 0) {
      bool last = j == k - 1;
      words.push_back({last ? "and" : ",", last ? Pos::kCconj : Pos::kPunct,
                       alias_index, last ? "cc" : "punct"});
    }
    words.push_back({"a", Pos::kDet, alias_index, "det"});
    words.push_back({colors[j], Pos::kAdj, alias_index, "amod"});
    if (j == 0) first_alias = alias_index;
    words.push_back({aliases[j].name, Pos::kPropn, j == 0 ? 1 : first_alias,
                     j == 0 ? "dobj" : "conj", {}, Ner::kProduct});
    alias_pos.push_back(alias_index);
  }
  int myself = static_cast<int>(words.size()) + 1;
  words.push_back({"for", Pos::kAdp, myself, "case"});
  words.push_back({"myself", Pos::kPron, 1, "obl"});
  words.push_back({".", Pos::kPunct, 1, "punct"});
  int base = builder.AddSentence(words);

  std::vector<Span> mentions;
  for (int p : alias_pos) {
    mentions.push_back(Span{doc_id, base + p - 2, base + p + 1, base + p,
                            SpanKind::kMention});
  }
  return mentions;
}

// S2 of a labeled review, referring back by category. Returns the anaphor.
Span AddReferenceSentence(DocBuilder &builder, const std::string &noun,
                          int variant, const std::string &material,
                          const std::string &doc_id) {
  std::vector<Word> words;
  switch (variant) {
    case 0:
      words = {{"The", Pos::kDet, 1, "det"},
               {noun, Pos::kNoun, 3, "nsubj"},
               {"also", Pos::kAdv, 3, "advmod"},
               {"has", Pos::kVerb, kRoot, "ROOT", "have"},
               {"a", Pos::kDet, 6, "det"},
               {material, Pos::kAdj, 6, "amod"},
               {"band", Pos::kNoun, 3, "dobj"},
               {".", Pos::kPunct, 3, "punct"}};
      break;
    case 1:
      words = {{"The", Pos::kDet, 1, "det"},
               {noun, Pos::kNoun, 2, "nsubj"},
               {"works", Pos::kVerb, kRoot, "ROOT", "work"},
               {"well", Pos::kAdv, 2, "advmod"},
               {".", Pos::kPunct, 2, "punct"}};
      break;
    default:
      words = {{"The", Pos::kDet, 1, "det"},
               {noun, Pos::kNoun, 2, "nsubj"},
               {"arrived", Pos::kVerb, kRoot, "ROOT", "arrive"},
               {"yesterday", Pos::kAdv, 2, "advmod"},
               {".", Pos::kPunct, 2, "punct"}};
      break;
  }
  int base = builder.AddSentence(words);
  return Span{doc_id, base, base + 2, base + 1, SpanKind::kAnaphor};
}

// Four sentences planting the category words next to the alias, plus the
// generic "like" and "great" that every unlabeled review shares.
ParsedDocument UnlabeledReview(const std::string &doc_id,
                               const std::string &domain, const Alias &alias) {
  const SyntheticCategory &c = SyntheticCategories()[alias.category];
  const std::string &a = alias.name;
  DocBuilder b(doc_id, domain);
  b.AddSentence({{"I", Pos::kPron, 1, "nsubj"},
                 {"like", Pos::kVerb, kRoot, "ROOT"},
                 {"the", Pos::kDet, 3, "det"},
                 {a, Pos::kPropn, 1, "dobj", {}, Ner::kProduct},
                 {".", Pos::kPunct, 1, "punct"}});
  b.AddSentence({{"The", Pos::kDet, 1, "det"},
                 {a, Pos::kPropn, 5, "nsubj", {}, Ner::kProduct},
                 {"is", Pos::kAux, 5, "cop", "be"},
                 {"a", Pos::kDet, 5, "det"},
                 {"great", Pos::kAdj, 5, "amod"},
                 {c.noun, Pos::kNoun, kRoot, "ROOT"},
                 {".", Pos::kPunct, 5, "punct"}});
  b.AddSentence({{"I", Pos::kPron, 1, "nsubj"},
                 {c.cue_verb, Pos::kVerb, kRoot, "ROOT"},
                 {"the", Pos::kDet, 3, "det"},
                 {a, Pos::kPropn, 1, "dobj", {}, Ner::kProduct},
                 {"near", Pos::kAdp, 6, "case"},
                 {"the", Pos::kDet, 6, "det"},
                 {c.cue_noun, Pos::kNoun, 1, "obl"},
                 {".", Pos::kPunct, 1, "punct"}});
  b.AddSentence({{"The", Pos::kDet, 1, "det"},
                 {a, Pos::kPropn, 4, "nsubj", {}, Ner::kProduct},
                 {"is", Pos::kAux, 4, "cop", "be"},
                 {"very", Pos::kAdv, 4, "advmod"},
                 {c.cue_adj, Pos::kAdj, kRoot, "ROOT"},
                 {".", Pos::kPunct, 4, "punct"}});
  return b.Build();
}

std::string FormatDouble(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const Alias kMoonbeam{"Moonbeam", 0};
const Alias kZorblat{"Zorblat", 1};

}  // namespace

const std::vector<SyntheticCategory> &SyntheticCategories() {
  static const std::vector<SyntheticCategory> categories = {
      {"clock", "alarm", "hang", "punctual"},
      {"radio", "station", "tune", "crackly"},
      {"lamp", "bulb", "dim", "cozy"},
      {"speaker", "bass", "stream", "booming"},
      {"fan", "blade", "oscillate", "breezy"},
  };
  return categories;
}

std::shared_ptr<const ParsedDocument> RunningExampleDocument() {
  DocBuilder b("running-example", "alarm");
  AddPurchaseSentence(b, {kMoonbeam, kZorblat}, {"green", "red"},
                      "running-example");
  AddReferenceSentence(b, "clock", 0, "gold", "running-example");
  return std::make_shared<const ParsedDocument>(b.Build());
}

Vocabulary SyntheticBaseVocabulary() {
  std::set<std::string> words = {"i", "bought", "a", "and", "for", "myself",
                                 ".", ",", "the", "also", "has", "band",
                                 "works", "well", "arrived", "yesterday",
                                 "gold", "like", "is", "great", "near", "very"};
  for (const auto &c : kColors) words.insert(c);
  for (const auto &c : SyntheticCategories()) {
    words.insert({c.noun, c.cue_noun, c.cue_verb, c.cue_adj});
  }
  Vocabulary vocab;
  for (char ch = 'a'; ch <= 'z'; ++ch) {
    vocab.Add(std::string(1, ch));
    vocab.Add("##" + std::string(1, ch));
  }
  for (const auto &s : kSyllables) {
    vocab.Add(s);
    vocab.Add("##" + s);
  }
  for (const auto &w : words) vocab.Add(w);
  return vocab;
}

LabeledTriple RunningExampleTriple() {
  auto doc = RunningExampleDocument();
  // Tokens: I bought a green Moonbeam and a red Zorblat for myself .
  //         The clock also has a gold band .
  Span mention{doc->doc_id, 2, 5, 4, SpanKind::kMention};
  Span anaphor{doc->doc_id, 12, 14, 13, SpanKind::kAnaphor};
  return LabeledTriple{doc, mention, anaphor, 1};
}

SyntheticDataset GenerateSynthetic(const SyntheticConfig &config) {
  const int num_categories = static_cast<int>(SyntheticCategories().size());
  if (config.reviews < 1) throw ConfigError("synthetic reviews must be >= 1");
  if (config.distractors < 1 || config.distractors >= num_categories) {
    throw ConfigError("synthetic distractors must be in [1, " +
                      std::to_string(num_categories - 1) + "]");
  }
  std::mt19937_64 rng(config.seed);
  auto pick = [&](int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
  };

  std::set<std::string> used = {"moonbeam", "zorblat"};
  for (const auto &c : SyntheticCategories()) {
    used.insert({c.noun, c.cue_noun, c.cue_verb, c.cue_adj});
  }
  auto fresh_alias = [&]() {
    for (;;) {
      int parts = 2 + pick(2);
      std::string name;
      for (int i = 0; i < parts; ++i) name += kSyllables[pick(kSyllables.size())];
      if (used.insert(name).second) return Capitalize(name);
    }
  };

  SyntheticDataset out;
  std::vector<Alias> all_aliases = {kMoonbeam, kZorblat};
  const int k = config.distractors + 1;
  for (int r = 0; r < config.reviews; ++r) {
    std::string doc_id = "syn" + std::to_string(r);
    std::vector<int> cats(num_categories);
    for (int i = 0; i < num_categories; ++i) cats[i] = i;
    std::shuffle(cats.begin(), cats.end(), rng);
    std::vector<Alias> aliases;
    std::vector<std::string> colors;
    for (int j = 0; j < k; ++j) {
      aliases.push_back({fresh_alias(), cats[j]});
      colors.push_back(kColors[pick(kColors.size())]);
    }
    const int target = pick(k);
    const std::string &noun = SyntheticCategories()[aliases[target].category].noun;

    DocBuilder b(doc_id, config.domain);
    std::vector<Span> mentions = AddPurchaseSentence(b, aliases, colors, doc_id);
    Span anaphor = AddReferenceSentence(b, noun, pick(3),
                                        pick(2) ? "gold" : "silver", doc_id);
    auto doc = std::make_shared<const ParsedDocument>(b.Build());

    CorefAnnotation ann{doc_id, {}};
    for (int j = 0; j < k; ++j) {
      if (j == target) {
        ann.clusters.push_back({mentions[j], anaphor});
      } else {
        ann.clusters.push_back({mentions[j]});
      }
      out.triples.push_back({doc, mentions[j], anaphor, j == target ? 1 : 0});
      out.alias_category[ToLower(aliases[j].name)] =
          SyntheticCategories()[aliases[j].category].noun;
      all_aliases.push_back(aliases[j]);
    }
    out.contexts.push_back(doc);
    out.annotations.push_back(std::move(ann));
  }
  out.alias_category["moonbeam"] = "clock";
  out.alias_category["zorblat"] = "radio";

  for (size_t i = 0; i < all_aliases.size(); ++i) {
    out.unlabeled.push_back(UnlabeledReview("unl" + std::to_string(i),
                                            config.domain, all_aliases[i]));
  }

  out.general = {
      {"clock", "UsedFor", "keeping time"},
      {"alarm", "UsedFor", "waking up"},
      {"radio", "UsedFor", "listening to music"},
      {"lamp", "UsedFor", "reading"},
      {"bulb", "PartOf", "lamp"},
      {"speaker", "UsedFor", "playing music"},
      {"fan", "UsedFor", "cooling a room"},
      {"band", "PartOf", "watch"},
  };
  out.affect.Add("great", Eigen::Vector3d(0.8, 0.3, 0.2));
  out.affect.Add("like", Eigen::Vector3d(0.6, 0.2, 0.1));
  out.affect.Add("punctual", Eigen::Vector3d(0.5, 0.1, 0.4));
  out.affect.Add("crackly", Eigen::Vector3d(-0.4, 0.5, 0.1));
  out.affect.Add("cozy", Eigen::Vector3d(0.7, -0.2, 0.3));
  out.affect.Add("booming", Eigen::Vector3d(0.2, 0.8, 0.0));
  out.affect.Add("breezy", Eigen::Vector3d(0.4, -0.1, 0.2));
  return out;
}

void WriteSynthetic(const SyntheticDataset &data, const std::string &dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  std::vector<ParsedDocument> contexts;
  for (const auto &doc : data.contexts) contexts.push_back(*doc);
  WriteParsedCorpus((root / "corpus.jsonl").string(), contexts);
  WriteAnnotations((root / "annotations.jsonl").string(), data.annotations);
  WriteParsedCorpus((root / "unlabeled.jsonl").string(), data.unlabeled);

  std::string tsv;
  for (const Triple &t : data.general) {
    tsv += t.e1 + "\t" + t.relation + "\t" + t.e2 + "\n";
  }
  WriteFile((root / "omcs.tsv").string(), tsv);

  std::string csv = "lemma";
  for (int i = 0; i < data.affect.width(); ++i) csv += ",v" + std::to_string(i + 1);
  csv += "\n";
  for (const auto &[lemma, values] : data.affect.entries()) {
    csv += lemma;
    for (double v : values) csv += "," + FormatDouble(v);
    csv += "\n";
  }
  WriteFile((root / "affect.csv").string(), csv);
  SaveVocabulary((root / "vocab.txt").string(), SyntheticBaseVocabulary());
}

}  // namespace revcoref
