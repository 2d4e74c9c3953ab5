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

#ifndef REVCOREF_SYNTHETIC_H_
#define REVCOREF_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "revcoref/corpus.h"
#include "revcoref/general_kb.h"
#include "revcoref/tokenizer.h"

namespace revcoref {

// Generator for reviews whose coreference labels can only be decided with
// domain knowledge. Every labeled review names several products by invented
// aliases ("a green Moonbeam") and then refers back to one of them by its
// category ("The clock ..."). Aliases are unique per review, so the link
// between an alias and its category exists only in the unlabeled corpus,
// where each alias co-occurs with the words of its category.
struct SyntheticConfig {
  int reviews = 100;
  int distractors = 1;  // aliases per review that the anaphor does not name
  uint64_t seed = 7;
  std::string domain = "alarm";
};

struct SyntheticDataset {
  std::vector<std::shared_ptr<const ParsedDocument>> contexts;
  std::vector<CorefAnnotation> annotations;
  // Exactly one positive and `distractors` negatives per review, all with
  // the category reference as anaphor.
  std::vector<LabeledTriple> triples;
  std::vector<ParsedDocument> unlabeled;
  std::vector<Triple> general;
  AffectLexicon affect{3};
  std::map<std::string, std::string> alias_category;  // lowercase alias
};

SyntheticDataset GenerateSynthetic(const SyntheticConfig &config);

// Writes the dataset in the pipeline input formats under `dir`:
// corpus.jsonl, annotations.jsonl, unlabeled.jsonl, omcs.tsv, affect.csv and
// vocab.txt (the base vocabulary).
void WriteSynthetic(const SyntheticDataset &data, const std::string &dir);

// Product categories and the words planted next to their aliases.
struct SyntheticCategory {
  std::string noun;      // also the anaphor head
  std::string cue_noun;
  std::string cue_verb;
  std::string cue_adj;
};
const std::vector<SyntheticCategory> &SyntheticCategories();

// "I bought a green Moonbeam and a red Zorblat for myself . The clock also
// has a gold band ." with its parse. Moonbeam is a clock, Zorblat a radio;
// both are always present in the generated unlabeled corpus.
std::shared_ptr<const ParsedDocument> RunningExampleDocument();
// (a green Moonbeam, The clock) with label 1.
LabeledTriple RunningExampleTriple();

// The bundled base vocabulary: [UNK], single letters (bare and "##"), the
// alias syllables (bare and "##") and the template words. Aliases are never
// whole entries, so they are always segmented, e.g. Moonbeam -> moon ##beam.
Vocabulary SyntheticBaseVocabulary();

}  // namespace revcoref

#endif  // REVCOREF_SYNTHETIC_H_
