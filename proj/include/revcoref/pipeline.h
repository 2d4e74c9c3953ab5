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

#ifndef REVCOREF_PIPELINE_H_
#define REVCOREF_PIPELINE_H_

#include <array>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "revcoref/domain_kb.h"
#include "revcoref/general_kb.h"
#include "revcoref/model.h"
#include "revcoref/train.h"

namespace revcoref {

inline constexpr int kRunConfigSchemaVersion = 1;

// Input and output locations. Relative paths in a config file are resolved
// against the file's directory. Empty optional paths disable the resource.
struct RunPaths {
  std::string corpus;          // labeled parsed reviews (JSONL)
  std::string annotations;     // coreference clusters (JSONL)
  std::string unlabeled;       // unlabeled parsed reviews (JSONL)
  std::string triple_store;    // optional, TSV
  std::string affect_lexicon;  // optional, CSV
  std::string vocab;           // optional base vocabulary
  std::string output_dir;
};

struct RunConfig {
  std::string domain;
  uint64_t seed = 13;  // drives negative sampling, splits, init and training
  RunPaths paths;
  double negative_ratio = 2.4;
  std::array<double, 3> split = {0.8, 0.1, 0.1};
  int vocab_min_count = 2;
  ModelConfig model;
  EncoderConfig encoder;
  TrainConfig train;

  // Checks values and, if `check_paths`, that every referenced input exists.
  void Validate(bool check_paths = true) const;
  // The training configuration with the run seed applied.
  TrainConfig EffectiveTrain() const;
  std::string Fingerprint() const;
};

RunConfig RunConfigFromJson(const nlohmann::json &j,
                            const std::string &base_dir = "");
nlohmann::json RunConfigToJson(const RunConfig &config);
RunConfig LoadRunConfig(const std::string &path);

// Mines the domain KB and stamps it with the run's seed and fingerprint.
DomainKb MineStage(const std::vector<ParsedDocument> &unlabeled,
                   const RunConfig &config);

// Base vocabulary (bundled file or just [UNK]) extended with frequent corpus
// words and every knowledge phrase word.
Vocabulary BuildRunVocabulary(const RunConfig &config,
                              const DocumentSet &docs, const DomainKb &kb,
                              const TripleStore *general);

// Loads the optional general KB and affect lexicon named in `config`.
std::shared_ptr<const TripleStore> LoadGeneralKb(const RunConfig &config);
std::shared_ptr<const AffectLexicon> LoadAffect(const RunConfig &config);

// Runs the data stages in memory (ingest, triples, split, mine-kb,
// vocabulary) and loads the optional resources. Writes nothing.
ExperimentData LoadExperiment(const RunConfig &config);

// Runs ingest, triples, mine-kb, train and (if `evaluate`) eval, writing
// every artifact under paths.output_dir plus manifest.json with their SHA-256
// hashes. Returns the manifest. Stage failures throw StageError.
nlohmann::json RunPipeline(const RunConfig &config, std::ostream *log = nullptr,
                           bool evaluate = true);

// {"path": ..., "sha256": ...} for a file, relative to `root`.
nlohmann::json ArtifactEntry(const std::string &root, const std::string &path);

}  // namespace revcoref

#endif  // REVCOREF_PIPELINE_H_
