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

#ifndef REVCOREF_TRAIN_H_
#define REVCOREF_TRAIN_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "revcoref/corpus.h"
#include "revcoref/model.h"

namespace revcoref {

enum class OptimizerKind { kSgdMomentum, kAdam };

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 3e-5;
  // The rate falls linearly from learning_rate to learning_rate * decay_floor
  // over the run.
  double decay_floor = 1e-4;
  int batch_size = 16;
  uint64_t seed = 13;
  double rho = kDefaultRho;
  OptimizerKind optimizer = OptimizerKind::kSgdMomentum;
  double momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Decoupled weight decay: every step shrinks parameters by lr * decay.
  double weight_decay = 0;

  void Validate() const;
};

nlohmann::json TrainConfigToJson(const TrainConfig &config);
TrainConfig TrainConfigFromJson(const nlohmann::json &j);

// Learning rate for optimizer step `step` (0-based) of `total_steps`:
//   lr * (1 - (1 - decay_floor) * step / max(1, total_steps - 1))
double LearningRateAt(const TrainConfig &config, long step, long total_steps);

// SHA-256 over the canonical JSON of the three configurations.
std::string ConfigFingerprint(const ModelConfig &model,
                              const EncoderConfig &encoder,
                              const TrainConfig &train);

inline constexpr int kEvalSchemaVersion = 1;

struct Confusion {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  long total() const { return tp + fp + fn + tn; }
};

struct EvalReport {
  std::string domain;
  double precision_pos = 0;
  double recall_pos = 0;
  double f1_pos = 0;
  Confusion confusion;
  std::string config_fingerprint;
  uint64_t seed = 0;
};

EvalReport ReportFromConfusion(const Confusion &confusion);
Confusion CountConfusion(const std::vector<int> &gold,
                         const std::vector<int> &predicted);
nlohmann::json EvalReportToJson(const EvalReport &report);
EvalReport EvalReportFromJson(const nlohmann::json &j);

// Triples plus the resources shared by every model trained on them.
struct ExperimentData {
  std::string domain;
  std::vector<LabeledTriple> train;
  std::vector<LabeledTriple> dev;
  std::vector<LabeledTriple> test;
  std::shared_ptr<const DomainKb> domain_kb;
  std::shared_ptr<const TripleStore> general_kb;
  std::shared_ptr<const AffectLexicon> affect;
  Vocabulary vocab;
  std::shared_ptr<const FrozenEmbeddings> frozen;

  KnowledgeResources resources() const {
    return {domain_kb.get(), general_kb.get(), affect.get()};
  }
  int affect_width() const { return affect ? affect->width() : 0; }
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double dev_f1 = 0;
  double learning_rate = 0;
};

struct TrainResult {
  CorefModel model;  // best-dev parameters
  int best_epoch = 0;
  double best_dev_f1 = 0;
  std::vector<EpochRecord> history;
};

std::vector<PreparedExample> PrepareAll(const CorefModel &model,
                                        const std::vector<LabeledTriple> &triples,
                                        const KnowledgeResources &resources);

// Mini-batch training of `model` on `train`, keeping the parameters of the
// epoch with the highest dev positive F1 (the first such epoch on ties, the
// last epoch when `dev` is empty). Throws DivergenceError on a non-finite
// loss.
TrainResult Train(CorefModel model, const std::vector<PreparedExample> &train,
                  const std::vector<PreparedExample> &dev,
                  const TrainConfig &config, std::ostream *log = nullptr);

// Builds a fresh model for `data` and trains it.
TrainResult TrainModel(const ExperimentData &data, const ModelConfig &model,
                       const EncoderConfig &encoder, const TrainConfig &train,
                       std::ostream *log = nullptr);

EvalReport Evaluate(const CorefModel &model,
                    const std::vector<PreparedExample> &examples,
                    const std::string &domain);
EvalReport Evaluate(const CorefModel &model,
                    const std::vector<LabeledTriple> &triples,
                    const KnowledgeResources &resources,
                    const std::string &domain);

// Ablation axes: -omcs, -domain_kb, -affect, -all_knowledge, -f_c, -f_k,
// -f_sk, -syntax_attention, +dot_attention. "full" leaves the base as is.
ModelConfig ApplyAblation(ModelConfig base, const std::string &axis);
std::vector<std::string> AblationAxes();
// Table row group of an axis: "knowledge source", "score", "attention".
std::string AblationGroup(const std::string &axis);

// A grid cell is one or more axes applied together.
struct AblationCell {
  std::string name;
  std::vector<std::string> axes;
};

// Reads {"cells": [...]} where each cell is an axis name or a list of them.
std::vector<AblationCell> ParseAblationGrid(const nlohmann::json &j);
std::vector<AblationCell> DefaultAblationGrid();

struct AblationRow {
  std::string group;
  std::string cell;
  EvalReport report;
  double delta = 0;  // full-model F1 minus this cell's F1
};

// Trains and tests the full model plus every cell, with the base seed and
// the same splits. Cells run on up to `jobs` threads.
std::vector<AblationRow> Ablate(const ExperimentData &data,
                                const ModelConfig &base,
                                const EncoderConfig &encoder,
                                const TrainConfig &train,
                                const std::vector<AblationCell> &cells,
                                int jobs = 1, std::ostream *log = nullptr);

// comparison,model,f1_pos,delta,config_fingerprint
std::string AblationCsv(const std::vector<AblationRow> &rows);

}  // namespace revcoref

#endif  // REVCOREF_TRAIN_H_
