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

#ifndef REVCOREF_MODEL_H_
#define REVCOREF_MODEL_H_

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "revcoref/autodiff.h"
#include "revcoref/corpus.h"
#include "revcoref/domain_kb.h"
#include "revcoref/encoder.h"
#include "revcoref/general_kb.h"
#include "revcoref/span_repr.h"
#include "revcoref/tokenizer.h"

namespace revcoref {

inline constexpr double kProbabilityEpsilon = 1e-7;
inline constexpr double kDecisionThreshold = 0.5;
inline constexpr int kCheckpointSchemaVersion = 1;

struct ModelConfig {
  bool use_domain_kb = true;
  bool use_general_kb = true;
  bool use_affect = true;
  bool enable_f_c = true;
  bool enable_f_k = true;
  bool enable_f_sk = true;
  AttentionVariant attention = AttentionVariant::kSyntax;
  double dropout = 0.1;
  int ffn_hidden = 32;
  // Use the knowledge-score feature list exactly as printed, with the
  // anaphor product repeated instead of the mention product.
  bool literal_knowledge_features = false;
  int knowledge_cap = kDefaultKnowledgeCap;  // per source
  int total_knowledge_cap = 64;              // after merging sources

  void Validate() const;
};

nlohmann::json ModelConfigToJson(const ModelConfig &config);
ModelConfig ModelConfigFromJson(const nlohmann::json &j);

// The three relevance scores and the fused probability.
struct ScoreBundle {
  double f_c = 0;
  double f_k = 0;
  double f_sk = 0;
  double f_hat = 0.5;

  int label() const { return f_hat >= kDecisionThreshold ? 1 : 0; }
};

double Sigmoid(double x);

// Knowledge sources consulted at prediction time. Null members are absent.
struct KnowledgeResources {
  const DomainKb *domain = nullptr;
  const TripleStore *general = nullptr;
  const AffectLexicon *affect = nullptr;
};

// Everything about a triple that does not depend on model parameters.
struct PreparedExample {
  EncodedDoc context;
  SpanInput mention;
  SpanInput anaphor;
  std::vector<SpanInput> mention_syntax;
  std::vector<SpanInput> anaphor_syntax;
  std::vector<EncodedDoc> knowledge_docs;
  std::vector<SpanInput> knowledge_spans;
  std::vector<std::string> knowledge_texts;
  int window_begin = 0;  // context pieces seen by the context score
  int window_count = 0;
  int label = 0;
};

struct ForwardResult {
  Var f_c;  // invalid when the head is disabled
  Var f_k;
  Var f_sk;
  Var logit;
  Var knowledge_attention;  // 1 x |K_m| when the knowledge head ran
};

// Context score: cross attention of the context with each span vector,
// pooled and scored by ffn4. `context` is d x N, spans are d x 1.
Var ContextScore(Tape &tape, ParameterSet &params, Var context, Var mention,
                 Var anaphor, const DropoutContext &dropout);

// Knowledge score: mention-to-knowledge attention (ffn5) and ffn6 over
// [v_m, v_p, v_hat, v_m * v_hat, v_p * v_hat]. `knowledge` is d x N3.
Var KnowledgeScore(Tape &tape, ParameterSet &params, Var mention, Var anaphor,
                   Var knowledge, bool literal_features,
                   const DropoutContext &dropout, Var *attention = nullptr);

// Syntax-knowledge score: scaled dot attention of each syntax phrase over the
// knowledge, the resulting rows summed per side and multiplied elementwise,
// then ffn7 and ffn8. All inputs are d x N column stacks.
Var SyntaxKnowledgeScore(Tape &tape, ParameterSet &params, Var knowledge,
                         Var mention_syntax, Var anaphor_syntax,
                         const DropoutContext &dropout);

// Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps].
double CrossEntropyLoss(std::span<const double> probabilities,
                        std::span<const int> labels,
                        double eps = kProbabilityEpsilon);

class CorefModel {
 public:
  CorefModel(const ModelConfig &model_config,
             const EncoderConfig &encoder_config, Vocabulary vocab,
             int affect_width, uint64_t seed,
             std::shared_ptr<const FrozenEmbeddings> frozen = nullptr);

  const ModelConfig &config() const { return config_; }
  const EncoderConfig &encoder_config() const { return encoder_config_; }
  const Vocabulary &vocab() const { return vocab_; }
  int affect_width() const { return affect_width_; }
  ParameterSet &params() { return params_; }
  const ParameterSet &params() const { return params_; }
  nlohmann::json &meta() { return meta_; }
  const nlohmann::json &meta() const { return meta_; }

  PreparedExample Prepare(const LabeledTriple &triple,
                          const KnowledgeResources &resources) const;

  // Records the forward pass on `tape`. Reads parameters only; gradients are
  // written by Tape::Backward.
  ForwardResult Forward(Tape &tape, const PreparedExample &example,
                        const DropoutContext &dropout = {}) const;

  ScoreBundle Predict(const PreparedExample &example) const;
  ScoreBundle Predict(const LabeledTriple &triple,
                      const KnowledgeResources &resources) const;

  // Knowledge phrases with their attention weights, in K_m order.
  std::vector<std::pair<std::string, double>> KnowledgeWeights(
      const PreparedExample &example) const;

  nlohmann::json ToJson() const;
  static CorefModel FromJson(const nlohmann::json &j);
  void Save(const std::string &path) const;
  static CorefModel Load(const std::string &path);

 private:
  TokenEncoder MakeEncoder() const;

  ModelConfig config_;
  EncoderConfig encoder_config_;
  Vocabulary vocab_;
  int affect_width_;
  std::shared_ptr<const FrozenEmbeddings> frozen_;
  mutable ParameterSet params_;
  nlohmann::json meta_ = nlohmann::json::object();
};

}  // namespace revcoref

#endif  // REVCOREF_MODEL_H_
