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

#include "revcoref/model.h"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "revcoref/error.h"
#include "revcoref/knowledge.h"
#include "revcoref/syntax.h"
#include "revcoref/text_util.h"

namespace revcoref {

using nlohmann::json;

void ModelConfig::Validate() const {
  if (!enable_f_c && !enable_f_k && !enable_f_sk) {
    throw ConfigError("at least one score head must be enabled");
  }
  if (dropout < 0 || dropout >= 1) throw ConfigError("dropout must be in [0, 1)");
  if (ffn_hidden <= 0) throw ConfigError("ffn_hidden must be positive");
  if (knowledge_cap < 0 || total_knowledge_cap < 0) {
    throw ConfigError("knowledge caps must be non-negative");
  }
}

json ModelConfigToJson(const ModelConfig &c) {
  return json{
      {"use_domain_kb", c.use_domain_kb},
      {"use_general_kb", c.use_general_kb},
      {"use_affect", c.use_affect},
      {"enable_f_c", c.enable_f_c},
      {"enable_f_k", c.enable_f_k},
      {"enable_f_sk", c.enable_f_sk},
      {"attention_variant", std::string(AttentionVariantName(c.attention))},
      {"dropout", c.dropout},
      {"ffn_hidden", c.ffn_hidden},
      {"literal_knowledge_features", c.literal_knowledge_features},
      {"knowledge_cap", c.knowledge_cap},
      {"total_knowledge_cap", c.total_knowledge_cap},
  };
}

ModelConfig ModelConfigFromJson(const json &j) {
  ModelConfig c;
  c.use_domain_kb = j.value("use_domain_kb", c.use_domain_kb);
  c.use_general_kb = j.value("use_general_kb", c.use_general_kb);
  c.use_affect = j.value("use_affect", c.use_affect);
  c.enable_f_c = j.value("enable_f_c", c.enable_f_c);
  c.enable_f_k = j.value("enable_f_k", c.enable_f_k);
  c.enable_f_sk = j.value("enable_f_sk", c.enable_f_sk);
  if (j.contains("attention_variant")) {
    c.attention =
        ParseAttentionVariant(j.at("attention_variant").get<std::string>());
  }
  c.dropout = j.value("dropout", c.dropout);
  c.ffn_hidden = j.value("ffn_hidden", c.ffn_hidden);
  c.literal_knowledge_features =
      j.value("literal_knowledge_features", c.literal_knowledge_features);
  c.knowledge_cap = j.value("knowledge_cap", c.knowledge_cap);
  c.total_knowledge_cap = j.value("total_knowledge_cap", c.total_knowledge_cap);
  c.Validate();
  return c;
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

void RequireWidth(Var a, Var b, const char *what) {
  if (a.rows() != b.rows()) {
    throw ShapeError(std::string(what) + ": width " + std::to_string(a.rows()) +
                     " vs " + std::to_string(b.rows()));
  }
}

// softmax_i(ffn([t_i, v, t_i * v])) weighted columns of `t`.
Var AttendWith(Tape &tape, ParameterSet &params, const std::string &ffn, Var t,
               Var v, const DropoutContext &dropout, Var *weights = nullptr) {
  Var vs = tape.RepeatCols(v, static_cast<int>(t.cols()));
  Var scores = ApplyFfn(tape, params, ffn, tape.VConcat({t, vs, tape.Mul(t, vs)}),
                        dropout);
  Var a = tape.Softmax(scores);
  if (weights) *weights = a;
  return tape.ScaleCols(t, a);
}

}  // namespace

Var ContextScore(Tape &tape, ParameterSet &params, Var context, Var mention,
                 Var anaphor, const DropoutContext &dropout) {
  if (context.cols() == 0) throw ShapeError("context score needs context");
  RequireWidth(context, mention, "context score");
  RequireWidth(context, anaphor, "context score");
  Var wm = AttendWith(tape, params, "ffn3", context, mention, dropout);
  Var wp = AttendWith(tape, params, "ffn3", context, anaphor, dropout);
  Var pooled = tape.SumCols(tape.VConcat({wm, wp, tape.Mul(wm, wp)}));
  return ApplyFfn(tape, params, "ffn4", pooled, dropout);
}

Var KnowledgeScore(Tape &tape, ParameterSet &params, Var mention, Var anaphor,
                   Var knowledge, bool literal_features,
                   const DropoutContext &dropout, Var *attention) {
  RequireWidth(knowledge, mention, "knowledge score");
  RequireWidth(knowledge, anaphor, "knowledge score");
  Var v_hat = tape.SumCols(
      AttendWith(tape, params, "ffn5", knowledge, mention, dropout, attention));
  Var first = literal_features ? tape.Mul(anaphor, v_hat) : tape.Mul(mention, v_hat);
  Var features =
      tape.VConcat({mention, anaphor, v_hat, first, tape.Mul(anaphor, v_hat)});
  return ApplyFfn(tape, params, "ffn6", features, dropout);
}

Var SyntaxKnowledgeScore(Tape &tape, ParameterSet &params, Var knowledge,
                         Var mention_syntax, Var anaphor_syntax,
                         const DropoutContext &dropout) {
  RequireWidth(knowledge, mention_syntax, "syntax-knowledge score");
  RequireWidth(knowledge, anaphor_syntax, "syntax-knowledge score");
  const double scale = 1.0 / std::sqrt(static_cast<double>(knowledge.rows()));
  Var kt = tape.Transpose(knowledge);
  // Rows of softmax(S^T K / sqrt(d)) K^T, laid out as d x N columns.
  auto attend = [&](Var s) {
    Var a = tape.SoftmaxRows(tape.Scale(tape.MatMul(tape.Transpose(s), knowledge), scale));
    return tape.Transpose(tape.MatMul(a, kt));
  };
  // Sum over both axes of the interaction matrix, kept per dimension.
  Var pooled = tape.Mul(tape.SumCols(attend(mention_syntax)),
                        tape.SumCols(attend(anaphor_syntax)));
  Var hidden = ApplyFfn(tape, params, "ffn7", pooled, dropout);
  return ApplyFfn(tape, params, "ffn8", hidden, dropout);
}

double CrossEntropyLoss(std::span<const double> probabilities,
                        std::span<const int> labels, double eps) {
  if (probabilities.size() != labels.size()) {
    throw ShapeError("loss: predictions and labels differ in length");
  }
  if (probabilities.empty()) throw Error("loss over an empty batch");
  double total = 0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    double p = std::clamp(probabilities[i], eps, 1.0 - eps);
    total += labels[i] ? std::log(p) : std::log(1.0 - p);
  }
  return -total / static_cast<double>(probabilities.size());
}

CorefModel::CorefModel(const ModelConfig &model_config,
                       const EncoderConfig &encoder_config, Vocabulary vocab,
                       int affect_width, uint64_t seed,
                       std::shared_ptr<const FrozenEmbeddings> frozen)
    : config_(model_config),
      encoder_config_(encoder_config),
      vocab_(std::move(vocab)),
      affect_width_(affect_width),
      frozen_(std::move(frozen)) {
  config_.Validate();
  encoder_config_.Validate();
  if (affect_width_ < 0) throw ConfigError("affect width must be non-negative");
  if (encoder_config_.mode == EncoderMode::kFrozenPretrained && !frozen_) {
    frozen_ = std::make_shared<FrozenEmbeddings>(
        FrozenEmbeddings::Load(encoder_config_.frozen_path));
  }

  std::mt19937_64 rng(seed);
  const int d = encoder_config_.embed_dim;
  const int h = config_.ffn_hidden;
  MakeEncoder().InitParameters(params_, rng);
  InitSpanParameters(params_, encoder_config_, h, rng);
  InitFfn(params_, "ffn3", 3 * d, h, 1, rng);
  InitFfn(params_, "ffn4", 3 * d, h, 1, rng);
  InitFfn(params_, "ffn5", 3 * d, h, 1, rng);
  InitFfn(params_, "ffn6", 5 * d, h, 1, rng);
  InitFfn(params_, "ffn7", d, h, h, rng);
  InitFfn(params_, "ffn8", h, h, 1, rng);
  std::normal_distribution<double> normal(0.0, 0.1);
  Matrix sentinel(d, 1);
  for (int i = 0; i < d; ++i) sentinel(i, 0) = normal(rng);
  params_.Add("sentinel.knowledge", std::move(sentinel));
  params_.Add("sentinel.f_sk", Matrix::Zero(1, 1));
}

TokenEncoder CorefModel::MakeEncoder() const {
  return TokenEncoder(encoder_config_, vocab_.size(), affect_width_,
                      config_.use_affect, frozen_.get());
}

PreparedExample CorefModel::Prepare(const LabeledTriple &triple,
                                    const KnowledgeResources &resources) const {
  if (!triple.context) throw Error("triple without a context document");
  const ParsedDocument &doc = *triple.context;
  const AffectLexicon *affect = nullptr;
  if (config_.use_affect && affect_width_ > 0) {
    if (!resources.affect) throw ConfigError("model expects an affect lexicon");
    if (resources.affect->width() != affect_width_) {
      throw ShapeError("affect lexicon width differs from the model's");
    }
    affect = resources.affect;
  }
  SubwordTokenizer tokenizer(vocab_);
  auto encode = [&](const ParsedDocument &d) {
    return SubTokenize(d, tokenizer, affect, affect_width_);
  };

  PreparedExample ex;
  ex.label = triple.label;
  ex.context = encode(doc);
  ex.mention = PrepareSpanInput(triple.mention, doc, ex.context, encoder_config_);
  ex.anaphor = PrepareSpanInput(triple.anaphor, doc, ex.context, encoder_config_);
  for (const Span &s : ExtractSyntaxPhrases(triple.mention, doc).phrases) {
    ex.mention_syntax.push_back(PrepareSpanInput(s, doc, ex.context, encoder_config_));
  }
  for (const Span &s : ExtractSyntaxPhrases(triple.anaphor, doc).phrases) {
    ex.anaphor_syntax.push_back(PrepareSpanInput(s, doc, ex.context, encoder_config_));
  }

  std::vector<KnowledgePhrase> domain, general;
  if (config_.use_domain_kb && resources.domain) {
    domain = LookupDomainKnowledge(*resources.domain, triple.mention, doc,
                                   config_.knowledge_cap);
  }
  if (config_.use_general_kb && resources.general) {
    general = LookupGeneralKnowledge(*resources.general,
                                     ExtractMentionWords(triple.mention, doc),
                                     config_.knowledge_cap);
  }
  for (const KnowledgePhrase &k :
       MergeKnowledge(std::move(domain), std::move(general),
                      config_.total_knowledge_cap)) {
    ex.knowledge_docs.push_back(encode(*k.context));
    ex.knowledge_spans.push_back(PrepareSpanInput(
        k.span, *k.context, ex.knowledge_docs.back(), encoder_config_));
    ex.knowledge_texts.push_back(k.text);
  }

  // The context score sees at most max_seq_len pieces, centred on the pair.
  const int n = ex.context.num_pieces();
  const int limit = encoder_config_.max_seq_len;
  ex.window_count = std::min(n, limit);
  if (n > limit) {
    int lo = std::min(ex.mention.piece_begin, ex.anaphor.piece_begin);
    int hi = std::max(ex.mention.piece_begin + ex.mention.piece_count,
                      ex.anaphor.piece_begin + ex.anaphor.piece_count);
    int begin = (lo + hi) / 2 - limit / 2;
    ex.window_begin = std::clamp(begin, 0, n - limit);
    std::cerr << "warning: " << doc.doc_id << " has " << n
              << " sub-tokens; context score truncated to " << limit << "\n";
  }
  return ex;
}

ForwardResult CorefModel::Forward(Tape &tape, const PreparedExample &ex,
                                  const DropoutContext &dropout) const {
  TokenEncoder encoder = MakeEncoder();
  ParameterSet &p = params_;
  auto span_vector = [&](Var embeds, const SpanInput &s) {
    return ComputeSpanVector(tape, p, embeds, s, config_.attention, dropout).vector;
  };
  auto stack = [&](Var embeds, const std::vector<SpanInput> &spans) {
    std::vector<Var> cols;
    for (const SpanInput &s : spans) cols.push_back(span_vector(embeds, s));
    return tape.HConcat(cols);
  };

  Var t = encoder.Encode(tape, p, ex.context);
  Var vm = span_vector(t, ex.mention);
  Var vp = span_vector(t, ex.anaphor);

  ForwardResult out;
  std::vector<Var> terms;
  if (config_.enable_f_c) {
    out.f_c = ContextScore(tape, p, tape.Cols(t, ex.window_begin, ex.window_count),
                           vm, vp, dropout);
    terms.push_back(out.f_c);
  }
  if (config_.enable_f_k || config_.enable_f_sk) {
    Var k;
    if (ex.knowledge_docs.empty()) {
      k = tape.Param(p.Get("sentinel.knowledge"));
    } else {
      std::vector<Var> cols;
      for (size_t i = 0; i < ex.knowledge_docs.size(); ++i) {
        Var e = encoder.Encode(tape, p, ex.knowledge_docs[i]);
        cols.push_back(span_vector(e, ex.knowledge_spans[i]));
      }
      k = tape.HConcat(cols);
    }
    if (config_.enable_f_k) {
      out.f_k = KnowledgeScore(tape, p, vm, vp, k,
                               config_.literal_knowledge_features, dropout,
                               &out.knowledge_attention);
      terms.push_back(out.f_k);
    }
    if (config_.enable_f_sk) {
      if (ex.mention_syntax.empty() || ex.anaphor_syntax.empty()) {
        out.f_sk = tape.Param(p.Get("sentinel.f_sk"));
      } else {
        out.f_sk = SyntaxKnowledgeScore(tape, p, k, stack(t, ex.mention_syntax),
                                        stack(t, ex.anaphor_syntax), dropout);
      }
      terms.push_back(out.f_sk);
    }
  }
  out.logit = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) out.logit = tape.Add(out.logit, terms[i]);
  return out;
}

ScoreBundle CorefModel::Predict(const PreparedExample &example) const {
  Tape tape;
  ForwardResult r = Forward(tape, example);
  ScoreBundle b;
  if (r.f_c.valid()) b.f_c = r.f_c.scalar();
  if (r.f_k.valid()) b.f_k = r.f_k.scalar();
  if (r.f_sk.valid()) b.f_sk = r.f_sk.scalar();
  b.f_hat = Sigmoid(b.f_c + b.f_k + b.f_sk);
  return b;
}

ScoreBundle CorefModel::Predict(const LabeledTriple &triple,
                                const KnowledgeResources &resources) const {
  return Predict(Prepare(triple, resources));
}

std::vector<std::pair<std::string, double>> CorefModel::KnowledgeWeights(
    const PreparedExample &example) const {
  std::vector<std::pair<std::string, double>> out;
  if (!config_.enable_f_k || example.knowledge_texts.empty()) return out;
  Tape tape;
  ForwardResult r = Forward(tape, example);
  const Matrix &c = r.knowledge_attention.value();
  for (size_t i = 0; i < example.knowledge_texts.size(); ++i) {
    out.emplace_back(example.knowledge_texts[i], c(0, static_cast<long>(i)));
  }
  return out;
}

json CorefModel::ToJson() const {
  json parameters = json::object();
  for (const auto &[name, param] : params_.items()) {
    const Matrix &v = param.value;
    std::vector<double> data(v.data(), v.data() + v.size());  // column-major
    parameters[name] = {{"rows", v.rows()}, {"cols", v.cols()}, {"data", data}};
  }
  return json{
      {"format", "revcoref-checkpoint"},
      {"schema_version", kCheckpointSchemaVersion},
      {"model", ModelConfigToJson(config_)},
      {"encoder", EncoderConfigToJson(encoder_config_)},
      {"affect_width", affect_width_},
      {"vocab", vocab_.pieces()},
      {"parameters", parameters},
      {"meta", meta_},
  };
}

CorefModel CorefModel::FromJson(const json &j) {
  if (j.value("format", "") != "revcoref-checkpoint") {
    throw ConfigError("not a revcoref checkpoint");
  }
  int version = j.value("schema_version", -1);
  if (version != kCheckpointSchemaVersion) {
    throw ConfigError("unsupported checkpoint schema version " +
                      std::to_string(version));
  }
  CorefModel model(ModelConfigFromJson(j.at("model")),
                   EncoderConfigFromJson(j.at("encoder")),
                   Vocabulary(j.at("vocab").get<std::vector<std::string>>()),
                   j.at("affect_width").get<int>(), 0);
  const json &parameters = j.at("parameters");
  for (auto &[name, param] : model.params_.items()) {
    if (!parameters.contains(name)) {
      throw ConfigError("checkpoint lacks parameter " + name);
    }
    const json &entry = parameters.at(name);
    long rows = entry.at("rows").get<long>();
    long cols = entry.at("cols").get<long>();
    auto data = entry.at("data").get<std::vector<double>>();
    if (rows != param.value.rows() || cols != param.value.cols() ||
        static_cast<long>(data.size()) != rows * cols) {
      throw ShapeError("checkpoint parameter " + name + " has the wrong shape");
    }
    param.value = Eigen::Map<const Matrix>(data.data(), rows, cols);
  }
  if (parameters.size() != model.params_.size()) {
    throw ConfigError("checkpoint has unexpected parameters");
  }
  model.meta_ = j.value("meta", json::object());
  return model;
}

void CorefModel::Save(const std::string &path) const {
  WriteFile(path, ToJson().dump(-1, ' ', false,
                                json::error_handler_t::strict) + "\n");
}

CorefModel CorefModel::Load(const std::string &path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error &e) {
    throw ConfigError("corrupt checkpoint " + path + ": " + e.what());
  }
  return FromJson(j);
}

}  // namespace revcoref
