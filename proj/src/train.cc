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

#include "revcoref/train.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <sstream>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {

using nlohmann::json;

void TrainConfig::Validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (decay_floor < 0 || decay_floor > 1) {
    throw ConfigError("decay_floor must be in [0, 1]");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (rho < 0) throw ConfigError("rho must be non-negative");
  if (momentum < 0 || momentum >= 1) throw ConfigError("momentum must be in [0, 1)");
  if (weight_decay < 0) throw ConfigError("weight_decay must be non-negative");
}

json TrainConfigToJson(const TrainConfig &c) {
  return json{
      {"epochs", c.epochs},
      {"learning_rate", c.learning_rate},
      {"decay_floor", c.decay_floor},
      {"batch_size", c.batch_size},
      {"seed", c.seed},
      {"rho", c.rho},
      {"optimizer", c.optimizer == OptimizerKind::kAdam ? "adam" : "sgd_momentum"},
      {"momentum", c.momentum},
      {"adam_beta1", c.adam_beta1},
      {"adam_beta2", c.adam_beta2},
      {"adam_epsilon", c.adam_epsilon},
      {"weight_decay", c.weight_decay},
  };
}

TrainConfig TrainConfigFromJson(const json &j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.decay_floor = j.value("decay_floor", c.decay_floor);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.rho = j.value("rho", c.rho);
  if (j.contains("optimizer")) {
    std::string name = j.at("optimizer").get<std::string>();
    if (name == "adam") {
      c.optimizer = OptimizerKind::kAdam;
    } else if (name == "sgd_momentum") {
      c.optimizer = OptimizerKind::kSgdMomentum;
    } else {
      throw ConfigError("unknown optimizer " + name);
    }
  }
  c.momentum = j.value("momentum", c.momentum);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.Validate();
  return c;
}

double LearningRateAt(const TrainConfig &config, long step, long total_steps) {
  double span = static_cast<double>(std::max(1L, total_steps - 1));
  double frac = std::clamp(static_cast<double>(step) / span, 0.0, 1.0);
  return config.learning_rate * (1.0 - (1.0 - config.decay_floor) * frac);
}

std::string ConfigFingerprint(const ModelConfig &model,
                              const EncoderConfig &encoder,
                              const TrainConfig &train) {
  json j{{"model", ModelConfigToJson(model)},
         {"encoder", EncoderConfigToJson(encoder)},
         {"train", TrainConfigToJson(train)}};
  return Sha256Hex(j.dump());
}

Confusion CountConfusion(const std::vector<int> &gold,
                         const std::vector<int> &predicted) {
  if (gold.size() != predicted.size()) {
    throw ShapeError("gold and predicted labels differ in length");
  }
  Confusion c;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i]) {
      (predicted[i] ? c.tp : c.fn)++;
    } else {
      (predicted[i] ? c.fp : c.tn)++;
    }
  }
  return c;
}

EvalReport ReportFromConfusion(const Confusion &c) {
  EvalReport r;
  r.confusion = c;
  r.precision_pos = c.tp + c.fp ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0;
  r.recall_pos = c.tp + c.fn ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0;
  double sum = r.precision_pos + r.recall_pos;
  r.f1_pos = sum > 0 ? 2 * r.precision_pos * r.recall_pos / sum : 0;
  return r;
}

json EvalReportToJson(const EvalReport &r) {
  return json{
      {"schema", "revcoref.eval"},
      {"schema_version", kEvalSchemaVersion},
      {"domain", r.domain},
      {"precision_pos", r.precision_pos},
      {"recall_pos", r.recall_pos},
      {"f1_pos", r.f1_pos},
      {"confusion",
       {{"tp", r.confusion.tp},
        {"fp", r.confusion.fp},
        {"fn", r.confusion.fn},
        {"tn", r.confusion.tn}}},
      {"size", r.confusion.total()},
      {"config_fingerprint", r.config_fingerprint},
      {"seed", r.seed},
  };
}

EvalReport EvalReportFromJson(const json &j) {
  if (j.value("schema", "") != "revcoref.eval" ||
      j.value("schema_version", -1) != kEvalSchemaVersion) {
    throw ConfigError("not a version 1 evaluation report");
  }
  const json &c = j.at("confusion");
  EvalReport r = ReportFromConfusion(Confusion{c.at("tp"), c.at("fp"),
                                               c.at("fn"), c.at("tn")});
  r.domain = j.value("domain", "");
  r.config_fingerprint = j.value("config_fingerprint", "");
  r.seed = j.value("seed", uint64_t{0});
  return r;
}

std::vector<PreparedExample> PrepareAll(const CorefModel &model,
                                        const std::vector<LabeledTriple> &triples,
                                        const KnowledgeResources &resources) {
  std::vector<PreparedExample> out;
  out.reserve(triples.size());
  for (const LabeledTriple &t : triples) out.push_back(model.Prepare(t, resources));
  return out;
}

namespace {

using Snapshot = std::map<std::string, Matrix>;

Snapshot TakeSnapshot(const ParameterSet &params) {
  Snapshot s;
  for (const auto &[name, p] : params.items()) s[name] = p.value;
  return s;
}

void Restore(ParameterSet &params, const Snapshot &s) {
  for (auto &[name, p] : params.items()) p.value = s.at(name);
}

void Step(ParameterSet &params, const TrainConfig &config, double lr,
          long step) {
  for (auto &[name, p] : params.items()) {
    if (!p.grad.allFinite()) {
      throw DivergenceError("non-finite gradient in " + name);
    }
    if (config.weight_decay > 0) p.value *= 1.0 - lr * config.weight_decay;
    if (config.optimizer == OptimizerKind::kSgdMomentum) {
      p.moment1 = config.momentum * p.moment1 + p.grad;
      p.value -= lr * p.moment1;
    } else {
      const double b1 = config.adam_beta1;
      const double b2 = config.adam_beta2;
      p.moment1 = b1 * p.moment1 + (1 - b1) * p.grad;
      p.moment2 = b2 * p.moment2 + (1 - b2) * p.grad.cwiseProduct(p.grad);
      double c1 = 1 - std::pow(b1, static_cast<double>(step + 1));
      double c2 = 1 - std::pow(b2, static_cast<double>(step + 1));
      p.value.array() -= lr * (p.moment1.array() / c1) /
                         ((p.moment2.array() / c2).sqrt() + config.adam_epsilon);
    }
  }
}

std::string CellName(const std::vector<std::string> &axes) {
  std::string name;
  for (const auto &a : axes) name += (name.empty() ? "" : " ") + a;
  return name;
}

}  // namespace

TrainResult Train(CorefModel model, const std::vector<PreparedExample> &train,
                  const std::vector<PreparedExample> &dev,
                  const TrainConfig &config, std::ostream *log) {
  config.Validate();
  if (train.empty()) throw Error("training set is empty");
  ParameterSet &params = model.params();
  for (auto &[name, p] : params.items()) {
    p.moment1.setZero();
    p.moment2.setZero();
  }

  std::mt19937_64 order_rng(config.seed);
  std::mt19937_64 dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  DropoutContext dropout{model.config().dropout,
                         model.config().dropout > 0 ? &dropout_rng : nullptr};

  const long n = static_cast<long>(train.size());
  const long batches = (n + config.batch_size - 1) / config.batch_size;
  const long total_steps = batches * config.epochs;
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);

  TrainResult result{model, 0, -1.0, {}};
  Snapshot best;
  long step = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double loss_sum = 0;
    double lr = 0;
    for (long b = 0; b < batches; ++b) {
      long begin = b * config.batch_size;
      long end = std::min(n, begin + config.batch_size);
      params.ZeroGrad();
      for (long i = begin; i < end; ++i) {
        const PreparedExample &ex = train[order[i]];
        Tape tape;
        ForwardResult r = model.Forward(tape, ex, dropout);
        Var loss = tape.BinaryCrossEntropy(r.logit, ex.label, kProbabilityEpsilon);
        if (!std::isfinite(loss.scalar())) {
          throw DivergenceError("non-finite loss at epoch " +
                                std::to_string(epoch) + ", step " +
                                std::to_string(step));
        }
        loss_sum += loss.scalar();
        tape.Backward(loss, 1.0 / static_cast<double>(end - begin));
      }
      lr = LearningRateAt(config, step, total_steps);
      Step(params, config, lr, step);
      ++step;
    }

    EpochRecord record{epoch, loss_sum / static_cast<double>(n), 0, lr};
    if (!dev.empty()) record.dev_f1 = Evaluate(model, dev, "").f1_pos;
    result.history.push_back(record);
    bool better = dev.empty() ? true : record.dev_f1 > result.best_dev_f1;
    if (better) {
      best = TakeSnapshot(params);
      result.best_epoch = epoch;
      result.best_dev_f1 = record.dev_f1;
    }
    if (log) {
      *log << "epoch " << epoch << "/" << config.epochs << " loss "
           << record.train_loss << " dev_f1 " << record.dev_f1 << " lr " << lr
           << "\n";
    }
  }

  Restore(params, best);
  model.meta()["best_epoch"] = result.best_epoch;
  model.meta()["best_dev_f1"] = result.best_dev_f1;
  model.meta()["seed"] = config.seed;
  result.model = std::move(model);
  return result;
}

TrainResult TrainModel(const ExperimentData &data, const ModelConfig &model_config,
                       const EncoderConfig &encoder, const TrainConfig &train,
                       std::ostream *log) {
  CorefModel model(model_config, encoder, data.vocab, data.affect_width(),
                   train.seed, data.frozen);
  KnowledgeResources res = data.resources();
  std::vector<PreparedExample> train_set = PrepareAll(model, data.train, res);
  std::vector<PreparedExample> dev_set = PrepareAll(model, data.dev, res);
  TrainResult result =
      Train(std::move(model), train_set, dev_set, train, log);
  result.model.meta()["config_fingerprint"] =
      ConfigFingerprint(model_config, encoder, train);
  result.model.meta()["domain"] = data.domain;
  return result;
}

EvalReport Evaluate(const CorefModel &model,
                    const std::vector<PreparedExample> &examples,
                    const std::string &domain) {
  std::vector<int> gold, predicted;
  for (const PreparedExample &ex : examples) {
    gold.push_back(ex.label);
    predicted.push_back(model.Predict(ex).label());
  }
  EvalReport r = ReportFromConfusion(CountConfusion(gold, predicted));
  r.domain = domain;
  r.config_fingerprint = model.meta().value("config_fingerprint", "");
  r.seed = model.meta().value("seed", uint64_t{0});
  return r;
}

EvalReport Evaluate(const CorefModel &model,
                    const std::vector<LabeledTriple> &triples,
                    const KnowledgeResources &resources,
                    const std::string &domain) {
  if (triples.empty()) throw Error("evaluation set is empty");
  return Evaluate(model, PrepareAll(model, triples, resources), domain);
}

std::vector<std::string> AblationAxes() {
  return {"-omcs", "-domain_kb", "-affect",          "-all_knowledge", "-f_c",
          "-f_k",  "-f_sk",      "-syntax_attention", "+dot_attention"};
}

ModelConfig ApplyAblation(ModelConfig c, const std::string &axis) {
  if (axis == "full") {
  } else if (axis == "-omcs") {
    c.use_general_kb = false;
  } else if (axis == "-domain_kb") {
    c.use_domain_kb = false;
  } else if (axis == "-affect") {
    c.use_affect = false;
  } else if (axis == "-all_knowledge") {
    c.use_domain_kb = c.use_general_kb = c.use_affect = false;
  } else if (axis == "-f_c") {
    c.enable_f_c = false;
  } else if (axis == "-f_k") {
    c.enable_f_k = false;
  } else if (axis == "-f_sk") {
    c.enable_f_sk = false;
  } else if (axis == "-syntax_attention") {
    c.attention = AttentionVariant::kNone;
  } else if (axis == "+dot_attention") {
    c.attention = AttentionVariant::kDot;
  } else {
    throw ConfigError("unknown ablation axis '" + axis + "'");
  }
  c.Validate();
  return c;
}

std::string AblationGroup(const std::string &axis) {
  if (axis == "full") return "";
  if (axis == "-f_c" || axis == "-f_k" || axis == "-f_sk") return "score";
  if (axis == "-syntax_attention" || axis == "+dot_attention") return "attention";
  if (axis == "-omcs" || axis == "-domain_kb" || axis == "-affect" ||
      axis == "-all_knowledge") {
    return "knowledge source";
  }
  throw ConfigError("unknown ablation axis '" + axis + "'");
}

std::vector<AblationCell> DefaultAblationGrid() {
  std::vector<AblationCell> cells;
  for (const std::string &axis : AblationAxes()) cells.push_back({axis, {axis}});
  return cells;
}

std::vector<AblationCell> ParseAblationGrid(const json &j) {
  if (!j.is_object() || !j.contains("cells") || !j.at("cells").is_array()) {
    throw ConfigError("ablation grid needs a \"cells\" array");
  }
  std::vector<AblationCell> cells;
  for (const json &entry : j.at("cells")) {
    AblationCell cell;
    if (entry.is_string()) {
      cell.axes.push_back(entry.get<std::string>());
    } else if (entry.is_array() && !entry.empty()) {
      cell.axes = entry.get<std::vector<std::string>>();
    } else {
      throw ConfigError("grid cell must be an axis name or a list of them");
    }
    ModelConfig probe;
    for (const auto &axis : cell.axes) probe = ApplyAblation(probe, axis);
    cell.name = CellName(cell.axes);
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::vector<AblationRow> Ablate(const ExperimentData &data,
                                const ModelConfig &base,
                                const EncoderConfig &encoder,
                                const TrainConfig &train,
                                const std::vector<AblationCell> &cells,
                                int jobs, std::ostream *log) {
  if (data.test.empty()) throw Error("ablation needs a test split");
  std::vector<AblationCell> all = {{"full", {"full"}}};
  all.insert(all.end(), cells.begin(), cells.end());
  std::vector<ModelConfig> configs;
  for (const AblationCell &cell : all) {
    ModelConfig c = base;
    for (const auto &axis : cell.axes) c = ApplyAblation(c, axis);
    configs.push_back(c);
  }

  auto run = [&](size_t i) {
    TrainResult r = TrainModel(data, configs[i], encoder, train);
    return Evaluate(r.model, data.test, data.resources(), data.domain);
  };
  std::vector<EvalReport> reports(all.size());
  const size_t width = static_cast<size_t>(std::max(1, jobs));
  for (size_t begin = 0; begin < all.size(); begin += width) {
    std::vector<std::future<EvalReport>> pending;
    size_t end = std::min(all.size(), begin + width);
    for (size_t i = begin; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, run, i));
    }
    for (size_t i = begin; i < end; ++i) {
      reports[i] = pending[i - begin].get();
      if (log) {
        *log << "cell " << all[i].name << " f1_pos " << reports[i].f1_pos << "\n";
      }
    }
  }

  std::vector<AblationRow> rows;
  for (size_t i = 0; i < all.size(); ++i) {
    std::string group = all[i].axes.size() == 1 ? AblationGroup(all[i].axes[0])
                                                : "combined";
    rows.push_back({group, all[i].name, reports[i],
                    reports[0].f1_pos - reports[i].f1_pos});
  }
  return rows;
}

std::string AblationCsv(const std::vector<AblationRow> &rows) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "comparison,model,f1_pos,delta,config_fingerprint\n";
  for (const AblationRow &r : rows) {
    out << r.group << ',' << r.cell << ',' << r.report.f1_pos << ',' << r.delta
        << ',' << r.report.config_fingerprint << '\n';
  }
  return out.str();
}

}  // namespace revcoref
