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

#include "revcoref/pipeline.h"

#include <filesystem>
#include <functional>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string Resolve(const std::string &base_dir, const std::string &path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) {
    return path;
  }
  return (fs::path(base_dir) / path).lexically_normal().string();
}

void RequireFile(const std::string &path, const std::string &what) {
  if (!fs::is_regular_file(path)) {
    throw ConfigError(what + " not found: " + (path.empty() ? "<unset>" : path));
  }
}

}  // namespace

void RunConfig::Validate(bool check_paths) const {
  model.Validate();
  encoder.Validate();
  train.Validate();
  if (negative_ratio < 0) throw ConfigError("negative_ratio must be >= 0");
  if (vocab_min_count < 1) throw ConfigError("vocab_min_count must be >= 1");
  double sum = 0;
  for (double r : split) {
    if (r < 0) throw ConfigError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  if (paths.output_dir.empty()) throw ConfigError("paths.output_dir is required");
  if (!check_paths) return;
  RequireFile(paths.corpus, "paths.corpus");
  RequireFile(paths.annotations, "paths.annotations");
  RequireFile(paths.unlabeled, "paths.unlabeled");
  if (!paths.triple_store.empty()) RequireFile(paths.triple_store, "paths.triple_store");
  if (!paths.affect_lexicon.empty()) {
    RequireFile(paths.affect_lexicon, "paths.affect_lexicon");
  }
  if (!paths.vocab.empty()) RequireFile(paths.vocab, "paths.vocab");
  if (encoder.mode == EncoderMode::kFrozenPretrained) {
    RequireFile(encoder.frozen_path, "encoder.frozen_path");
  }
}

TrainConfig RunConfig::EffectiveTrain() const {
  TrainConfig t = train;
  t.seed = seed;
  return t;
}

std::string RunConfig::Fingerprint() const {
  return ConfigFingerprint(model, encoder, EffectiveTrain());
}

RunConfig RunConfigFromJson(const json &j, const std::string &base_dir) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  int version = j.value("schema_version", kRunConfigSchemaVersion);
  if (version != kRunConfigSchemaVersion) {
    throw ConfigError("unsupported run config schema version " +
                      std::to_string(version));
  }
  RunConfig c;
  try {
    c.domain = j.value("domain", c.domain);
    c.seed = j.value("seed", c.seed);
    c.negative_ratio = j.value("negative_ratio", c.negative_ratio);
    c.vocab_min_count = j.value("vocab_min_count", c.vocab_min_count);
    if (j.contains("split")) {
      auto s = j.at("split").get<std::vector<double>>();
      if (s.size() != 3) throw ConfigError("split needs three ratios");
      c.split = {s[0], s[1], s[2]};
    }
    json p = j.value("paths", json::object());
    c.paths.corpus = Resolve(base_dir, p.value("corpus", ""));
    c.paths.annotations = Resolve(base_dir, p.value("annotations", ""));
    c.paths.unlabeled = Resolve(base_dir, p.value("unlabeled", ""));
    c.paths.triple_store = Resolve(base_dir, p.value("triple_store", ""));
    c.paths.affect_lexicon = Resolve(base_dir, p.value("affect_lexicon", ""));
    c.paths.vocab = Resolve(base_dir, p.value("vocab", ""));
    c.paths.output_dir = Resolve(base_dir, p.value("output_dir", ""));
    c.model = ModelConfigFromJson(j.value("model", json::object()));
    json encoder = j.value("encoder", json::object());
    if (encoder.contains("frozen_path")) {
      encoder["frozen_path"] =
          Resolve(base_dir, encoder.at("frozen_path").get<std::string>());
    }
    c.encoder = EncoderConfigFromJson(encoder);
    c.train = TrainConfigFromJson(j.value("train", json::object()));
  } catch (const json::exception &e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  return c;
}

json RunConfigToJson(const RunConfig &c) {
  return json{
      {"schema_version", kRunConfigSchemaVersion},
      {"domain", c.domain},
      {"seed", c.seed},
      {"negative_ratio", c.negative_ratio},
      {"vocab_min_count", c.vocab_min_count},
      {"split", c.split},
      {"paths",
       {{"corpus", c.paths.corpus},
        {"annotations", c.paths.annotations},
        {"unlabeled", c.paths.unlabeled},
        {"triple_store", c.paths.triple_store},
        {"affect_lexicon", c.paths.affect_lexicon},
        {"vocab", c.paths.vocab},
        {"output_dir", c.paths.output_dir}}},
      {"model", ModelConfigToJson(c.model)},
      {"encoder", EncoderConfigToJson(c.encoder)},
      {"train", TrainConfigToJson(c.train)},
  };
}

RunConfig LoadRunConfig(const std::string &path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::parse_error &e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return RunConfigFromJson(j, fs::path(path).parent_path().string());
}

DomainKb MineStage(const std::vector<ParsedDocument> &unlabeled,
                   const RunConfig &config) {
  DomainKb kb = MineDomainKb(unlabeled, config.train.rho, config.domain);
  kb.meta = {{"seed", config.seed}, {"config_fingerprint", config.Fingerprint()}};
  return kb;
}

Vocabulary BuildRunVocabulary(const RunConfig &config, const DocumentSet &docs,
                              const DomainKb &kb, const TripleStore *general) {
  Vocabulary base =
      config.paths.vocab.empty() ? Vocabulary() : LoadVocabulary(config.paths.vocab);
  std::vector<std::string> extra;
  for (const auto &[word, entries] : kb.entries) {
    for (const KbEntry &e : entries) extra.push_back(e.phrase);
  }
  if (general) {
    for (const Triple &t : general->triples()) {
      extra.push_back(t.e1);
      extra.push_back(t.e2);
    }
  }
  return BuildVocabulary(base, docs.docs(), extra, config.vocab_min_count);
}

std::shared_ptr<const TripleStore> LoadGeneralKb(const RunConfig &config) {
  if (config.paths.triple_store.empty()) return nullptr;
  return std::make_shared<const TripleStore>(
      LoadTripleStore(config.paths.triple_store));
}

std::shared_ptr<const AffectLexicon> LoadAffect(const RunConfig &config) {
  if (config.paths.affect_lexicon.empty()) return nullptr;
  return std::make_shared<const AffectLexicon>(
      LoadAffectLexicon(config.paths.affect_lexicon));
}

json ArtifactEntry(const std::string &root, const std::string &path) {
  return json{{"path", fs::relative(path, root).generic_string()},
              {"sha256", Sha256Hex(ReadFile(path))}};
}

ExperimentData LoadExperiment(const RunConfig &config) {
  config.Validate(true);
  DocumentSet docs(IngestParsedCorpus(config.paths.corpus, config.domain));
  if (docs.size() == 0) {
    throw Error("no documents for domain '" + config.domain + "'");
  }
  auto annotations = LoadAnnotations(config.paths.annotations, docs);
  auto triples = BuildTriples(annotations, docs,
                              TripleOptions{config.negative_ratio, config.seed});
  DatasetSplit split = SplitDataset(triples, config.split, config.seed);
  auto kb = std::make_shared<DomainKb>(MineStage(
      IngestParsedCorpus(config.paths.unlabeled, config.domain), config));

  ExperimentData data;
  data.domain = config.domain;
  data.train = std::move(split.train);
  data.dev = std::move(split.dev);
  data.test = std::move(split.test);
  data.domain_kb = kb;
  data.general_kb = LoadGeneralKb(config);
  data.affect = LoadAffect(config);
  data.vocab = BuildRunVocabulary(config, docs, *kb, data.general_kb.get());
  return data;
}

json RunPipeline(const RunConfig &config, std::ostream *log, bool evaluate) {
  config.Validate(true);
  const fs::path out(config.paths.output_dir);
  fs::create_directories(out / "triples");
  const std::string root = out.string();
  const std::string fingerprint = config.Fingerprint();
  const TrainConfig train = config.EffectiveTrain();

  json artifacts = json::object();
  auto record = [&](const std::string &name, const fs::path &path) {
    artifacts[name] = ArtifactEntry(root, path.string());
  };
  auto stage = [&](const std::string &name, const std::function<void()> &body) {
    if (log) *log << "[" << name << "] running\n";
    try {
      body();
    } catch (const StageError &) {
      throw;
    } catch (const std::exception &e) {
      throw StageError(name, e.what());
    }
  };

  DocumentSet docs;
  stage("ingest", [&] {
    auto parsed = IngestParsedCorpus(config.paths.corpus, config.domain);
    if (parsed.empty()) throw Error("no documents for domain '" + config.domain + "'");
    WriteParsedCorpus((out / "documents.jsonl").string(), parsed);
    record("documents", out / "documents.jsonl");
    docs = DocumentSet(std::move(parsed));
  });

  DatasetSplit split;
  stage("triples", [&] {
    auto annotations = LoadAnnotations(config.paths.annotations, docs);
    auto triples = BuildTriples(annotations, docs,
                                TripleOptions{config.negative_ratio, config.seed});
    split = SplitDataset(triples, config.split, config.seed);
    for (const auto &[name, part] :
         {std::pair{"train", &split.train}, {"dev", &split.dev}, {"test", &split.test}}) {
      fs::path path = out / "triples" / (std::string(name) + ".jsonl");
      WriteTriples(path.string(), *part);
      record(std::string("triples_") + name, path);
    }
  });

  auto kb = std::make_shared<DomainKb>();
  stage("mine-kb", [&] {
    *kb = MineStage(IngestParsedCorpus(config.paths.unlabeled, config.domain),
                    config);
    SaveDomainKb((out / "domain_kb.json").string(), *kb);
    record("domain_kb", out / "domain_kb.json");
  });

  ExperimentData data;
  std::unique_ptr<CorefModel> model;
  stage("train", [&] {
    data.domain = config.domain;
    data.train = split.train;
    data.dev = split.dev;
    data.test = split.test;
    data.domain_kb = kb;
    data.general_kb = LoadGeneralKb(config);
    data.affect = LoadAffect(config);
    data.vocab = BuildRunVocabulary(config, docs, *kb, data.general_kb.get());
    SaveVocabulary((out / "vocab.txt").string(), data.vocab);
    record("vocab", out / "vocab.txt");

    TrainResult result = TrainModel(data, config.model, config.encoder, train, log);
    result.model.Save((out / "model.ckpt.json").string());
    record("checkpoint", out / "model.ckpt.json");
    json history = json::array();
    for (const EpochRecord &e : result.history) {
      history.push_back({{"epoch", e.epoch},
                         {"train_loss", e.train_loss},
                         {"dev_f1", e.dev_f1},
                         {"learning_rate", e.learning_rate}});
    }
    json summary{{"seed", config.seed},
                 {"config_fingerprint", fingerprint},
                 {"best_epoch", result.best_epoch},
                 {"best_dev_f1", result.best_dev_f1},
                 {"history", history}};
    WriteFile((out / "train_history.json").string(), summary.dump(1) + "\n");
    record("train_history", out / "train_history.json");
    model = std::make_unique<CorefModel>(std::move(result.model));
  });

  std::vector<std::string> stages = {"ingest", "triples", "mine-kb", "train"};
  if (evaluate) {
    stages.push_back("eval");
    stage("eval", [&] {
      if (data.test.empty()) throw Error("test split is empty");
      EvalReport report =
          Evaluate(*model, data.test, data.resources(), config.domain);
      WriteFile((out / "eval.json").string(),
                EvalReportToJson(report).dump(1) + "\n");
      record("eval", out / "eval.json");
    });
  }

  json inputs = json::object();
  for (const auto &[name, path] :
       {std::pair{"corpus", config.paths.corpus},
        {"annotations", config.paths.annotations},
        {"unlabeled", config.paths.unlabeled},
        {"triple_store", config.paths.triple_store},
        {"affect_lexicon", config.paths.affect_lexicon},
        {"vocab", config.paths.vocab}}) {
    if (!path.empty()) inputs[name] = Sha256Hex(ReadFile(path));
  }
  json manifest{{"schema", "revcoref.manifest"},
                {"schema_version", 1},
                {"domain", config.domain},
                {"seed", config.seed},
                {"config_fingerprint", fingerprint},
                {"stages", stages},
                {"inputs", inputs},
                {"artifacts", artifacts},
                {"config", RunConfigToJson(config)}};
  WriteFile((out / "manifest.json").string(), manifest.dump(1) + "\n");
  return manifest;
}

}  // namespace revcoref
