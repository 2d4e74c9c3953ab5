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

#include "revcoref/cli.h"

#include <charconv>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "revcoref/error.h"
#include "revcoref/pipeline.h"
#include "revcoref/synthetic.h"
#include "revcoref/text_util.h"

namespace revcoref {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// "S:E" token offsets, end exclusive.
std::pair<int, int> ParseOffsets(const std::string &text, const std::string &flag) {
  auto colon = text.find(':');
  int start = 0, end = 0;
  auto parse = [&](std::string_view part, int &value) {
    auto res = std::from_chars(part.data(), part.data() + part.size(), value);
    return res.ec == std::errc() && res.ptr == part.data() + part.size();
  };
  std::string_view view(text);
  if (colon == std::string::npos || !parse(view.substr(0, colon), start) ||
      !parse(view.substr(colon + 1), end)) {
    throw ConfigError(flag + " must look like START:END, got '" + text + "'");
  }
  return {start, end};
}

Span ArgumentSpan(const ParsedDocument &doc, const std::string &text,
                  const std::string &flag, SpanKind kind) {
  auto [start, end] = ParseOffsets(text, flag);
  try {
    return MakeSpan(doc, start, end, kind);
  } catch (const StructuralError &e) {
    throw ConfigError(flag + " " + text + " is not a valid span of '" +
                      doc.doc_id + "' (" + std::to_string(doc.size()) +
                      " tokens): " + e.what());
  }
}

// Optional knowledge files shared by eval and predict.
struct ResourceFlags {
  std::string kb;
  std::string triple_store;
  std::string affect;

  void Add(CLI::App *app) {
    app->add_option("--kb", kb, "mined domain KB (JSON)")->check(CLI::ExistingFile);
    app->add_option("--triple-store", triple_store, "general KB triples (TSV)")
        ->check(CLI::ExistingFile);
    app->add_option("--affect", affect, "affect lexicon (CSV)")
        ->check(CLI::ExistingFile);
  }
};

struct LoadedResources {
  std::optional<DomainKb> kb;
  std::optional<TripleStore> general;
  std::optional<AffectLexicon> affect;

  KnowledgeResources view() const {
    return {kb ? &*kb : nullptr, general ? &*general : nullptr,
            affect ? &*affect : nullptr};
  }
};

LoadedResources LoadResources(const ResourceFlags &flags, const ModelConfig &model,
                              std::ostream &err) {
  LoadedResources r;
  if (!flags.kb.empty()) r.kb = LoadDomainKb(flags.kb);
  if (!flags.triple_store.empty()) r.general = LoadTripleStore(flags.triple_store);
  if (!flags.affect.empty()) r.affect = LoadAffectLexicon(flags.affect);
  if (model.use_domain_kb && model.enable_f_k && !r.kb) {
    err << "warning: model uses domain knowledge but --kb was not given\n";
  }
  if (model.use_general_kb && model.enable_f_k && !r.general) {
    err << "warning: model uses general knowledge but --triple-store was not given\n";
  }
  return r;
}

// Loads the run config and applies command-line overrides.
RunConfig ConfigWithOverrides(const std::string &path, const std::string &domain,
                              std::optional<uint64_t> seed, const std::string &out) {
  RunConfig config = LoadRunConfig(path);
  if (!domain.empty()) config.domain = domain;
  if (seed) config.seed = *seed;
  if (!out.empty()) config.paths.output_dir = out;
  return config;
}

json SplitCounts(const std::vector<LabeledTriple> &triples) {
  int pos = 0;
  for (const auto &t : triples) pos += t.label;
  return {{"positive", pos}, {"negative", static_cast<int>(triples.size()) - pos}};
}

json SyntheticRunConfig(const SyntheticConfig &synth) {
  RunConfig c;
  c.domain = synth.domain;
  c.seed = 13;
  c.split = {0.7, 0.15, 0.15};
  c.encoder.embed_dim = 32;
  c.encoder.token_dim = 32;
  c.train.rho = 1.0;
  c.train.optimizer = OptimizerKind::kAdam;
  c.train.learning_rate = 3e-3;
  c.train.epochs = 10;
  c.paths = {"corpus.jsonl", "annotations.jsonl", "unlabeled.jsonl", "omcs.tsv",
             "affect.csv",   "vocab.txt",         "run"};
  return RunConfigToJson(c);
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Knowledge-aware object and attribute coreference in reviews",
               "revcoref"};
  app.require_subcommand(1);

  std::string corpus, annotations, unlabeled, domain, out_path, config_path;
  std::optional<uint64_t> seed;
  uint64_t seed_value = 13;

  auto *ingest = app.add_subcommand("ingest", "validate and filter a parsed corpus");
  ingest->add_option("--corpus", corpus, "parsed corpus (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--domain", domain, "keep only this domain");
  ingest->add_option("--out", out_path, "filtered corpus (JSONL)")->required();

  double negative_ratio = 2.4;
  std::vector<double> split = {0.8, 0.1, 0.1};
  auto *triples = app.add_subcommand("triples", "build and split labeled triples");
  triples->add_option("--corpus", corpus, "parsed corpus (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  triples->add_option("--annotations", annotations, "coreference clusters (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  triples->add_option("--domain", domain, "keep only this domain");
  triples->add_option("--out-dir", out_path, "directory for {train,dev,test}.jsonl")
      ->required();
  triples->add_option("--negative-ratio", negative_ratio,
                      "negatives kept per positive; <= 0 keeps all")
      ->capture_default_str();
  triples->add_option("--split", split, "train,dev,test ratios")
      ->delimiter(',')
      ->expected(3);
  triples->add_option("--seed", seed_value, "sampling and split seed");

  double rho = kDefaultRho;
  auto *mine = app.add_subcommand("mine-kb", "mine the domain KB");
  mine->add_option("--unlabeled,--corpus", unlabeled, "unlabeled parsed reviews (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  mine->add_option("--domain", domain, "keep only this domain");
  mine->add_option("--rho", rho, "tf-idf retention threshold")->capture_default_str();
  mine->add_option("--out", out_path, "KB file (JSON)")->required();
  mine->add_option("--seed", seed_value, "seed recorded in the KB file");

  auto *train = app.add_subcommand("train", "mine, train and save a checkpoint");
  train->add_option("--config", config_path, "run config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--domain", domain, "override the config domain");
  train->add_option("--seed", seed, "override the config seed");
  train->add_option("--out", out_path, "override the output directory");

  std::string ckpt, test_path;
  ResourceFlags eval_resources;
  auto *eval = app.add_subcommand("eval", "score a checkpoint on labeled triples");
  eval->add_option("--ckpt", ckpt, "checkpoint (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--test", test_path, "labeled triples (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--corpus", corpus, "parsed documents the triples refer to")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--domain", domain, "domain name for the report");
  eval->add_option("--out", out_path, "report file (JSON)");
  eval_resources.Add(eval);

  std::string grid_path;
  int jobs = 1;
  auto *ablate = app.add_subcommand("ablate", "retrain and test ablation cells");
  ablate->add_option("--config", config_path, "run config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  ablate->add_option("--grid", grid_path, "ablation grid (JSON); default grid if absent")
      ->check(CLI::ExistingFile);
  ablate->add_option("--jobs", jobs, "cells trained in parallel")
      ->check(CLI::PositiveNumber);
  ablate->add_option("--seed", seed, "override the config seed");
  ablate->add_option("--out", out_path, "table (CSV); stdout if absent");

  std::string doc_path, mention_arg, anaphor_arg;
  ResourceFlags predict_resources;
  auto *predict = app.add_subcommand("predict", "score one mention-anaphor pair");
  predict->add_option("--ckpt", ckpt, "checkpoint (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--doc", doc_path, "one parsed document (JSON record)")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--mention", mention_arg, "mention token offsets START:END")
      ->required();
  predict->add_option("--anaphor", anaphor_arg, "anaphor token offsets START:END")
      ->required();
  predict_resources.Add(predict);

  auto *pipeline = app.add_subcommand(
      "pipeline", "ingest, triples, mine-kb, train and eval with a manifest");
  pipeline->add_option("--config", config_path, "run config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  pipeline->add_option("--seed", seed, "override the config seed");
  pipeline->add_option("--out", out_path, "override the output directory");

  SyntheticConfig synth_config;
  auto *synth = app.add_subcommand(
      "synth", "write a synthetic knowledge-dependent dataset and run config");
  synth->add_option("--out", out_path, "output directory")->required();
  synth->add_option("--reviews", synth_config.reviews, "labeled reviews");
  synth->add_option("--distractors", synth_config.distractors,
                    "non-coreferent aliases per review");
  synth->add_option("--seed", synth_config.seed, "generator seed");
  synth->add_option("--domain", synth_config.domain, "domain name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      auto docs = IngestParsedCorpus(corpus, domain);
      WriteParsedCorpus(out_path, docs);
      out << json{{"documents", docs.size()}, {"out", out_path}}.dump() << "\n";
    } else if (triples->parsed()) {
      if (split.size() != 3) throw ConfigError("--split needs three ratios");
      DocumentSet docs(IngestParsedCorpus(corpus, domain));
      auto anns = LoadAnnotations(annotations, docs);
      auto all = BuildTriples(anns, docs, TripleOptions{negative_ratio, seed_value});
      DatasetSplit parts = SplitDataset(all, {split[0], split[1], split[2]}, seed_value);
      fs::create_directories(out_path);
      WriteTriples((fs::path(out_path) / "train.jsonl").string(), parts.train);
      WriteTriples((fs::path(out_path) / "dev.jsonl").string(), parts.dev);
      WriteTriples((fs::path(out_path) / "test.jsonl").string(), parts.test);
      out << json{{"seed", seed_value},
                  {"train", SplitCounts(parts.train)},
                  {"dev", SplitCounts(parts.dev)},
                  {"test", SplitCounts(parts.test)}}
                 .dump()
          << "\n";
    } else if (mine->parsed()) {
      if (!(rho >= 0)) throw ConfigError("--rho must be >= 0");
      DomainKb kb = MineDomainKb(IngestParsedCorpus(unlabeled, domain), rho, domain);
      kb.meta = {{"seed", seed_value}};
      SaveDomainKb(out_path, kb);
      out << json{{"mention_words", kb.entries.size()},
                  {"reviews", kb.corpus_size},
                  {"rho", kb.rho},
                  {"out", out_path}}
                 .dump()
          << "\n";
    } else if (train->parsed() || pipeline->parsed()) {
      RunConfig config = ConfigWithOverrides(config_path, domain, seed, out_path);
      config.Validate(true);
      json manifest = RunPipeline(config, &err, pipeline->parsed());
      out << manifest.dump(1) << "\n";
    } else if (eval->parsed()) {
      CorefModel model = CorefModel::Load(ckpt);
      DocumentSet docs(IngestParsedCorpus(corpus, ""));
      auto test = ReadTriples(test_path, docs);
      LoadedResources res = LoadResources(eval_resources, model.config(), err);
      std::string name = domain.empty() ? model.meta().value("domain", "") : domain;
      EvalReport report = Evaluate(model, test, res.view(), name);
      std::string text = EvalReportToJson(report).dump(1) + "\n";
      if (!out_path.empty()) WriteFile(out_path, text);
      out << text;
    } else if (ablate->parsed()) {
      RunConfig config = ConfigWithOverrides(config_path, "", seed, "");
      config.Validate(true);
      std::vector<AblationCell> cells =
          grid_path.empty() ? DefaultAblationGrid()
                            : ParseAblationGrid(json::parse(ReadFile(grid_path)));
      ExperimentData data = LoadExperiment(config);
      auto rows = Ablate(data, config.model, config.encoder, config.EffectiveTrain(),
                         cells, jobs, &err);
      std::string csv = AblationCsv(rows);
      if (out_path.empty()) {
        out << csv;
      } else {
        WriteFile(out_path, csv);
        out << json{{"rows", rows.size()}, {"out", out_path}}.dump() << "\n";
      }
    } else if (predict->parsed()) {
      CorefModel model = CorefModel::Load(ckpt);
      auto doc = std::make_shared<const ParsedDocument>(
          DocumentFromJson(json::parse(ReadFile(doc_path)), doc_path, 1));
      LabeledTriple triple{doc,
                           ArgumentSpan(*doc, mention_arg, "--mention", SpanKind::kMention),
                           ArgumentSpan(*doc, anaphor_arg, "--anaphor", SpanKind::kAnaphor),
                           0};
      LoadedResources res = LoadResources(predict_resources, model.config(), err);
      PreparedExample prepared = model.Prepare(triple, res.view());
      ScoreBundle s = model.Predict(prepared);
      json knowledge = json::array();
      for (const auto &[phrase, weight] : model.KnowledgeWeights(prepared)) {
        knowledge.push_back({{"phrase", phrase}, {"weight", weight}});
      }
      json result{{"mention", SpanText(*doc, triple.mention)},
                  {"anaphor", SpanText(*doc, triple.anaphor)},
                  {"f_c", s.f_c},
                  {"f_k", s.f_k},
                  {"f_sk", s.f_sk},
                  {"f_hat", s.f_hat},
                  {"label", s.label()},
                  {"knowledge", knowledge}};
      if (prepared.knowledge_texts.empty()) result["note"] = "no knowledge matched";
      out << result.dump(1) << "\n";
    } else if (synth->parsed()) {
      SyntheticDataset data = GenerateSynthetic(synth_config);
      WriteSynthetic(data, out_path);
      WriteFile((fs::path(out_path) / "config.json").string(),
                SyntheticRunConfig(synth_config).dump(1) + "\n");
      out << json{{"reviews", data.contexts.size()},
                  {"unlabeled", data.unlabeled.size()},
                  {"out", out_path}}
                 .dump()
          << "\n";
    }
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace revcoref
