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

#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "revcoref/error.h"
#include "revcoref/synthetic.h"
#include "revcoref/train.h"
#include "test_util.h"

namespace revcoref {
namespace {

TEST_CASE("the learning rate falls linearly to the floor") {
  TrainConfig c;
  c.learning_rate = 3e-5;
  c.decay_floor = 1e-4;
  CHECK(LearningRateAt(c, 0, 101) == 3e-5);
  CHECK(LearningRateAt(c, 100, 101) == doctest::Approx(3e-9).epsilon(1e-12));
  CHECK(LearningRateAt(c, 50, 101) ==
        doctest::Approx(3e-5 * (1 - (1 - 1e-4) * 0.5)).epsilon(1e-12));
  CHECK(LearningRateAt(c, 0, 1) == 3e-5);
  for (long s = 1; s < 101; ++s) CHECK(LearningRateAt(c, s, 101) < LearningRateAt(c, s - 1, 101));
}

TEST_CASE("reports follow from the confusion counts") {
  EvalReport r = ReportFromConfusion({3, 1, 2, 4});
  CHECK(r.precision_pos == 0.75);
  CHECK(r.recall_pos == 0.6);
  CHECK(r.f1_pos == doctest::Approx(2 * 0.75 * 0.6 / 1.35).epsilon(1e-15));
  CHECK(r.confusion.total() == 10);

  Confusion all_right = CountConfusion({1, 0, 1, 0}, {1, 0, 1, 0});
  CHECK(ReportFromConfusion(all_right).f1_pos == 1.0);
  EvalReport none = ReportFromConfusion(CountConfusion({1, 0, 1}, {0, 0, 0}));
  CHECK(none.recall_pos == 0.0);
  CHECK(none.precision_pos == 0.0);
  CHECK(none.f1_pos == 0.0);
  CHECK_THROWS_AS(CountConfusion({1}, {1, 0}), ShapeError);

  r.domain = "alarm";
  r.seed = 9;
  r.config_fingerprint = "abc";
  nlohmann::json j = EvalReportToJson(r);
  CHECK(j["size"] == 10);
  EvalReport back = EvalReportFromJson(j);
  CHECK(back.f1_pos == r.f1_pos);
  CHECK(back.domain == "alarm");
  CHECK(back.seed == 9);
  j["schema_version"] = 2;
  CHECK_THROWS_AS(EvalReportFromJson(j), ConfigError);
}

TEST_CASE("random confusions reproduce precision and recall exactly") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> gold, pred;
    for (int i = 0; i < 1 + static_cast<int>(rng() % 30); ++i) {
      gold.push_back(static_cast<int>(rng() % 2));
      pred.push_back(static_cast<int>(rng() % 2));
    }
    EvalReport r = ReportFromConfusion(CountConfusion(gold, pred));
    CHECK(r.confusion.total() == static_cast<long>(gold.size()));
    const Confusion &c = r.confusion;
    if (c.tp + c.fp > 0) CHECK(r.precision_pos * (c.tp + c.fp) == doctest::Approx(c.tp));
    if (c.tp + c.fn > 0) CHECK(r.recall_pos * (c.tp + c.fn) == doctest::Approx(c.tp));
    CHECK(r.f1_pos >= 0.0);
    CHECK(r.f1_pos <= 1.0);
    if (r.precision_pos + r.recall_pos > 0) {
      CHECK(r.f1_pos == doctest::Approx(2 * r.precision_pos * r.recall_pos /
                                        (r.precision_pos + r.recall_pos)));
    }
  }
}

struct SmallRun {
  testing::SyntheticExperiment ex = testing::MakeSyntheticExperiment(21, 12);
  SmallRun() { ex.train.epochs = 4; }
  TrainResult Run() const {
    return TrainModel(ex.data, ex.model, ex.encoder, ex.train);
  }
};

TEST_CASE("empty inputs and invalid settings are rejected") {
  SmallRun run;
  CorefModel model(run.ex.model, run.ex.encoder, run.ex.data.vocab,
                   run.ex.data.affect_width(), 1);
  CHECK_THROWS_AS(Train(model, {}, {}, run.ex.train), Error);
  CHECK_THROWS_AS(Evaluate(model, {}, run.ex.data.resources(), "alarm"), Error);
  TrainConfig bad = run.ex.train;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  bad = run.ex.train;
  bad.learning_rate = 0;
  CHECK_THROWS_AS(bad.Validate(), ConfigError);
  CHECK_THROWS_AS(TrainConfigFromJson({{"optimizer", "lbfgs"}}), ConfigError);
}

TEST_CASE("the kept parameters are those of the best dev epoch") {
  SmallRun run;
  run.ex.train.epochs = 6;
  TrainResult r = run.Run();
  REQUIRE(r.history.size() == 6);
  for (const EpochRecord &e : r.history) CHECK(r.best_dev_f1 >= e.dev_f1);
  CHECK(r.history[r.best_epoch - 1].dev_f1 == r.best_dev_f1);
  // The first epoch reaching the best score wins.
  for (int e = 0; e < r.best_epoch - 1; ++e) CHECK(r.history[e].dev_f1 < r.best_dev_f1);
  EvalReport dev = Evaluate(r.model, run.ex.data.dev, run.ex.data.resources(), "alarm");
  CHECK(dev.f1_pos == r.best_dev_f1);
  CHECK(r.model.meta()["best_epoch"] == r.best_epoch);
  CHECK(r.model.meta()["config_fingerprint"] ==
        ConfigFingerprint(run.ex.model, run.ex.encoder, run.ex.train));

  // Each epoch reports the rate of its last step.
  const long batches = (static_cast<long>(run.ex.data.train.size()) + 15) / 16;
  for (const EpochRecord &e : r.history) {
    CHECK(e.learning_rate ==
          LearningRateAt(run.ex.train, e.epoch * batches - 1, 6 * batches));
  }
}

TEST_CASE("without a dev set the last epoch is kept") {
  SmallRun run;
  run.ex.data.dev.clear();
  TrainResult r = run.Run();
  CHECK(r.best_epoch == run.ex.train.epochs);
}

TEST_CASE("training is bit-for-bit deterministic") {
  SmallRun run;
  run.ex.train.optimizer = OptimizerKind::kSgdMomentum;
  run.ex.train.learning_rate = 0.05;
  TrainResult a = run.Run();
  TrainResult b = run.Run();
  CHECK(a.model.ToJson().dump() == b.model.ToJson().dump());
  run.ex.train.seed = 22;
  CHECK(run.Run().model.ToJson().dump() != a.model.ToJson().dump());
}

TEST_CASE("eight separable triples are fitted perfectly") {
  testing::SyntheticExperiment ex = testing::MakeSyntheticExperiment(5, 4);
  REQUIRE(ex.dataset.triples.size() == 8);
  ex.data.train = ex.dataset.triples;
  ex.data.dev.clear();
  ex.train.epochs = 20;
  ex.train.batch_size = 4;
  ex.train.learning_rate = 1e-2;
  ex.model.dropout = 0;
  TrainResult r = TrainModel(ex.data, ex.model, ex.encoder, ex.train);
  CHECK(Evaluate(r.model, ex.data.train, ex.data.resources(), "alarm").f1_pos == 1.0);
}

TEST_CASE("a non-finite loss aborts training") {
  SmallRun run;
  CorefModel model(run.ex.model, run.ex.encoder, run.ex.data.vocab,
                   run.ex.data.affect_width(), 1);
  model.params().Get("ffn4.b2").value(0, 0) = std::numeric_limits<double>::quiet_NaN();
  auto prepared = PrepareAll(model, run.ex.data.train, run.ex.data.resources());
  CHECK_THROWS_AS(Train(model, prepared, {}, run.ex.train), DivergenceError);
}

TEST_CASE("ablation axes and grids") {
  ModelConfig base;
  CHECK_FALSE(ApplyAblation(base, "-domain_kb").use_domain_kb);
  CHECK(ApplyAblation(base, "-domain_kb").use_general_kb);
  ModelConfig none = ApplyAblation(base, "-all_knowledge");
  CHECK_FALSE((none.use_domain_kb || none.use_general_kb || none.use_affect));
  CHECK(ApplyAblation(base, "+dot_attention").attention == AttentionVariant::kDot);
  CHECK(ApplyAblation(base, "-syntax_attention").attention == AttentionVariant::kNone);
  CHECK_THROWS_AS(ApplyAblation(base, "-bert"), ConfigError);
  CHECK_THROWS_AS(ApplyAblation(ApplyAblation(ApplyAblation(base, "-f_c"), "-f_k"), "-f_sk"),
                  ConfigError);
  CHECK(DefaultAblationGrid().size() == 9);
  CHECK(AblationGroup("-f_sk") == "score");
  CHECK(AblationGroup("-omcs") == "knowledge source");

  auto cells = ParseAblationGrid({{"cells", {"-f_c", {"-omcs", "-affect"}}}});
  REQUIRE(cells.size() == 2);
  CHECK(cells[1].name == "-omcs -affect");
  CHECK_THROWS_AS(ParseAblationGrid({{"cells", {"-nothing"}}}), ConfigError);
  CHECK_THROWS_AS(ParseAblationGrid({{"rows", {}}}), ConfigError);
  CHECK_THROWS_AS(ParseAblationGrid({{"cells", {42}}}), ConfigError);
}

TEST_CASE("a two-cell grid trains three distinct models") {
  SmallRun run;
  run.ex.train.epochs = 2;
  auto rows = Ablate(run.ex.data, run.ex.model, run.ex.encoder, run.ex.train,
                     ParseAblationGrid({{"cells", {"-f_c", "-omcs"}}}), 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].cell == "full");
  CHECK(rows[0].group == "");
  CHECK(rows[0].delta == 0.0);
  CHECK(rows[1].group == "score");
  std::set<std::string> fingerprints;
  for (const auto &row : rows) {
    fingerprints.insert(row.report.config_fingerprint);
    CHECK(row.delta == rows[0].report.f1_pos - row.report.f1_pos);
    CHECK(row.report.confusion.total() == static_cast<long>(run.ex.data.test.size()));
  }
  CHECK(fingerprints.size() == 3);

  std::string csv = AblationCsv(rows);
  CHECK(csv.rfind("comparison,model,f1_pos,delta,config_fingerprint\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.find("\nscore,-f_c,") != std::string::npos);

  // Parallel and serial runs agree.
  auto serial = Ablate(run.ex.data, run.ex.model, run.ex.encoder, run.ex.train,
                       ParseAblationGrid({{"cells", {"-f_c", "-omcs"}}}), 1);
  CHECK(AblationCsv(serial) == csv);
}

TEST_CASE("a model without knowledge ignores the knowledge files") {
  SmallRun run;
  TrainResult r = TrainModel(run.ex.data, ApplyAblation(run.ex.model, "-all_knowledge"),
                             run.ex.encoder, run.ex.train);
  for (const LabeledTriple &t : run.ex.data.test) {
    ScoreBundle with = r.model.Predict(t, run.ex.data.resources());
    ScoreBundle without = r.model.Predict(t, KnowledgeResources{});
    CHECK(with.f_hat == without.f_hat);
  }
}

TEST_CASE("knowledge decides the running example") {
  // Two distractors per review: without knowledge the best a model can do is
  // the base rate of one positive in three.
  testing::SyntheticExperiment ex = testing::MakeSyntheticExperiment(7, 100, 2);
  TrainResult full = TrainModel(ex.data, ex.model, ex.encoder, ex.train);
  TrainResult blind = TrainModel(ex.data, ApplyAblation(ex.model, "-all_knowledge"),
                                 ex.encoder, ex.train);
  LabeledTriple triple = RunningExampleTriple();
  double with = full.model.Predict(triple, ex.data.resources()).f_hat;
  double without = blind.model.Predict(triple, ex.data.resources()).f_hat;
  INFO("with " << with << " without " << without);
  CHECK(with > 0.5);
  CHECK(without <= 0.5);
}

}  // namespace
}  // namespace revcoref
