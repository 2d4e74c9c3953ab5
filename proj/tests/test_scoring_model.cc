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
#include <vector>

#include "doctest.h"
#include "revcoref/error.h"
#include "revcoref/model.h"
#include "revcoref/span_repr.h"
#include "revcoref/synthetic.h"
#include "revcoref/text_util.h"
#include "test_util.h"

namespace revcoref {
namespace {

// Plain evaluation of W2 tanh(W1 x + b1) + b2 straight from the parameters.
Eigen::VectorXd Ffn(const ParameterSet &params, const std::string &name,
                    const Eigen::VectorXd &x) {
  Eigen::VectorXd h = params.Get(name + ".w1").value * x + params.Get(name + ".b1").value;
  for (int i = 0; i < h.size(); ++i) h[i] = std::tanh(h[i]);
  return params.Get(name + ".w2").value * h + params.Get(name + ".b2").value;
}

Eigen::VectorXd Cat(std::initializer_list<Eigen::VectorXd> parts) {
  long n = 0;
  for (const auto &p : parts) n += p.size();
  Eigen::VectorXd out(n);
  long at = 0;
  for (const auto &p : parts) {
    out.segment(at, p.size()) = p;
    at += p.size();
  }
  return out;
}

std::vector<double> Softmax(const std::vector<double> &s) {
  double m = *std::max_element(s.begin(), s.end()), total = 0;
  std::vector<double> out;
  for (double v : s) total += std::exp(v - m);
  for (double v : s) out.push_back(std::exp(v - m) / total);
  return out;
}

// Fixed small parameters: entries follow a simple sine pattern.
ParameterSet HandParameters(int d, int hidden) {
  ParameterSet params;
  std::mt19937_64 rng(0);
  InitFfn(params, "ffn3", 3 * d, hidden, 1, rng);
  InitFfn(params, "ffn4", 3 * d, hidden, 1, rng);
  InitFfn(params, "ffn5", 3 * d, hidden, 1, rng);
  InitFfn(params, "ffn6", 5 * d, hidden, 1, rng);
  InitFfn(params, "ffn7", d, hidden, hidden, rng);
  InitFfn(params, "ffn8", hidden, hidden, 1, rng);
  int k = 1;
  for (auto &[name, p] : params.items()) {
    for (long i = 0; i < p.value.size(); ++i) p.value.data()[i] = 0.5 * std::sin(k++);
  }
  return params;
}

TEST_CASE("context score matches a hand computation on three tokens") {
  const int d = 2;
  ParameterSet params = HandParameters(d, 2);
  Matrix t(d, 3);
  t << 0.5, -1.0, 0.25,
       1.5,  0.3, -0.7;
  Eigen::VectorXd vm(2), vp(2);
  vm << 0.2, -0.4;
  vp << -0.9, 0.6;

  auto attend = [&](const Eigen::VectorXd &v) {
    std::vector<double> g;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd ti = t.col(i);
      g.push_back(Ffn(params, "ffn3", Cat({ti, v, ti.cwiseProduct(v)}))[0]);
    }
    std::vector<double> a = Softmax(g);
    Matrix w(d, 3);
    for (int i = 0; i < 3; ++i) w.col(i) = a[i] * t.col(i);
    return w;
  };
  Matrix wm = attend(vm), wp = attend(vp);
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(3 * d);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd a = wm.col(i), b = wp.col(i);
    pooled += Cat({a, b, a.cwiseProduct(b)});
  }
  const double expected = Ffn(params, "ffn4", pooled)[0];

  Tape tape;
  double f_c = ContextScore(tape, params, tape.Constant(t), tape.Constant(vm),
                            tape.Constant(vp), {})
                   .scalar();
  CHECK(f_c == doctest::Approx(expected).epsilon(1e-12));

  // One context token: both weights are 1.
  Eigen::VectorXd t1 = t.col(0);
  double single = ContextScore(tape, params, tape.Constant(t1), tape.Constant(vm),
                               tape.Constant(vp), {})
                      .scalar();
  CHECK(single ==
        doctest::Approx(Ffn(params, "ffn4", Cat({t1, t1, t1.cwiseProduct(t1)}))[0])
            .epsilon(1e-12));

  // A zero output layer leaves only the bias.
  params.Get("ffn4.w2").value.setZero();
  params.Get("ffn4.b2").value(0, 0) = -0.125;
  Tape fresh;
  CHECK(ContextScore(fresh, params, fresh.Constant(t), fresh.Constant(vm),
                     fresh.Constant(vp), {})
            .scalar() == -0.125);

  CHECK_THROWS_AS(ContextScore(fresh, params, fresh.Constant(Matrix::Ones(3, 2)),
                               fresh.Constant(vm), fresh.Constant(vp), {}),
                  ShapeError);
}

TEST_CASE("knowledge score matches a hand computation on two phrases") {
  const int d = 2;
  ParameterSet params = HandParameters(d, 3);
  Matrix k(d, 2);
  k << 0.4, -0.8,
       1.1, 0.2;
  Eigen::VectorXd vm(2), vp(2);
  vm << 0.3, 0.9;
  vp << -0.5, 0.1;

  std::vector<double> h;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd ki = k.col(i);
    h.push_back(Ffn(params, "ffn5", Cat({ki, vm, ki.cwiseProduct(vm)}))[0]);
  }
  std::vector<double> c = Softmax(h);
  Eigen::VectorXd v_hat = c[0] * k.col(0) + c[1] * k.col(1);
  double expected = Ffn(params, "ffn6", Cat({vm, vp, v_hat, vm.cwiseProduct(v_hat),
                                             vp.cwiseProduct(v_hat)}))[0];
  double literal = Ffn(params, "ffn6", Cat({vm, vp, v_hat, vp.cwiseProduct(v_hat),
                                            vp.cwiseProduct(v_hat)}))[0];

  Tape tape;
  Var attention;
  double f_k = KnowledgeScore(tape, params, tape.Constant(vm), tape.Constant(vp),
                              tape.Constant(k), false, {}, &attention)
                   .scalar();
  CHECK(f_k == doctest::Approx(expected).epsilon(1e-12));
  CHECK(attention.value()(0, 0) == doctest::Approx(c[0]).epsilon(1e-12));
  CHECK(attention.value()(0, 1) == doctest::Approx(c[1]).epsilon(1e-12));
  CHECK(KnowledgeScore(tape, params, tape.Constant(vm), tape.Constant(vp),
                       tape.Constant(k), true, {})
            .scalar() == doctest::Approx(literal).epsilon(1e-12));

  // A single phrase takes all the attention.
  Eigen::VectorXd k0 = k.col(0);
  KnowledgeScore(tape, params, tape.Constant(vm), tape.Constant(vp), tape.Constant(k0),
                 false, {}, &attention);
  CHECK(attention.value() == Matrix::Ones(1, 1));
}

TEST_CASE("syntax-knowledge score matches a hand computation") {
  const int d = 2;
  ParameterSet params = HandParameters(d, 2);
  Matrix k(d, 2), sm(d, 2), sp(d, 2);
  k << 0.6, -0.3,
       0.2, 0.9;
  sm << 1.0, 0.1,
        -0.5, 0.7;
  sp << 0.3, -1.2,
        0.8, 0.4;

  // M~ = softmax(S^T K / sqrt d) K^T, one row per syntax phrase.
  auto attend = [&](const Matrix &s) {
    Matrix out(s.cols(), d);
    for (int i = 0; i < s.cols(); ++i) {
      std::vector<double> scores;
      for (int j = 0; j < k.cols(); ++j) scores.push_back(s.col(i).dot(k.col(j)) / std::sqrt(2.0));
      std::vector<double> a = Softmax(scores);
      out.row(i) = (a[0] * k.col(0) + a[1] * k.col(1)).transpose();
    }
    return out;
  };
  Matrix am = attend(sm), ap = attend(sp);
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < am.rows(); ++i) {
    for (int j = 0; j < ap.rows(); ++j) {
      pooled += am.row(i).transpose().cwiseProduct(ap.row(j).transpose());
    }
  }
  double expected = Ffn(params, "ffn8", Ffn(params, "ffn7", pooled))[0];

  Tape tape;
  double f_sk = SyntaxKnowledgeScore(tape, params, tape.Constant(k), tape.Constant(sm),
                                     tape.Constant(sp), {})
                    .scalar();
  CHECK(f_sk == doctest::Approx(expected).epsilon(1e-12));

  // One of each: the interaction is the knowledge vector with itself.
  Eigen::VectorXd k0 = k.col(0), s0 = sm.col(0), p0 = sp.col(0);
  double single = SyntaxKnowledgeScore(tape, params, tape.Constant(k0), tape.Constant(s0),
                                       tape.Constant(p0), {})
                      .scalar();
  CHECK(single == doctest::Approx(Ffn(params, "ffn8", Ffn(params, "ffn7",
                                                          k0.cwiseProduct(k0)))[0])
                      .epsilon(1e-12));
}

TEST_CASE("cross-entropy loss") {
  CHECK(CrossEntropyLoss(std::vector<double>{0.5}, std::vector<int>{0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(CrossEntropyLoss(std::vector<double>{1 - 1e-7}, std::vector<int>{1}) < 1e-6);
  CHECK(CrossEntropyLoss(std::vector<double>{0.9, 0.2, 0.6}, std::vector<int>{1, 0, 0}) ==
        doctest::Approx(-(std::log(0.9) + std::log(0.8) + std::log(0.4)) / 3).epsilon(1e-15));
  // Clamping keeps certain mistakes finite.
  double worst = CrossEntropyLoss(std::vector<double>{0.0, 1.0}, std::vector<int>{1, 0});
  CHECK(std::isfinite(worst));
  CHECK(worst == doctest::Approx(-std::log(1e-7)).epsilon(1e-9));
  CHECK_THROWS_AS(CrossEntropyLoss(std::vector<double>{}, std::vector<int>{}), Error);
  CHECK_THROWS_AS(CrossEntropyLoss(std::vector<double>{0.5}, std::vector<int>{1, 0}),
                  ShapeError);
}

TEST_CASE("the fused probability and the decision threshold") {
  CHECK(Sigmoid(0) == 0.5);
  CHECK(Sigmoid(40) == doctest::Approx(1.0));
  CHECK(Sigmoid(-800) >= 0.0);
  CHECK(Sigmoid(800) <= 1.0);
  ScoreBundle b;
  b.f_hat = 0.5;
  CHECK(b.label() == 1);
  b.f_hat = std::nextafter(0.5, 0.0);
  CHECK(b.label() == 0);
}

struct ModelFixture {
  SyntheticDataset data = GenerateSynthetic({.reviews = 6});
  DomainKb kb = MineDomainKb(data.unlabeled, 1.0, "alarm");
  TripleStore general{data.general};
  KnowledgeResources resources{&kb, &general, &data.affect};
  ModelConfig config;
  EncoderConfig encoder;

  ModelFixture() {
    config.ffn_hidden = 6;
    encoder.embed_dim = 5;
    encoder.token_dim = 4;
    encoder.bucket_dim = 3;
  }
  CorefModel Make(uint64_t seed = 3) const {
    return CorefModel(config, encoder, SyntheticBaseVocabulary(), data.affect.width(), seed);
  }
};

TEST_CASE("predictions are the sigmoid of the summed head outputs") {
  ModelFixture f;
  CorefModel model = f.Make();
  for (const LabeledTriple &triple : f.data.triples) {
    PreparedExample ex = model.Prepare(triple, f.resources);
    ScoreBundle b = model.Predict(ex);
    CHECK(std::abs(b.f_hat - Sigmoid(b.f_c + b.f_k + b.f_sk)) <= 1e-9);
    CHECK(b.f_hat >= 0.0);
    CHECK(b.f_hat <= 1.0);
  }

  // Turning a head off in the checkpoint leaves the other heads untouched.
  PreparedExample ex = model.Prepare(RunningExampleTriple(), f.resources);
  ScoreBundle full = model.Predict(ex);
  nlohmann::json j = model.ToJson();
  j["model"]["enable_f_k"] = false;
  CorefModel without = CorefModel::FromJson(j);
  ScoreBundle partial = without.Predict(without.Prepare(RunningExampleTriple(), f.resources));
  CHECK(partial.f_k == 0.0);
  CHECK(partial.f_c == full.f_c);
  CHECK(partial.f_sk == full.f_sk);
  CHECK(std::abs(partial.f_hat - Sigmoid(full.f_c + full.f_sk)) <= 1e-12);

  j["model"]["enable_f_c"] = false;
  j["model"]["enable_f_sk"] = false;
  CHECK_THROWS_AS(CorefModel::FromJson(j), ConfigError);
}

TEST_CASE("reordering the knowledge leaves the knowledge scores unchanged") {
  ModelFixture f;
  CorefModel model = f.Make();
  PreparedExample ex = model.Prepare(RunningExampleTriple(), f.resources);
  REQUIRE(ex.knowledge_docs.size() >= 2);
  ScoreBundle before = model.Predict(ex);
  auto weights = model.KnowledgeWeights(ex);
  REQUIRE(weights.size() == ex.knowledge_docs.size());
  double total = 0;
  for (const auto &[text, w] : weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  std::reverse(ex.knowledge_docs.begin(), ex.knowledge_docs.end());
  std::reverse(ex.knowledge_spans.begin(), ex.knowledge_spans.end());
  std::reverse(ex.knowledge_texts.begin(), ex.knowledge_texts.end());
  ScoreBundle after = model.Predict(ex);
  CHECK(std::abs(after.f_k - before.f_k) <= 1e-12);
  CHECK(std::abs(after.f_sk - before.f_sk) <= 1e-12);
  CHECK(after.f_c == before.f_c);
  CHECK(model.KnowledgeWeights(ex).front().second ==
        doctest::Approx(weights.back().second).epsilon(1e-12));
}

TEST_CASE("empty knowledge and syntax sets fall back to learned sentinels") {
  ModelFixture f;
  CorefModel model = f.Make();
  auto doc = std::make_shared<const ParsedDocument>(testing::MakeDocument(
      "lone", {{{"Zyx", "NOUN", -1, "ROOT"}, {".", "PUNCT", 0, "punct"}},
               {{"It", "PRON", 1, "nsubj"},
                {"works", "VERB", -1, "ROOT", "NONE", "work"},
                {".", "PUNCT", 1, "punct"}}}));
  LabeledTriple triple{doc, MakeSpan(*doc, 0, 1, SpanKind::kMention),
                       MakeSpan(*doc, 2, 3, SpanKind::kAnaphor), 0};
  PreparedExample ex = model.Prepare(triple, f.resources);
  CHECK(ex.knowledge_docs.empty());
  CHECK(ex.mention_syntax.empty());
  CHECK_FALSE(ex.anaphor_syntax.empty());
  CHECK(model.KnowledgeWeights(ex).empty());

  model.params().Get("sentinel.f_sk").value(0, 0) = 0.375;
  ScoreBundle b = model.Predict(ex);
  CHECK(b.f_sk == 0.375);
  CHECK(std::isfinite(b.f_k));
  model.params().Get("sentinel.knowledge").value.array() += 0.5;
  CHECK(model.Predict(ex).f_k != b.f_k);
}

TEST_CASE("all head and sentinel gradients match finite differences") {
  for (const auto &[group, report] : testing::RunGradientSuite()) {
    INFO(group << " worst " << report.worst << " error " << report.max_relative_error);
    CHECK(report.checked > 0);
    CHECK(report.max_relative_error <= 1e-4);
  }
}

TEST_CASE("checkpoints round-trip exactly and reject damage") {
  ModelFixture f;
  f.config.literal_knowledge_features = true;
  CorefModel model = f.Make(11);
  model.meta()["note"] = "x";
  std::string dir = testing::ScratchDir("checkpoint");
  model.Save(dir + "/model.json");
  CorefModel back = CorefModel::Load(dir + "/model.json");
  CHECK(back.ToJson() == model.ToJson());
  CHECK(back.config().literal_knowledge_features);
  CHECK(back.meta()["note"] == "x");
  PreparedExample ex = model.Prepare(RunningExampleTriple(), f.resources);
  CHECK(back.Predict(ex).f_hat == model.Predict(ex).f_hat);
  back.Save(dir + "/again.json");
  CHECK(ReadFile(dir + "/again.json") == ReadFile(dir + "/model.json"));

  nlohmann::json j = model.ToJson();
  nlohmann::json missing = j;
  missing["parameters"].erase("ffn4.w1");
  CHECK_THROWS_AS(CorefModel::FromJson(missing), ConfigError);
  nlohmann::json shape = j;
  shape["parameters"]["ffn4.b2"]["rows"] = 2;
  CHECK_THROWS_AS(CorefModel::FromJson(shape), ShapeError);
  nlohmann::json extra = j;
  extra["parameters"]["ffn9.w1"] = j["parameters"]["ffn4.b2"];
  CHECK_THROWS_AS(CorefModel::FromJson(extra), ConfigError);
  nlohmann::json version = j;
  version["schema_version"] = 99;
  CHECK_THROWS_AS(CorefModel::FromJson(version), ConfigError);
  WriteFile(dir + "/bad.json", "{\"format\": \"revcoref-check");
  CHECK_THROWS(CorefModel::Load(dir + "/bad.json"));
}

TEST_CASE("models built with the same seed are identical") {
  ModelFixture f;
  CHECK(f.Make(5).ToJson() == f.Make(5).ToJson());
  CHECK(f.Make(5).ToJson() != f.Make(6).ToJson());
  CHECK(f.Make().params().Get("sentinel.f_sk").value(0, 0) == 0.0);
}

}  // namespace
}  // namespace revcoref
