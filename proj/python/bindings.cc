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

// Python extension `revcoref._revcoref`. Structured results cross the
// boundary as JSON text; the package wrapper turns them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "revcoref/cli.h"
#include "revcoref/corpus.h"
#include "revcoref/domain_kb.h"
#include "revcoref/error.h"
#include "revcoref/general_kb.h"
#include "revcoref/model.h"
#include "revcoref/pipeline.h"
#include "revcoref/text_util.h"

namespace py = pybind11;
using nlohmann::json;

namespace revcoref {
namespace {

std::tuple<int, std::string, std::string> PyRunCli(const std::vector<std::string> &args) {
  std::vector<const char *> argv = {"revcoref"};
  for (const auto &a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return {code, out.str(), err.str()};
}

std::string PyMine(const std::string &corpus, double rho, const std::string &domain) {
  py::gil_scoped_release release;
  return DomainKbToJson(MineDomainKb(IngestParsedCorpus(corpus, domain), rho, domain));
}

std::string PyPipeline(const std::string &config_path, const std::string &output_dir,
                       std::optional<uint64_t> seed) {
  RunConfig config = LoadRunConfig(config_path);
  if (!output_dir.empty()) config.paths.output_dir = output_dir;
  if (seed) config.seed = *seed;
  py::gil_scoped_release release;
  return RunPipeline(config).dump(1);
}

// A loaded checkpoint with the knowledge files it was trained with.
class PyModel {
 public:
  PyModel(const std::string &checkpoint, const std::string &kb_path,
          const std::string &triple_store, const std::string &affect)
      : model_(CorefModel::Load(checkpoint)) {
    if (!kb_path.empty()) kb_ = LoadDomainKb(kb_path);
    if (!triple_store.empty()) general_ = LoadTripleStore(triple_store);
    if (!affect.empty()) affect_ = LoadAffectLexicon(affect);
  }

  std::string Config() const { return ModelConfigToJson(model_.config()).dump(); }

  std::string Score(const std::string &doc_json, std::pair<int, int> mention,
                    std::pair<int, int> anaphor) const {
    auto doc = std::make_shared<const ParsedDocument>(
        DocumentFromJson(json::parse(doc_json), "<python>", 1));
    LabeledTriple triple{doc, MakeSpan(*doc, mention.first, mention.second, SpanKind::kMention),
                         MakeSpan(*doc, anaphor.first, anaphor.second, SpanKind::kAnaphor), 0};
    KnowledgeResources res{kb_ ? &*kb_ : nullptr, general_ ? &*general_ : nullptr,
                           affect_ ? &*affect_ : nullptr};
    PreparedExample prepared = model_.Prepare(triple, res);
    ScoreBundle s = model_.Predict(prepared);
    json knowledge = json::array();
    for (const auto &[phrase, weight] : model_.KnowledgeWeights(prepared)) {
      knowledge.push_back({{"phrase", phrase}, {"weight", weight}});
    }
    return json{{"f_c", s.f_c},   {"f_k", s.f_k},         {"f_sk", s.f_sk},
                {"f_hat", s.f_hat}, {"label", s.label()}, {"knowledge", knowledge}}
        .dump();
  }

 private:
  CorefModel model_;
  std::optional<DomainKb> kb_;
  std::optional<TripleStore> general_;
  std::optional<AffectLexicon> affect_;
};

}  // namespace
}  // namespace revcoref

PYBIND11_MODULE(_revcoref, m) {
  using namespace revcoref;
  m.doc() = "Knowledge-aware coreference classifier for product reviews";

  auto base = py::register_exception<Error>(m, "RevcorefError", PyExc_RuntimeError);
  // Registered after the base so the more specific types win.
  py::register_exception<IngestError>(m, "IngestError", base);
  py::register_exception<StructuralError>(m, "StructuralError", base);
  py::register_exception<ShapeError>(m, "ShapeError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<DivergenceError>(m, "DivergenceError", base);
  py::register_exception<StageError>(m, "StageError", base);

  m.def("run_cli", &PyRunCli, py::arg("args"),
        "Runs the revcoref command line; returns (exit_code, stdout, stderr).");
  m.def("mine_domain_kb_json", &PyMine, py::arg("corpus"), py::arg("rho") = 5.0,
        py::arg("domain") = "");
  m.def("run_pipeline_json", &PyPipeline, py::arg("config"), py::arg("output_dir") = "",
        py::arg("seed") = std::nullopt);
  m.def("sigmoid", &Sigmoid, py::arg("x"));
  m.attr("DECISION_THRESHOLD") = kDecisionThreshold;

  py::class_<PyModel>(m, "_Model")
      .def(py::init<const std::string &, const std::string &, const std::string &,
                    const std::string &>(),
           py::arg("checkpoint"), py::arg("kb") = "", py::arg("triple_store") = "",
           py::arg("affect") = "")
      .def("config_json", &PyModel::Config)
      .def("score_json", &PyModel::Score, py::arg("doc"), py::arg("mention"),
           py::arg("anaphor"));
}
