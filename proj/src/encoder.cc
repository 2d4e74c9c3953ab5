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

#include "revcoref/encoder.h"

#include <fstream>
#include <sstream>

#include "revcoref/error.h"
#include "revcoref/text_util.h"

namespace revcoref {

using nlohmann::json;

void EncoderConfig::Validate() const {
  if (embed_dim <= 0) throw ConfigError("embed_dim must be positive");
  if (token_dim <= 0) throw ConfigError("token_dim must be positive");
  if (max_seq_len <= 0) throw ConfigError("max_seq_len must be positive");
  if (attention_window < 1) throw ConfigError("attention_window must be >= 1");
  if (bucket_dim <= 0) throw ConfigError("bucket_dim must be positive");
  if (length_buckets.empty() || length_buckets.front() != 1) {
    throw ConfigError("length buckets must start at 1");
  }
  for (size_t i = 1; i < length_buckets.size(); ++i) {
    if (length_buckets[i] <= length_buckets[i - 1]) {
      throw ConfigError("length buckets must be strictly increasing");
    }
  }
  if (mode == EncoderMode::kFrozenPretrained && frozen_path.empty()) {
    throw ConfigError("frozen encoder mode needs frozen_path");
  }
}

json EncoderConfigToJson(const EncoderConfig &c) {
  return json{
      {"mode", c.mode == EncoderMode::kToyTrainable ? "TOY_TRAINABLE"
                                                    : "FROZEN_PRETRAINED"},
      {"embed_dim", c.embed_dim},
      {"token_dim", c.token_dim},
      {"max_seq_len", c.max_seq_len},
      {"attention_window", c.attention_window},
      {"length_buckets", c.length_buckets},
      {"bucket_dim", c.bucket_dim},
      {"frozen_path", c.frozen_path},
  };
}

EncoderConfig EncoderConfigFromJson(const json &j) {
  EncoderConfig c;
  if (j.contains("mode")) {
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "TOY_TRAINABLE") {
      c.mode = EncoderMode::kToyTrainable;
    } else if (mode == "FROZEN_PRETRAINED") {
      c.mode = EncoderMode::kFrozenPretrained;
    } else {
      throw ConfigError("unknown encoder mode " + mode);
    }
  }
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.token_dim = j.value("token_dim", c.token_dim);
  c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
  c.attention_window = j.value("attention_window", c.attention_window);
  c.length_buckets = j.value("length_buckets", c.length_buckets);
  c.bucket_dim = j.value("bucket_dim", c.bucket_dim);
  c.frozen_path = j.value("frozen_path", c.frozen_path);
  c.Validate();
  return c;
}

int LengthBucket(int num_words, const std::vector<int> &buckets) {
  int b = 0;
  for (int i = 0; i < static_cast<int>(buckets.size()); ++i) {
    if (num_words >= buckets[i]) b = i;
  }
  return b;
}

EncodedDoc SubTokenize(const ParsedDocument &doc,
                       const SubwordTokenizer &tokenizer,
                       const AffectLexicon *affect, int affect_width) {
  EncodedDoc out;
  out.doc_id = doc.doc_id;
  std::vector<Eigen::VectorXd> columns;
  for (int w = 0; w < doc.size(); ++w) {
    std::vector<int> ids = tokenizer.TokenizeWord(doc.tokens[w].surface);
    if (ids.empty()) ids.push_back(0);
    out.first_piece.push_back(out.num_pieces());
    Eigen::VectorXd a = affect ? affect->Vector(doc.tokens[w])
                               : Eigen::VectorXd::Zero(affect_width);
    for (int id : ids) {
      out.piece_ids.push_back(id);
      out.word_of_piece.push_back(w);
      columns.push_back(a);
    }
    out.last_piece.push_back(out.num_pieces() - 1);
  }
  out.affect = Matrix::Zero(affect_width, out.num_pieces());
  for (int p = 0; p < out.num_pieces(); ++p) out.affect.col(p) = columns[p];
  return out;
}

FrozenEmbeddings FrozenEmbeddings::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frozen embeddings: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# revcoref-frozen v1 dim=", 0) != 0) {
    throw IngestError(path, 1, "<header>",
                      "expected '# revcoref-frozen v1 dim=<k>'");
  }
  FrozenEmbeddings table;
  table.dim_ = std::stoi(line.substr(line.find('=') + 1));
  if (table.dim_ <= 0) throw IngestError(path, 1, "dim", "must be positive");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    auto cols = Split(line, '\t');
    if (cols.size() != 3) throw IngestError(path, row, "<row>", "expected 3 columns");
    auto values = SplitWhitespace(cols[2]);
    if (static_cast<int>(values.size()) != table.dim_) {
      throw IngestError(path, row, "vector", "wrong width");
    }
    Eigen::VectorXd v(table.dim_);
    try {
      for (int k = 0; k < table.dim_; ++k) v[k] = std::stod(values[k]);
      table.Set(cols[0], std::stoi(cols[1]), v);
    } catch (const std::invalid_argument &) {
      throw IngestError(path, row, "vector", "not a number");
    }
  }
  return table;
}

void FrozenEmbeddings::Save(const std::string &path) const {
  std::ostringstream out;
  out.precision(17);
  out << "# revcoref-frozen v1 dim=" << dim_ << "\n";
  for (const auto &[doc_id, pieces] : table_) {
    for (const auto &[p, v] : pieces) {
      out << doc_id << '\t' << p << '\t';
      for (int k = 0; k < v.size(); ++k) out << (k ? " " : "") << v[k];
      out << '\n';
    }
  }
  WriteFile(path, out.str());
}

void FrozenEmbeddings::Set(const std::string &doc_id, int piece,
                           const Eigen::VectorXd &v) {
  if (dim_ == 0) dim_ = static_cast<int>(v.size());
  if (v.size() != dim_) throw ShapeError("frozen vector width mismatch");
  table_[doc_id][piece] = v;
}

Matrix FrozenEmbeddings::Lookup(const std::string &doc_id,
                                int num_pieces) const {
  auto it = table_.find(doc_id);
  if (it == table_.end()) throw Error("no frozen embeddings for " + doc_id);
  Matrix out(dim_, num_pieces);
  for (int p = 0; p < num_pieces; ++p) {
    auto pit = it->second.find(p);
    if (pit == it->second.end()) {
      throw Error("frozen embeddings for " + doc_id + " miss piece " +
                  std::to_string(p));
    }
    out.col(p) = pit->second;
  }
  return out;
}

TokenEncoder::TokenEncoder(const EncoderConfig &config, int vocab_size,
                           int affect_width, bool use_affect,
                           const FrozenEmbeddings *frozen)
    : config_(config),
      vocab_size_(vocab_size),
      affect_width_(affect_width),
      use_affect_(use_affect && affect_width > 0),
      frozen_(frozen) {
  if (config_.mode == EncoderMode::kFrozenPretrained && !frozen_) {
    throw ConfigError("frozen encoder mode without embeddings");
  }
}

int TokenEncoder::input_dim() const {
  int base = config_.mode == EncoderMode::kToyTrainable ? config_.token_dim
                                                        : frozen_->dim();
  return base + (use_affect_ ? affect_width_ : 0);
}

void TokenEncoder::InitParameters(ParameterSet &params,
                                  std::mt19937_64 &rng) const {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto uniform = [&](long r, long c, double scale) {
    Matrix m(r, c);
    for (long i = 0; i < m.size(); ++i) m.data()[i] = scale * unit(rng);
    return m;
  };
  if (config_.mode == EncoderMode::kToyTrainable) {
    params.Add("embed.table", uniform(config_.token_dim, vocab_size_, 0.5));
  }
  int in = input_dim();
  double limit = std::sqrt(6.0 / (in + config_.embed_dim));
  params.Add("embed.proj.w", uniform(config_.embed_dim, in, limit));
  params.Add("embed.proj.b", Matrix::Zero(config_.embed_dim, 1));
}

Var TokenEncoder::Encode(Tape &tape, ParameterSet &params,
                         const EncodedDoc &doc) const {
  if (doc.num_pieces() == 0) throw Error("cannot encode an empty input");
  Var base;
  if (config_.mode == EncoderMode::kToyTrainable) {
    base = tape.Gather(params.Get("embed.table"), doc.piece_ids);
  } else {
    base = tape.Constant(frozen_->Lookup(doc.doc_id, doc.num_pieces()));
  }
  if (use_affect_) base = tape.VConcat({base, tape.Constant(doc.affect)});
  Var projected =
      tape.MatMul(tape.Param(params.Get("embed.proj.w")), base);
  return tape.Add(projected, tape.Param(params.Get("embed.proj.b")));
}

}  // namespace revcoref
