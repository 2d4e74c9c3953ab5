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

#ifndef REVCOREF_ENCODER_H_
#define REVCOREF_ENCODER_H_

#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "revcoref/autodiff.h"
#include "revcoref/corpus.h"
#include "revcoref/general_kb.h"
#include "revcoref/tokenizer.h"

namespace revcoref {

enum class EncoderMode { kToyTrainable, kFrozenPretrained };

struct EncoderConfig {
  EncoderMode mode = EncoderMode::kToyTrainable;
  int embed_dim = 32;     // d, width of token embeddings and span vectors
  int token_dim = 32;     // width of the trainable lookup table (TOY mode)
  int max_seq_len = 256;  // sub-tokens of context fed to the context score
  int attention_window = 2;  // L
  // Lower bounds of the span-length buckets, in words.
  std::vector<int> length_buckets = {1, 2, 3, 4, 5, 8, 16};
  int bucket_dim = 20;
  std::string frozen_path;  // FROZEN_PRETRAINED only

  void Validate() const;
};

nlohmann::json EncoderConfigToJson(const EncoderConfig &config);
EncoderConfig EncoderConfigFromJson(const nlohmann::json &j);

// Bucket index of a span of `num_words` words.
int LengthBucket(int num_words, const std::vector<int> &buckets);

// Sub-token view of a document. Piece p belongs to word word_of_piece[p];
// word w covers pieces [first_piece[w], last_piece[w]].
struct EncodedDoc {
  std::string doc_id;
  std::vector<int> piece_ids;
  std::vector<int> word_of_piece;
  std::vector<int> first_piece;
  std::vector<int> last_piece;
  Matrix affect;  // affect_width x pieces; each piece carries its word's

  int num_pieces() const { return static_cast<int>(piece_ids.size()); }
};

// `affect` may be null; `affect_width` is then used for zero rows.
EncodedDoc SubTokenize(const ParsedDocument &doc,
                       const SubwordTokenizer &tokenizer,
                       const AffectLexicon *affect, int affect_width);

// Offline contextual embeddings keyed by (doc_id, sub-token index).
//
// Text format, one vector per line after a header:
//   # revcoref-frozen v1 dim=<k>
//   <doc_id>\t<piece index>\t<v1> <v2> ... <vk>
class FrozenEmbeddings {
 public:
  FrozenEmbeddings() = default;

  static FrozenEmbeddings Load(const std::string &path);
  void Save(const std::string &path) const;

  void Set(const std::string &doc_id, int piece, const Eigen::VectorXd &v);
  // dim x num_pieces; throws Error if any piece is missing.
  Matrix Lookup(const std::string &doc_id, int num_pieces) const;
  int dim() const { return dim_; }

 private:
  int dim_ = 0;
  std::map<std::string, std::map<int, Eigen::VectorXd>> table_;
};

// Produces width-d token embeddings: a trainable lookup table (TOY) or the
// frozen vectors, optionally concatenated with affect vectors, followed by a
// trainable projection.
class TokenEncoder {
 public:
  TokenEncoder(const EncoderConfig &config, int vocab_size, int affect_width,
               bool use_affect, const FrozenEmbeddings *frozen);

  void InitParameters(ParameterSet &params, std::mt19937_64 &rng) const;

  // d x num_pieces embeddings of the whole document.
  Var Encode(Tape &tape, ParameterSet &params, const EncodedDoc &doc) const;

  int input_dim() const;

 private:
  EncoderConfig config_;
  int vocab_size_;
  int affect_width_;
  bool use_affect_;
  const FrozenEmbeddings *frozen_;
};

}  // namespace revcoref

#endif  // REVCOREF_ENCODER_H_
