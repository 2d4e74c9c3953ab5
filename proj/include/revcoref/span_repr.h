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

#ifndef REVCOREF_SPAN_REPR_H_
#define REVCOREF_SPAN_REPR_H_

#include <random>
#include <string>

#include "revcoref/autodiff.h"
#include "revcoref/corpus.h"
#include "revcoref/encoder.h"

namespace revcoref {

enum class AttentionVariant {
  kSyntax,  // exp(f_i) / 2^l_i within the window
  kDot,     // softmax of scaled dot products with the head
  kNone,    // plain average
};

std::string_view AttentionVariantName(AttentionVariant v);
AttentionVariant ParseAttentionVariant(std::string_view name);

// Dropout applied at FFN inputs. A null rng means evaluation mode.
struct DropoutContext {
  double rate = 0;
  std::mt19937_64 *rng = nullptr;
};

// One-hidden-layer feed-forward block: W2 tanh(W1 x + b1) + b2, applied
// column-wise. Parameters are stored as <name>.w1, .b1, .w2, .b2.
void InitFfn(ParameterSet &params, const std::string &name, int in, int hidden,
             int out, std::mt19937_64 &rng);
Var ApplyFfn(Tape &tape, ParameterSet &params, const std::string &name, Var x,
             const DropoutContext &dropout);

// Parameter-free description of a span over an encoded document.
struct SpanInput {
  int piece_begin = 0;
  int piece_count = 0;
  int head_offset = 0;  // first piece of the head word, relative to begin
  RowVector weights;    // 2^-l per piece, 0 outside the attention window
  int bucket = 0;       // length bucket
};

// Sub-tokens inherit the dependency distance of their word.
SpanInput PrepareSpanInput(const Span &span, const ParsedDocument &doc,
                           const EncodedDoc &encoded,
                           const EncoderConfig &config);

struct SpanVectorResult {
  Var vector;     // d x 1
  Var attention;  // 1 x piece_count
};

// Initializes ffn1 (attention score), ffn2 (span projection) and the length
// bucket table.
void InitSpanParameters(ParameterSet &params, const EncoderConfig &config,
                        int ffn_hidden, std::mt19937_64 &rng);

// Span vector from the document embeddings `doc_embeds` (d x pieces):
//   f_i = ffn1([x_i, x_head, x_i * x_head])
//   b   = attention weights per `variant`
//   v   = ffn2([x_start, x_end, sum_i b_i x_i, length_embedding])
SpanVectorResult ComputeSpanVector(Tape &tape, ParameterSet &params,
                                   Var doc_embeds, const SpanInput &span,
                                   AttentionVariant variant,
                                   const DropoutContext &dropout);

}  // namespace revcoref

#endif  // REVCOREF_SPAN_REPR_H_
