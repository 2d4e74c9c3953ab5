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

#include "revcoref/span_repr.h"

#include <cmath>

#include "revcoref/error.h"
#include "revcoref/syntax.h"

namespace revcoref {

std::string_view AttentionVariantName(AttentionVariant v) {
  switch (v) {
    case AttentionVariant::kSyntax: return "SYNTAX";
    case AttentionVariant::kDot: return "DOT";
    default: return "NONE";
  }
}

AttentionVariant ParseAttentionVariant(std::string_view name) {
  if (name == "SYNTAX") return AttentionVariant::kSyntax;
  if (name == "DOT") return AttentionVariant::kDot;
  if (name == "NONE") return AttentionVariant::kNone;
  throw ConfigError("unknown attention variant " + std::string(name));
}

void InitFfn(ParameterSet &params, const std::string &name, int in, int hidden,
             int out, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto xavier = [&](int rows, int cols) {
    double limit = std::sqrt(6.0 / (rows + cols));
    Matrix m(rows, cols);
    for (long i = 0; i < m.size(); ++i) m.data()[i] = limit * unit(rng);
    return m;
  };
  params.Add(name + ".w1", xavier(hidden, in));
  params.Add(name + ".b1", Matrix::Zero(hidden, 1));
  params.Add(name + ".w2", xavier(out, hidden));
  params.Add(name + ".b2", Matrix::Zero(out, 1));
}

Var ApplyFfn(Tape &tape, ParameterSet &params, const std::string &name, Var x,
             const DropoutContext &dropout) {
  if (dropout.rng) x = tape.Dropout(x, dropout.rate, *dropout.rng);
  Var h = tape.Tanh(tape.Add(tape.MatMul(tape.Param(params.Get(name + ".w1")), x),
                             tape.Param(params.Get(name + ".b1"))));
  return tape.Add(tape.MatMul(tape.Param(params.Get(name + ".w2")), h),
                  tape.Param(params.Get(name + ".b2")));
}

SpanInput PrepareSpanInput(const Span &span, const ParsedDocument &doc,
                           const EncodedDoc &encoded,
                           const EncoderConfig &config) {
  ValidateSpan(doc, span);
  SpanInput in;
  in.piece_begin = encoded.first_piece[span.start];
  in.piece_count = encoded.last_piece[span.end - 1] - in.piece_begin + 1;
  in.head_offset = encoded.first_piece[span.head] - in.piece_begin;
  in.bucket = LengthBucket(span.size(), config.length_buckets);

  std::vector<int> dist = SpanDependencyDistances(doc, span);
  in.weights = RowVector::Zero(in.piece_count);
  for (int p = 0; p < in.piece_count; ++p) {
    int word = encoded.word_of_piece[in.piece_begin + p];
    int l = dist[word - span.start];
    if (l >= 0 && l <= config.attention_window) {
      in.weights[p] = std::ldexp(1.0, -l);
    }
  }
  return in;
}

void InitSpanParameters(ParameterSet &params, const EncoderConfig &config,
                        int ffn_hidden, std::mt19937_64 &rng) {
  int d = config.embed_dim;
  InitFfn(params, "ffn1", 3 * d, ffn_hidden, 1, rng);
  InitFfn(params, "ffn2", 3 * d + config.bucket_dim, ffn_hidden, d, rng);
  std::uniform_real_distribution<double> unit(-0.1, 0.1);
  Matrix table(config.bucket_dim,
               static_cast<long>(config.length_buckets.size()));
  for (long i = 0; i < table.size(); ++i) table.data()[i] = unit(rng);
  params.Add("span.length", std::move(table));
}

SpanVectorResult ComputeSpanVector(Tape &tape, ParameterSet &params,
                                   Var doc_embeds, const SpanInput &span,
                                   AttentionVariant variant,
                                   const DropoutContext &dropout) {
  const int n = span.piece_count;
  Var x = tape.Cols(doc_embeds, span.piece_begin, n);
  Var head = tape.Col(x, span.head_offset);
  const double d = static_cast<double>(x.rows());

  Var attention;
  switch (variant) {
    case AttentionVariant::kSyntax: {
      Var heads = tape.RepeatCols(head, n);
      Var features = tape.VConcat({x, heads, tape.Mul(x, heads)});
      Var f = ApplyFfn(tape, params, "ffn1", features, dropout);
      if ((span.weights.array() > 0).any()) {
        attention = tape.WeightedSoftmax(f, span.weights);
      } else {
        // Every token lies beyond the window: fall back to the head alone.
        Matrix onehot = Matrix::Zero(1, n);
        onehot(0, span.head_offset) = 1.0;
        attention = tape.Constant(std::move(onehot));
      }
      break;
    }
    case AttentionVariant::kDot: {
      Var f = tape.Scale(tape.MatMul(tape.Transpose(head), x), 1.0 / std::sqrt(d));
      attention = tape.Softmax(f);
      break;
    }
    case AttentionVariant::kNone:
      attention = tape.Constant(Matrix::Constant(1, n, 1.0 / n));
      break;
  }

  Var pooled = tape.MatMul(x, tape.Transpose(attention));
  Var length = tape.Gather(params.Get("span.length"), {span.bucket});
  Var features = tape.VConcat(
      {tape.Col(x, 0), tape.Col(x, n - 1), pooled, length});
  return {ApplyFfn(tape, params, "ffn2", features, dropout), attention};
}

}  // namespace revcoref
