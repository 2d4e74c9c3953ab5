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

#ifndef REVCOREF_AUTODIFF_H_
#define REVCOREF_AUTODIFF_H_

#include <functional>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace revcoref {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

// A trainable tensor with its accumulated gradient and optimizer moments.
struct Parameter {
  Matrix value;
  Matrix grad;
  Matrix moment1;
  Matrix moment2;

  explicit Parameter(Matrix v = Matrix())
      : value(std::move(v)),
        grad(Matrix::Zero(value.rows(), value.cols())),
        moment1(Matrix::Zero(value.rows(), value.cols())),
        moment2(Matrix::Zero(value.rows(), value.cols())) {}
};

// Named parameters in deterministic (lexicographic) order.
class ParameterSet {
 public:
  Parameter &Add(const std::string &name, Matrix value);
  Parameter &Get(const std::string &name);
  const Parameter &Get(const std::string &name) const;
  bool Has(const std::string &name) const { return params_.count(name) > 0; }

  void ZeroGrad();
  size_t size() const { return params_.size(); }
  long TotalSize() const;

  std::map<std::string, Parameter> &items() { return params_; }
  const std::map<std::string, Parameter> &items() const { return params_; }

 private:
  std::map<std::string, Parameter> params_;
};

class Tape;

// Handle to a node on a Tape.
class Var {
 public:
  Var() = default;

  const Matrix &value() const;
  double scalar() const { return value()(0, 0); }
  long rows() const { return value().rows(); }
  long cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape *tape, int id) : tape_(tape), id_(id) {}

  Tape *tape_ = nullptr;
  int id_ = -1;
};

// Records a computation over small dense matrices and back-propagates a
// scalar loss into the Parameters it touched. Column vectors are n x 1;
// "rows" of attention scores are 1 x n.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Constant(Matrix value);
  // Leaf bound to a parameter; repeated calls reuse the same node.
  Var Param(Parameter &param);
  // Columns `ids` of an embedding table (dim x vocab).
  Var Gather(Parameter &table, const std::vector<int> &ids);

  Var MatMul(Var a, Var b);
  // Elementwise; `b` may also be a column vector broadcast across the
  // columns of `a`, or a 1 x 1 scalar.
  Var Add(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double s);
  // Elementwise product with a constant of the same shape.
  Var MulConst(Var a, const Matrix &c);
  Var Tanh(Var a);
  Var Sigmoid(Var a);

  Var VConcat(const std::vector<Var> &parts);
  Var HConcat(const std::vector<Var> &parts);
  Var Cols(Var a, int begin, int count);
  Var Col(Var a, int j) { return Cols(a, j, 1); }
  Var RepeatCols(Var column, int n);
  Var SumCols(Var a);  // rows x 1
  Var Transpose(Var a);
  // a(:, j) * row(0, j).
  Var ScaleCols(Var a, Var row);

  // b_j = w_j exp(f_j) / sum_k w_k exp(f_k) for a 1 x n row `f` and fixed
  // non-negative weights. At least one weight must be positive.
  Var WeightedSoftmax(Var f, const RowVector &weights);
  Var Softmax(Var f);
  Var SoftmaxRows(Var a);

  // Inverted dropout with keep probability 1 - rate.
  Var Dropout(Var a, double rate, std::mt19937_64 &rng);

  // Binary cross-entropy of sigmoid(logit) against `label`, with the
  // probability clamped to [eps, 1 - eps].
  Var BinaryCrossEntropy(Var logit, int label, double eps);

  // Back-propagates from a 1 x 1 root and adds leaf gradients into their
  // Parameters.
  void Backward(Var root, double seed = 1.0);

  size_t size() const { return nodes_.size(); }

 private:
  friend class Var;

  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void()> backward;
    Parameter *param = nullptr;
  };

  Var Push(Matrix value, std::function<void()> backward = nullptr);
  Node &node(Var v) { return nodes_[v.id_]; }
  Matrix &grad(int id) { return nodes_[id].grad; }
  const Matrix &val(int id) const { return nodes_[id].value; }

  std::vector<Node> nodes_;
  std::unordered_map<Parameter *, int> param_nodes_;
};

}  // namespace revcoref

#endif  // REVCOREF_AUTODIFF_H_
