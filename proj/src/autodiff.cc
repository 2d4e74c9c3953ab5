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

#include "revcoref/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "revcoref/error.h"

namespace revcoref {
namespace {

enum class Broadcast { kSame, kColumn, kScalar };

Broadcast ResolveBroadcast(const Matrix &a, const Matrix &b, const char *op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::kSame;
  if (b.cols() == 1 && b.rows() == a.rows()) return Broadcast::kColumn;
  if (b.rows() == 1 && b.cols() == 1) return Broadcast::kScalar;
  throw ShapeError(std::string(op) + ": cannot broadcast " +
                   std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                   " onto " + std::to_string(a.rows()) + "x" +
                   std::to_string(a.cols()));
}

Matrix Expand(const Matrix &b, const Matrix &like, Broadcast mode) {
  switch (mode) {
    case Broadcast::kSame: return b;
    case Broadcast::kColumn: return b.replicate(1, like.cols());
    default: return Matrix::Constant(like.rows(), like.cols(), b(0, 0));
  }
}

Matrix Reduce(const Matrix &g, Broadcast mode) {
  switch (mode) {
    case Broadcast::kSame: return g;
    case Broadcast::kColumn: return g.rowwise().sum();
    default: return Matrix::Constant(1, 1, g.sum());
  }
}

}  // namespace

Parameter &ParameterSet::Add(const std::string &name, Matrix value) {
  auto [it, inserted] = params_.try_emplace(name, std::move(value));
  if (!inserted) throw ConfigError("duplicate parameter " + name);
  return it->second;
}

Parameter &ParameterSet::Get(const std::string &name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter " + name);
  return it->second;
}

const Parameter &ParameterSet::Get(const std::string &name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw ConfigError("unknown parameter " + name);
  return it->second;
}

void ParameterSet::ZeroGrad() {
  for (auto &[name, p] : params_) p.grad.setZero();
}

long ParameterSet::TotalSize() const {
  long n = 0;
  for (const auto &[name, p] : params_) n += p.value.size();
  return n;
}

const Matrix &Var::value() const { return tape_->nodes_[id_].value; }

Var Tape::Push(Matrix value, std::function<void()> backward) {
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{std::move(value), Matrix(), std::move(backward)});
  return Var(this, id);
}

Var Tape::Constant(Matrix value) { return Push(std::move(value)); }

Var Tape::Param(Parameter &param) {
  auto it = param_nodes_.find(&param);
  if (it != param_nodes_.end()) return Var(this, it->second);
  Var v = Push(param.value);
  nodes_[v.id_].param = &param;
  param_nodes_[&param] = v.id_;
  return v;
}

Var Tape::Gather(Parameter &table, const std::vector<int> &ids) {
  Matrix out(table.value.rows(), static_cast<long>(ids.size()));
  for (size_t j = 0; j < ids.size(); ++j) {
    if (ids[j] < 0 || ids[j] >= table.value.cols()) {
      throw ShapeError("embedding id out of range");
    }
    out.col(static_cast<long>(j)) = table.value.col(ids[j]);
  }
  Var v = Push(std::move(out));
  int id = v.id_;
  Parameter *p = &table;
  nodes_[id].backward = [this, id, p, ids] {
    const Matrix &g = grad(id);
    for (size_t j = 0; j < ids.size(); ++j) {
      p->grad.col(ids[j]) += g.col(static_cast<long>(j));
    }
  };
  return v;
}

Var Tape::MatMul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Var v = Push(a.value() * b.value());
  int id = v.id_, ia = a.id_, ib = b.id_;
  nodes_[id].backward = [this, id, ia, ib] {
    grad(ia) += grad(id) * val(ib).transpose();
    grad(ib) += val(ia).transpose() * grad(id);
  };
  return v;
}

Var Tape::Add(Var a, Var b) {
  Broadcast mode = ResolveBroadcast(a.value(), b.value(), "add");
  Var v = Push(a.value() + Expand(b.value(), a.value(), mode));
  int id = v.id_, ia = a.id_, ib = b.id_;
  nodes_[id].backward = [this, id, ia, ib, mode] {
    grad(ia) += grad(id);
    grad(ib) += Reduce(grad(id), mode);
  };
  return v;
}

Var Tape::Mul(Var a, Var b) {
  Broadcast mode = ResolveBroadcast(a.value(), b.value(), "mul");
  Matrix bx = Expand(b.value(), a.value(), mode);
  Var v = Push(a.value().cwiseProduct(bx));
  int id = v.id_, ia = a.id_, ib = b.id_;
  nodes_[id].backward = [this, id, ia, ib, mode] {
    Matrix bx = Expand(val(ib), val(ia), mode);
    grad(ia) += grad(id).cwiseProduct(bx);
    grad(ib) += Reduce(grad(id).cwiseProduct(val(ia)), mode);
  };
  return v;
}

Var Tape::Scale(Var a, double s) {
  Var v = Push(a.value() * s);
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia, s] { grad(ia) += grad(id) * s; };
  return v;
}

Var Tape::MulConst(Var a, const Matrix &c) {
  if (c.rows() != a.rows() || c.cols() != a.cols()) {
    throw ShapeError("mul_const: shape mismatch");
  }
  Var v = Push(a.value().cwiseProduct(c));
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia, c] {
    grad(ia) += grad(id).cwiseProduct(c);
  };
  return v;
}

Var Tape::Tanh(Var a) {
  Var v = Push(a.value().array().tanh().matrix());
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia] {
    Matrix y = val(id);
    grad(ia) += grad(id).cwiseProduct(
        (1.0 - y.array().square()).matrix());
  };
  return v;
}

Var Tape::Sigmoid(Var a) {
  Var v = Push((1.0 / (1.0 + (-a.value().array()).exp())).matrix());
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia] {
    const Matrix &y = val(id);
    grad(ia) += grad(id).cwiseProduct(
        (y.array() * (1.0 - y.array())).matrix());
  };
  return v;
}

Var Tape::VConcat(const std::vector<Var> &parts) {
  if (parts.empty()) throw ShapeError("vconcat of nothing");
  long cols = parts[0].cols(), rows = 0;
  for (const Var &p : parts) {
    if (p.cols() != cols) throw ShapeError("vconcat: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  long r = 0;
  for (const Var &p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
    ids.push_back(p.id_);
  }
  Var v = Push(std::move(out));
  int id = v.id_;
  nodes_[id].backward = [this, id, ids] {
    long r = 0;
    for (int pid : ids) {
      long n = val(pid).rows();
      grad(pid) += grad(id).middleRows(r, n);
      r += n;
    }
  };
  return v;
}

Var Tape::HConcat(const std::vector<Var> &parts) {
  if (parts.empty()) throw ShapeError("hconcat of nothing");
  long rows = parts[0].rows(), cols = 0;
  for (const Var &p : parts) {
    if (p.rows() != rows) throw ShapeError("hconcat: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  long c = 0;
  for (const Var &p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
    ids.push_back(p.id_);
  }
  Var v = Push(std::move(out));
  int id = v.id_;
  nodes_[id].backward = [this, id, ids] {
    long c = 0;
    for (int pid : ids) {
      long n = val(pid).cols();
      grad(pid) += grad(id).middleCols(c, n);
      c += n;
    }
  };
  return v;
}

Var Tape::Cols(Var a, int begin, int count) {
  if (begin < 0 || count < 1 || begin + count > a.cols()) {
    throw ShapeError("column slice out of range");
  }
  Var v = Push(a.value().middleCols(begin, count));
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia, begin, count] {
    grad(ia).middleCols(begin, count) += grad(id);
  };
  return v;
}

Var Tape::RepeatCols(Var column, int n) {
  if (column.cols() != 1) throw ShapeError("repeat_cols expects a column");
  Var v = Push(column.value().replicate(1, n));
  int id = v.id_, ia = column.id_;
  nodes_[id].backward = [this, id, ia] {
    grad(ia) += grad(id).rowwise().sum();
  };
  return v;
}

Var Tape::SumCols(Var a) {
  Var v = Push(a.value().rowwise().sum());
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia] {
    grad(ia) += grad(id).replicate(1, val(ia).cols());
  };
  return v;
}

Var Tape::Transpose(Var a) {
  Var v = Push(a.value().transpose());
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia] {
    grad(ia) += grad(id).transpose();
  };
  return v;
}

Var Tape::ScaleCols(Var a, Var row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeError("scale_cols: weight row does not match columns");
  }
  Matrix out = a.value() * row.value().row(0).asDiagonal();
  Var v = Push(std::move(out));
  int id = v.id_, ia = a.id_, ir = row.id_;
  nodes_[id].backward = [this, id, ia, ir] {
    grad(ia) += grad(id) * val(ir).row(0).asDiagonal();
    grad(ir) += grad(id).cwiseProduct(val(ia)).colwise().sum();
  };
  return v;
}

Var Tape::WeightedSoftmax(Var f, const RowVector &weights) {
  if (f.rows() != 1 || f.cols() != weights.size()) {
    throw ShapeError("weighted softmax: shape mismatch");
  }
  double max_f = -std::numeric_limits<double>::infinity();
  for (long j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0) max_f = std::max(max_f, f.value()(0, j));
  }
  if (!std::isfinite(max_f)) {
    throw ShapeError("weighted softmax: all weights are zero");
  }
  Matrix out(1, weights.size());
  double total = 0;
  for (long j = 0; j < weights.size(); ++j) {
    out(0, j) = weights[j] > 0
                    ? weights[j] * std::exp(f.value()(0, j) - max_f)
                    : 0.0;
    total += out(0, j);
  }
  out /= total;
  Var v = Push(std::move(out));
  int id = v.id_, ia = f.id_;
  nodes_[id].backward = [this, id, ia] {
    const Matrix &b = val(id);
    const Matrix &g = grad(id);
    double dot = b.cwiseProduct(g).sum();
    grad(ia) += (b.array() * (g.array() - dot)).matrix();
  };
  return v;
}

Var Tape::Softmax(Var f) {
  return WeightedSoftmax(f, RowVector::Ones(f.cols()));
}

Var Tape::SoftmaxRows(Var a) {
  Matrix out = a.value();
  for (long r = 0; r < out.rows(); ++r) {
    double m = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  Var v = Push(std::move(out));
  int id = v.id_, ia = a.id_;
  nodes_[id].backward = [this, id, ia] {
    const Matrix &b = val(id);
    const Matrix &g = grad(id);
    Eigen::VectorXd dots = b.cwiseProduct(g).rowwise().sum();
    grad(ia) += (b.array() * (g.colwise() - dots).array()).matrix();
  };
  return v;
}

Var Tape::Dropout(Var a, double rate, std::mt19937_64 &rng) {
  if (rate <= 0) return a;
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(a.rows(), a.cols());
  for (long i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(rng) ? 1.0 / (1.0 - rate) : 0.0;
  }
  return MulConst(a, mask);
}

Var Tape::BinaryCrossEntropy(Var logit, int label, double eps) {
  if (logit.rows() != 1 || logit.cols() != 1) {
    throw ShapeError("cross-entropy expects a scalar logit");
  }
  double s = logit.scalar();
  double p = 1.0 / (1.0 + std::exp(-s));
  double pc = std::clamp(p, eps, 1.0 - eps);
  double loss = label ? -std::log(pc) : -std::log(1.0 - pc);
  Var v = Push(Matrix::Constant(1, 1, loss));
  int id = v.id_, ia = logit.id_;
  bool clamped = p < eps || p > 1.0 - eps;
  nodes_[id].backward = [this, id, ia, p, label, clamped] {
    if (clamped) return;
    grad(ia)(0, 0) += grad(id)(0, 0) * (p - label);
  };
  return v;
}

void Tape::Backward(Var root, double seed) {
  if (root.tape_ != this || root.rows() != 1 || root.cols() != 1) {
    throw ShapeError("backward expects a scalar root on this tape");
  }
  for (Node &n : nodes_) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  nodes_[root.id_].grad(0, 0) = seed;
  for (int i = root.id_; i >= 0; --i) {
    if (nodes_[i].backward) nodes_[i].backward();
  }
  for (Node &n : nodes_) {
    if (n.param) n.param->grad += n.grad;
  }
}

}  // namespace revcoref
