// Copyright 2026 The s2screen Authors.
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

// Reverse-mode differentiation over dense double matrices.
//
// A Tape records every primitive application in creation order, which is a
// topological order of the computation graph. Parameters live outside the
// tape in a ParameterSet; Tape::leaf() binds a parameter into the graph and
// Tape::backward() accumulates dLoss/dParameter into Parameter::grad.
//
// All tensors are two-dimensional. Scalars are 1x1 and row vectors are 1xC.

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s2screen/core.hpp"

namespace s2::ad {

struct Parameter {
  std::string name;
  Matrix value;
  // Empty until a backward pass reaches the parameter.
  std::optional<Matrix> grad;
};

// Ordered, name-addressable parameter collection with stable references.
class ParameterSet {
 public:
  Parameter& add(std::string name, Matrix value);
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;

  // Parameters whose names start with |prefix|, in insertion order.
  std::vector<Parameter*> with_prefix(std::string_view prefix);
  std::vector<Parameter*> all();

  void clear_grads();

  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::deque<Parameter> items_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

class Tape;

// Lightweight handle to a tape node.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
  bool requires_grad() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// View handed to a backward rule: upstream gradient, forward values, and
// gradient sinks for the inputs that require one.
class BackwardContext {
 public:
  const Matrix& grad() const { return *grad_; }
  const Matrix& output() const { return *output_; }
  const Matrix& input(std::size_t i) const { return *inputs_[i]; }
  bool needs_grad(std::size_t i) const { return sinks_[i] != nullptr; }

  template <typename Derived>
  void accumulate(std::size_t i, const Eigen::MatrixBase<Derived>& g) {
    Matrix* sink = sinks_[i];
    if (sink == nullptr) return;
    if (sink->size() == 0) {
      *sink = g;
    } else {
      *sink += g;
    }
  }

 private:
  friend class Tape;
  const Matrix* grad_ = nullptr;
  const Matrix* output_ = nullptr;
  std::vector<const Matrix*> inputs_;
  std::vector<Matrix*> sinks_;
};

using BackwardFn = std::function<void(BackwardContext&)>;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var leaf(Parameter& parameter);

  // Appends a node computed from |inputs|. |backward| is invoked only when
  // some input requires a gradient.
  Var record(Matrix value, std::vector<Var> inputs, BackwardFn backward);

  // Propagates dLoss/dNode for every node, then adds the leaf gradients into
  // the bound parameters. Throws ShapeError unless |loss| is 1x1.
  void backward(Var loss);

  // Gradient of the last backward pass at |v| (zeros if unreached).
  Matrix grad(Var v) const;

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Piecewise primitives fold their branch pattern into this hash so that a
  // finite-difference probe can tell when it crossed a kink.
  void note_branch(std::uint64_t pattern);
  std::uint64_t branch_signature() const { return branch_signature_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter* parameter = nullptr;
  };

  std::deque<Node> nodes_;
  std::map<Parameter*, std::size_t> leaves_;
  std::uint64_t branch_signature_ = 0xcbf29ce484222325ULL;
};

// ---- primitives -----------------------------------------------------------
// Elementwise binary operations broadcast a 1xC row, an Rx1 column, or a 1x1
// scalar operand against the other operand.

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var relu(Var a);
Var sigmoid(Var a);
Var exp(Var a);
// Throws std::domain_error on a non-positive entry.
Var log(Var a);
Var clamp(Var a, double lo, double hi);
Var scalar_scale(Var a, double s);
Var add_scalar(Var a, double s);
Var softmax_rows(Var a);
Var log_softmax_rows(Var a);
Var layer_norm_rows(Var a, double eps = 1e-5);
// 1xC column means.
Var mean_rows(Var a);
// |mask| is R x A with 0/1 entries; row r of the result averages the rows
// of |a| selected by mask row r. Throws std::invalid_argument on an empty
// mask row.
Var masked_mean_rows(Var a, const Matrix& mask);
Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var row_l2_normalize(Var a, double eps = 1e-12);
Var sum(Var a);
Var gather_rows(Var a, std::span<const int> rows);
// N x N -> N x 1.
Var diagonal(Var a);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator-(Var a) { return scalar_scale(a, -1.0); }

// x * W + b with b broadcast over rows.
inline Var affine(Var x, Var w, Var b) { return add(matmul(x, w), b); }

// ---- optimizer ------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  std::int64_t step_count() const { return step_; }

 private:
  friend void adam_step(std::span<Parameter* const>, AdamState&);
  struct Moments {
    Matrix first;
    Matrix second;
  };
  AdamConfig config_;
  std::int64_t step_ = 0;
  std::map<std::string, Moments> moments_;
};

// Bias-corrected Adam update, then clears the gradients. Throws
// std::logic_error if any parameter has no gradient.
void adam_step(std::span<Parameter* const> params, AdamState& state);
void adam_step(ParameterSet& params, AdamState& state);

// ---- finite-difference checking --------------------------------------------

struct GradCheckOptions {
  double step = 1e-5;
  double tol_rel = 1e-4;
  // Denominator floor for the relative error, so near-zero gradients are
  // compared absolutely.
  double abs_floor = 1e-6;
  // A coordinate also passes when |analytic - numeric| is within the rounding
  // error of the central difference, roundoff_ulps * eps * |f| / step.
  double roundoff_ulps = 64.0;
  // 0 checks every coordinate; otherwise a seeded sample of this size.
  std::size_t max_coordinates = 0;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  bool passed = true;
  std::size_t checked = 0;
  // Coordinates whose central difference straddled a relu/clamp kink.
  std::size_t skipped = 0;
  // Coordinates above tol_rel that passed on the rounding-error bound.
  std::size_t roundoff_limited = 0;
  double worst_rel_error = 0.0;
  std::string worst_parameter;
  Eigen::Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;

  std::string describe() const;
};

using ScalarFunction = std::function<Var(Tape&)>;

// Compares analytic gradients of |f| with respect to every parameter in
// |params| against central differences. |f| must build its graph on the tape
// it is given and return a 1x1 result.
GradCheckReport gradient_check(ParameterSet& params, const ScalarFunction& f,
                               const GradCheckOptions& options = {});

// ---- checkpoints ----------------------------------------------------------
// "S2CKPT1", u32 entry count, then per entry: u32 name length, UTF-8 name,
// u32 rank, u64 extents, float64 row-major payload. Little-endian.

std::string serialize_parameters(const ParameterSet& params);
ParameterSet deserialize_parameters(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params);
ParameterSet load_checkpoint(const std::filesystem::path& path);

}  // namespace s2::ad
