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

#include "s2screen/autograd.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <sstream>

#include "s2screen/binary_io.hpp"

namespace s2::ad {

// ---- ParameterSet ----------------------------------------------------------

Parameter& ParameterSet::add(std::string name, Matrix value) {
  if (index_.count(name) != 0) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  index_.emplace(name, items_.size());
  items_.push_back(Parameter{std::move(name), std::move(value), std::nullopt});
  return items_.back();
}

Parameter& ParameterSet::at(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("unknown parameter: " + std::string(name));
  }
  return items_[it->second];
}

const Parameter& ParameterSet::at(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::out_of_range("unknown parameter: " + std::string(name));
  }
  return items_[it->second];
}

bool ParameterSet::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

std::vector<Parameter*> ParameterSet::with_prefix(std::string_view prefix) {
  std::vector<Parameter*> out;
  for (auto& p : items_) {
    if (std::string_view(p.name).starts_with(prefix)) out.push_back(&p);
  }
  return out;
}

std::vector<Parameter*> ParameterSet::all() { return with_prefix(""); }

void ParameterSet::clear_grads() {
  for (auto& p : items_) p.grad.reset();
}

// ---- Var / Tape ------------------------------------------------------------

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("Var::scalar on non-scalar");
  return v(0, 0);
}

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

Var Tape::constant(Matrix value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Parameter& parameter) {
  auto it = leaves_.find(&parameter);
  if (it != leaves_.end()) return Var(this, it->second);
  Node node;
  node.value = parameter.value;
  node.requires_grad = true;
  node.parameter = &parameter;
  nodes_.push_back(std::move(node));
  leaves_.emplace(&parameter, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::vector<Var> inputs, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  for (const Var& v : inputs) {
    if (v.tape_ != this) throw std::invalid_argument("Tape::record: input from another tape");
    node.inputs.push_back(v.id_);
    node.requires_grad = node.requires_grad || nodes_[v.id_].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(Var loss) {
  if (loss.tape_ != this) throw std::invalid_argument("Tape::backward: foreign loss");
  const Matrix& lv = nodes_[loss.id_].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " + std::to_string(lv.rows()) + "x" +
                     std::to_string(lv.cols()));
  }
  for (auto& n : nodes_) n.grad.resize(0, 0);
  if (!nodes_[loss.id_].requires_grad) return;
  nodes_[loss.id_].grad = Matrix::Ones(1, 1);

  for (std::size_t id = loss.id_ + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.requires_grad || node.grad.size() == 0 || !node.backward) continue;
    BackwardContext ctx;
    ctx.grad_ = &node.grad;
    ctx.output_ = &node.value;
    for (std::size_t in : node.inputs) {
      ctx.inputs_.push_back(&nodes_[in].value);
      ctx.sinks_.push_back(nodes_[in].requires_grad ? &nodes_[in].grad : nullptr);
    }
    node.backward(ctx);
  }

  for (auto& [param, id] : leaves_) {
    const Matrix& g = nodes_[id].grad;
    if (g.size() == 0) continue;
    if (param->grad) {
      *param->grad += g;
    } else {
      param->grad = g;
    }
  }
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_[v.id_];
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::note_branch(std::uint64_t pattern) {
  branch_signature_ ^= pattern;
  branch_signature_ *= 0x100000001b3ULL;
}

// ---- primitives -------------------------------------------------------------

namespace {

using Eigen::Index;

Index broadcast_dim(Index a, Index b, const char* op) {
  if (a == b) return a;
  if (a == 1) return b;
  if (b == 1) return a;
  throw ShapeError(std::string(op) + ": incompatible extents " + std::to_string(a) + " and " +
                   std::to_string(b));
}

Matrix expand(const Matrix& m, Index rows, Index cols) {
  if (m.rows() == rows && m.cols() == cols) return m;
  return m.replicate(rows / m.rows(), cols / m.cols());
}

Matrix reduce_to(const Matrix& g, Index rows, Index cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  if (rows == 1 && cols == 1) return Matrix::Constant(1, 1, g.sum());
  if (rows == 1) return g.colwise().sum();
  return g.rowwise().sum();
}

std::uint64_t mask_hash(const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  for (Index i = 0; i < mask.size(); ++i) {
    h ^= static_cast<std::uint64_t>(mask.data()[i]) + static_cast<std::uint64_t>(i) * 2;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Var add(Var a, Var b) {
  const Index r = broadcast_dim(a.rows(), b.rows(), "add");
  const Index c = broadcast_dim(a.cols(), b.cols(), "add");
  Matrix out = expand(a.value(), r, c) + expand(b.value(), r, c);
  return a.tape().record(std::move(out), {a, b}, [](BackwardContext& ctx) {
    ctx.accumulate(0, reduce_to(ctx.grad(), ctx.input(0).rows(), ctx.input(0).cols()));
    ctx.accumulate(1, reduce_to(ctx.grad(), ctx.input(1).rows(), ctx.input(1).cols()));
  });
}

Var sub(Var a, Var b) {
  const Index r = broadcast_dim(a.rows(), b.rows(), "sub");
  const Index c = broadcast_dim(a.cols(), b.cols(), "sub");
  Matrix out = expand(a.value(), r, c) - expand(b.value(), r, c);
  return a.tape().record(std::move(out), {a, b}, [](BackwardContext& ctx) {
    ctx.accumulate(0, reduce_to(ctx.grad(), ctx.input(0).rows(), ctx.input(0).cols()));
    ctx.accumulate(1, reduce_to(-ctx.grad(), ctx.input(1).rows(), ctx.input(1).cols()));
  });
}

Var mul(Var a, Var b) {
  const Index r = broadcast_dim(a.rows(), b.rows(), "mul");
  const Index c = broadcast_dim(a.cols(), b.cols(), "mul");
  Matrix out = expand(a.value(), r, c).cwiseProduct(expand(b.value(), r, c));
  return a.tape().record(std::move(out), {a, b}, [](BackwardContext& ctx) {
    const Index r = ctx.grad().rows();
    const Index c = ctx.grad().cols();
    const Matrix& a = ctx.input(0);
    const Matrix& b = ctx.input(1);
    if (ctx.needs_grad(0)) {
      ctx.accumulate(0, reduce_to(ctx.grad().cwiseProduct(expand(b, r, c)), a.rows(), a.cols()));
    }
    if (ctx.needs_grad(1)) {
      ctx.accumulate(1, reduce_to(ctx.grad().cwiseProduct(expand(a, r, c)), b.rows(), b.cols()));
    }
  });
}

Var matmul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_str(a.value()) + " times " + shape_str(b.value()));
  }
  Matrix out = a.value() * b.value();
  return a.tape().record(std::move(out), {a, b}, [](BackwardContext& ctx) {
    if (ctx.needs_grad(0)) ctx.accumulate(0, ctx.grad() * ctx.input(1).transpose());
    if (ctx.needs_grad(1)) ctx.accumulate(1, ctx.input(0).transpose() * ctx.grad());
  });
}

Var transpose(Var a) {
  Matrix out = a.value().transpose();
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    ctx.accumulate(0, ctx.grad().transpose());
  });
}

Var relu(Var a) {
  const auto positive = (a.value().array() > 0.0).eval();
  a.tape().note_branch(mask_hash(positive));
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    ctx.accumulate(0, (ctx.input(0).array() > 0.0).select(ctx.grad(), 0.0));
  });
}

Var sigmoid(Var a) {
  Matrix out = a.value().unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    const auto y = ctx.output().array();
    ctx.accumulate(0, (ctx.grad().array() * y * (1.0 - y)).matrix());
  });
}

Var exp(Var a) {
  Matrix out = a.value().array().exp().matrix();
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    ctx.accumulate(0, ctx.grad().cwiseProduct(ctx.output()));
  });
}

Var log(Var a) {
  if ((a.value().array() <= 0.0).any()) throw std::domain_error("log: non-positive argument");
  Matrix out = a.value().array().log().matrix();
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    ctx.accumulate(0, ctx.grad().cwiseQuotient(ctx.input(0)));
  });
}

Var clamp(Var a, double lo, double hi) {
  const auto inside = ((a.value().array() > lo) && (a.value().array() < hi)).eval();
  a.tape().note_branch(mask_hash(inside));
  Matrix out = a.value().cwiseMax(lo).cwiseMin(hi);
  return a.tape().record(std::move(out), {a}, [lo, hi](BackwardContext& ctx) {
    const auto x = ctx.input(0).array();
    ctx.accumulate(0, ((x > lo) && (x < hi)).select(ctx.grad(), 0.0));
  });
}

Var scalar_scale(Var a, double s) {
  Matrix out = a.value() * s;
  return a.tape().record(std::move(out), {a}, [s](BackwardContext& ctx) {
    ctx.accumulate(0, ctx.grad() * s);
  });
}

Var add_scalar(Var a, double s) {
  Matrix out = a.value().array() + s;
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    ctx.accumulate(0, ctx.grad());
  });
}

Var softmax_rows(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    out.row(r) = (x.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    const Matrix& y = ctx.output();
    const Vector dot = ctx.grad().cwiseProduct(y).rowwise().sum();
    ctx.accumulate(0, y.cwiseProduct(ctx.grad() - dot.replicate(1, y.cols())));
  });
}

Var log_softmax_rows(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    const double lse = m + std::log((x.row(r).array() - m).exp().sum());
    out.row(r) = x.row(r).array() - lse;
  }
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    const Matrix p = ctx.output().array().exp().matrix();
    const Vector total = ctx.grad().rowwise().sum();
    ctx.accumulate(0, ctx.grad() - p.cwiseProduct(total.replicate(1, p.cols())));
  });
}

Var layer_norm_rows(Var a, double eps) {
  const Matrix& x = a.value();
  const Index n = x.cols();
  Matrix out(x.rows(), n);
  Vector inv_std(x.rows());
  for (Index r = 0; r < x.rows(); ++r) {
    const double mu = x.row(r).mean();
    const double var = (x.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    out.row(r) = (x.row(r).array() - mu) * inv_std(r);
  }
  return a.tape().record(std::move(out), {a}, [inv_std](BackwardContext& ctx) {
    const Matrix& y = ctx.output();
    const Matrix& g = ctx.grad();
    Matrix dx(y.rows(), y.cols());
    for (Index r = 0; r < y.rows(); ++r) {
      const double mg = g.row(r).mean();
      const double mgy = g.row(r).cwiseProduct(y.row(r)).mean();
      dx.row(r) = inv_std(r) * (g.row(r).array() - mg - y.row(r).array() * mgy);
    }
    ctx.accumulate(0, dx);
  });
}

Var mean_rows(Var a) {
  if (a.rows() == 0) throw ShapeError("mean_rows: no rows");
  Matrix out = a.value().colwise().mean();
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    const Index r = ctx.input(0).rows();
    ctx.accumulate(0, ctx.grad().replicate(r, 1) / static_cast<double>(r));
  });
}

Var masked_mean_rows(Var a, const Matrix& mask) {
  if (mask.cols() != a.rows()) {
    throw ShapeError("masked_mean_rows: mask " + shape_str(mask) + " vs input " +
                     shape_str(a.value()));
  }
  Matrix weights = mask;
  for (Index r = 0; r < mask.rows(); ++r) {
    const double count = mask.row(r).sum();
    if (!(count > 0.0)) {
      throw std::invalid_argument("masked_mean_rows: mask row " + std::to_string(r) + " is empty");
    }
    weights.row(r) /= count;
  }
  Matrix out = weights * a.value();
  return a.tape().record(std::move(out), {a}, [weights](BackwardContext& ctx) {
    ctx.accumulate(0, weights.transpose() * ctx.grad());
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<Index> offsets;
  Index at = 0;
  for (const Var& p : parts) {
    offsets.push_back(at);
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return parts.front().tape().record(std::move(out), parts, [offsets](BackwardContext& ctx) {
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (ctx.needs_grad(i)) {
        ctx.accumulate(i, ctx.grad().middleCols(offsets[i], ctx.input(i).cols()));
      }
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw ShapeError("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<Index> offsets;
  Index at = 0;
  for (const Var& p : parts) {
    offsets.push_back(at);
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return parts.front().tape().record(std::move(out), parts, [offsets](BackwardContext& ctx) {
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (ctx.needs_grad(i)) {
        ctx.accumulate(i, ctx.grad().middleRows(offsets[i], ctx.input(i).rows()));
      }
    }
  });
}

Var row_l2_normalize(Var a, double eps) {
  const Matrix& x = a.value();
  Vector norm = (x.rowwise().squaredNorm().array() + eps * eps).sqrt().matrix();
  Matrix out = norm.cwiseInverse().asDiagonal() * x;
  return a.tape().record(std::move(out), {a}, [norm](BackwardContext& ctx) {
    const Matrix& x = ctx.input(0);
    const Matrix& g = ctx.grad();
    const Vector gx = g.cwiseProduct(x).rowwise().sum();
    Matrix dx(x.rows(), x.cols());
    for (Index r = 0; r < x.rows(); ++r) {
      const double n = norm(r);
      dx.row(r) = g.row(r) / n - x.row(r) * (gx(r) / (n * n * n));
    }
    ctx.accumulate(0, dx);
  });
}

Var sum(Var a) {
  Matrix out = Matrix::Constant(1, 1, a.value().sum());
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    ctx.accumulate(0, Matrix::Constant(ctx.input(0).rows(), ctx.input(0).cols(), ctx.grad()(0, 0)));
  });
}

Var gather_rows(Var a, std::span<const int> rows) {
  Matrix out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) {
      throw std::out_of_range("gather_rows: index " + std::to_string(rows[i]) + " outside " +
                              std::to_string(a.rows()) + " rows");
    }
    out.row(static_cast<Index>(i)) = a.value().row(rows[i]);
  }
  std::vector<int> idx(rows.begin(), rows.end());
  return a.tape().record(std::move(out), {a}, [idx](BackwardContext& ctx) {
    Matrix dx = Matrix::Zero(ctx.input(0).rows(), ctx.input(0).cols());
    for (std::size_t i = 0; i < idx.size(); ++i) dx.row(idx[i]) += ctx.grad().row(static_cast<Index>(i));
    ctx.accumulate(0, dx);
  });
}

Var diagonal(Var a) {
  if (a.rows() != a.cols()) throw ShapeError("diagonal: non-square " + shape_str(a.value()));
  Matrix out = a.value().diagonal();
  return a.tape().record(std::move(out), {a}, [](BackwardContext& ctx) {
    Matrix dx = Matrix::Zero(ctx.input(0).rows(), ctx.input(0).cols());
    dx.diagonal() = ctx.grad().col(0);
    ctx.accumulate(0, dx);
  });
}

// ---- Adam ---------------------------------------------------------------

void adam_step(std::span<Parameter* const> params, AdamState& state) {
  for (const Parameter* p : params) {
    if (!p->grad) throw std::logic_error("adam_step: parameter '" + p->name + "' has no gradient");
    if (p->grad->rows() != p->value.rows() || p->grad->cols() != p->value.cols()) {
      throw ShapeError("adam_step: gradient shape mismatch for '" + p->name + "'");
    }
  }
  const AdamConfig& c = state.config_;
  const std::int64_t t = ++state.step_;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
  for (Parameter* p : params) {
    auto [it, inserted] = state.moments_.try_emplace(p->name);
    AdamState::Moments& m = it->second;
    if (inserted) {
      m.first = Matrix::Zero(p->value.rows(), p->value.cols());
      m.second = Matrix::Zero(p->value.rows(), p->value.cols());
    } else if (m.first.rows() != p->value.rows() || m.first.cols() != p->value.cols()) {
      throw ShapeError("adam_step: moment shape mismatch for '" + p->name + "'");
    }
    const Matrix& g = *p->grad;
    m.first = c.beta1 * m.first + (1.0 - c.beta1) * g;
    m.second = c.beta2 * m.second + (1.0 - c.beta2) * g.cwiseProduct(g);
    const auto mhat = m.first.array() / bias1;
    const auto vhat = m.second.array() / bias2;
    p->value.array() -= c.learning_rate * mhat / (vhat.sqrt() + c.epsilon);
    p->grad.reset();
  }
}

void adam_step(ParameterSet& params, AdamState& state) {
  auto all = params.all();
  adam_step(std::span<Parameter* const>(all), state);
}

// ---- gradient check ---------------------------------------------------------

std::string GradCheckReport::describe() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << " checked=" << checked << " skipped=" << skipped
     << " roundoff_limited=" << roundoff_limited << " worst_rel=" << worst_rel_error;
  if (worst_index >= 0) {
    os << " at " << worst_parameter << "[" << worst_index << "] analytic=" << worst_analytic
       << " numeric=" << worst_numeric;
  }
  return os.str();
}

GradCheckReport gradient_check(ParameterSet& params, const ScalarFunction& f,
                               const GradCheckOptions& options) {
  params.clear_grads();
  {
    Tape tape;
    Var out = f(tape);
    if (out.rows() != 1 || out.cols() != 1) throw ShapeError("gradient_check: f is not scalar");
    tape.backward(out);
  }

  struct Coordinate {
    Parameter* param;
    Index index;
  };
  std::vector<Coordinate> coords;
  for (auto& p : params) {
    for (Index k = 0; k < p.value.size(); ++k) coords.push_back({&p, k});
  }
  if (options.max_coordinates != 0 && coords.size() > options.max_coordinates) {
    Rng rng(options.seed);
    rng.shuffle(coords);
    coords.resize(options.max_coordinates);
  }

  auto evaluate = [&](std::uint64_t& signature) {
    Tape tape;
    const double v = f(tape).scalar();
    signature = tape.branch_signature();
    return v;
  };

  GradCheckReport report;
  for (const Coordinate& c : coords) {
    double* slot = c.param->value.data() + c.index;
    const double analytic = c.param->grad ? c.param->grad->data()[c.index] : 0.0;
    const double original = *slot;
    std::uint64_t sig_plus = 0;
    std::uint64_t sig_minus = 0;
    *slot = original + options.step;
    const double f_plus = evaluate(sig_plus);
    *slot = original - options.step;
    const double f_minus = evaluate(sig_minus);
    *slot = original;
    if (sig_plus != sig_minus) {
      ++report.skipped;
      continue;
    }
    const double numeric = (f_plus - f_minus) / (2.0 * options.step);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), options.abs_floor});
    const double diff = std::abs(analytic - numeric);
    const double rel = diff / denom;
    const double roundoff = options.roundoff_ulps * std::numeric_limits<double>::epsilon() *
                            std::max(std::abs(f_plus), std::abs(f_minus)) / options.step;
    ++report.checked;
    if (rel > report.worst_rel_error || report.worst_index < 0) {
      report.worst_rel_error = rel;
      report.worst_parameter = c.param->name;
      report.worst_index = c.index;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
    if (!(rel <= options.tol_rel)) {
      if (diff <= roundoff) {
        ++report.roundoff_limited;
      } else {
        report.passed = false;
      }
    }
  }
  params.clear_grads();
  return report;
}

// ---- checkpoints --------------------------------------------------------------

namespace {
constexpr std::string_view kCheckpointMagic = "S2CKPT1";
}

std::string serialize_parameters(const ParameterSet& params) {
  io::ByteWriter w;
  w.raw(kCheckpointMagic);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.str32(p.name);
    w.u32(2);
    w.u64(static_cast<std::uint64_t>(p.value.rows()));
    w.u64(static_cast<std::uint64_t>(p.value.cols()));
    for (Index r = 0; r < p.value.rows(); ++r) {
      for (Index c = 0; c < p.value.cols(); ++c) w.f64(p.value(r, c));
    }
  }
  return w.take();
}

ParameterSet deserialize_parameters(std::string_view bytes) {
  io::ByteReader r(bytes);
  if (r.raw(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw DataError("checkpoint: bad magic");
  }
  ParameterSet params;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str32();
    const std::uint32_t rank = r.u32();
    if (rank > 2) throw DataError("checkpoint: entry '" + name + "' has rank " + std::to_string(rank));
    std::uint64_t extents[2] = {1, 1};
    for (std::uint32_t d = 0; d < rank; ++d) extents[d] = r.u64();
    if (rank == 1) std::swap(extents[0], extents[1]);
    if (extents[0] * extents[1] > bytes.size() / 8) {
      throw DataError("checkpoint: entry '" + name + "' larger than file");
    }
    Matrix m(static_cast<Index>(extents[0]), static_cast<Index>(extents[1]));
    for (Index row = 0; row < m.rows(); ++row) {
      for (Index col = 0; col < m.cols(); ++col) m(row, col) = r.f64();
    }
    params.add(std::move(name), std::move(m));
  }
  if (!r.done()) throw DataError("checkpoint: trailing bytes");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params) {
  io::write_file(path, serialize_parameters(params));
}

ParameterSet load_checkpoint(const std::filesystem::path& path) {
  return deserialize_parameters(io::read_file(path));
}

}  // namespace s2::ad
