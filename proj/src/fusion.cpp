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

#include "s2screen/fusion.hpp"

#include <algorithm>
#include <string>

#include "s2screen/encoders.hpp"

namespace s2::fusion {

namespace {

std::string key(std::string_view prefix, std::string_view name) {
  std::string out(prefix);
  out += '.';
  out += name;
  return out;
}

AttentionBlock bind_block(ad::ParameterSet& params, const std::string& p) {
  return {&params.at(key(p, "wq")),    &params.at(key(p, "wk")),    &params.at(key(p, "wv")),
          &params.at(key(p, "ff_w1")), &params.at(key(p, "ff_b1")), &params.at(key(p, "ff_w2")),
          &params.at(key(p, "ff_b2"))};
}

ad::Var run_block(ad::Tape& tape, const AttentionBlock& b, ad::Var x, std::vector<Matrix>* attention) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.cols()));
  ad::Var q = ad::matmul(x, tape.leaf(*b.wq));
  ad::Var k = ad::matmul(x, tape.leaf(*b.wk));
  ad::Var v = ad::matmul(x, tape.leaf(*b.wv));
  ad::Var weights = ad::softmax_rows(ad::scalar_scale(ad::matmul(q, ad::transpose(k)), scale));
  if (attention != nullptr) attention->push_back(weights.value());
  ad::Var h = ad::layer_norm_rows(x + ad::matmul(weights, v));
  ad::Var ff = ad::affine(ad::relu(ad::affine(h, tape.leaf(*b.ff_w1), tape.leaf(*b.ff_b1))),
                          tape.leaf(*b.ff_w2), tape.leaf(*b.ff_b2));
  return ad::layer_norm_rows(h + ff);
}

}  // namespace

FusionModule FusionModule::create(ad::ParameterSet& params, std::string_view prefix, int d_s,
                                  int d_g, int d, Rng& rng) {
  params.add(key(prefix, "w_s"), enc::xavier(d_s, d, rng));
  params.add(key(prefix, "w_g"), enc::xavier(d_g, d, rng));
  params.add(key(prefix, "w_beta"), enc::xavier(2 * d, 1, rng));
  params.add(key(prefix, "b_beta"), Matrix::Zero(1, 1));
  for (int i = 0; i < 2; ++i) {
    const std::string p = key(prefix, "block" + std::to_string(i));
    params.add(key(p, "wq"), enc::xavier(d, d, rng));
    params.add(key(p, "wk"), enc::xavier(d, d, rng));
    params.add(key(p, "wv"), enc::xavier(d, d, rng));
    params.add(key(p, "ff_w1"), enc::xavier(d, d, rng));
    params.add(key(p, "ff_b1"), Matrix::Zero(1, d));
    params.add(key(p, "ff_w2"), enc::xavier(d, d, rng));
    params.add(key(p, "ff_b2"), Matrix::Zero(1, d));
  }
  return bind(params, prefix);
}

FusionModule FusionModule::bind(ad::ParameterSet& params, std::string_view prefix) {
  FusionModule f;
  f.w_s = &params.at(key(prefix, "w_s"));
  f.w_g = &params.at(key(prefix, "w_g"));
  f.w_beta = &params.at(key(prefix, "w_beta"));
  f.b_beta = &params.at(key(prefix, "b_beta"));
  for (int i = 0; i < 2; ++i) f.blocks[i] = bind_block(params, key(prefix, "block" + std::to_string(i)));
  return f;
}

Matrix residue_mask(std::span<const int> assignment, std::span<const int> pocket_residues) {
  if (!std::is_sorted(pocket_residues.begin(), pocket_residues.end())) {
    throw std::invalid_argument("residue_mask: pocket residues must be ascending");
  }
  const auto rows = static_cast<Eigen::Index>(pocket_residues.size());
  const auto cols = static_cast<Eigen::Index>(assignment.size());
  Matrix mask = Matrix::Zero(rows, cols);
  for (Eigen::Index a = 0; a < cols; ++a) {
    auto it = std::lower_bound(pocket_residues.begin(), pocket_residues.end(), assignment[a]);
    if (it != pocket_residues.end() && *it == assignment[a]) mask(it - pocket_residues.begin(), a) = 1.0;
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (mask.row(r).sum() == 0.0) {
      throw DataError("pocket residue " + std::to_string(pocket_residues[r]) + " has no atoms");
    }
  }
  return mask;
}

ad::Var atoms_to_residues(ad::Var z, std::span<const int> assignment,
                          std::span<const int> pocket_residues) {
  if (static_cast<Eigen::Index>(assignment.size()) != z.rows()) {
    throw ShapeError("atoms_to_residues: assignment length differs from atom count");
  }
  return ad::masked_mean_rows(z, residue_mask(assignment, pocket_residues));
}

GateOutput gate_fuse(ad::Tape& tape, const FusionModule& fusion, ad::Var x_s, ad::Var x_g) {
  if (x_s.rows() != x_g.rows()) throw ShapeError("gate_fuse: row counts differ");
  ad::Var s = ad::matmul(x_s, tape.leaf(*fusion.w_s));
  ad::Var g = ad::matmul(x_g, tape.leaf(*fusion.w_g));
  ad::Var beta = ad::sigmoid(
      ad::affine(ad::concat_cols({s, g}), tape.leaf(*fusion.w_beta), tape.leaf(*fusion.b_beta)));
  // beta * s + (1 - beta) * g == g + beta * (s - g)
  ad::Var fused = g + ad::mul(beta, s - g);
  return {fused, beta};
}

ad::Var contextualize_pocket(ad::Tape& tape, const FusionModule& fusion, ad::Var x_f,
                             std::vector<Matrix>* attention) {
  if (x_f.rows() < 1) throw ShapeError("contextualize_pocket: empty pocket");
  ad::Var h = x_f;
  for (const auto& block : fusion.blocks) h = run_block(tape, block, h, attention);
  return h;
}

ad::Var pool_fused_pocket(ad::Var x) { return ad::mean_rows(x); }

ad::Var sequence_only_pocket(ad::Tape& tape, const FusionModule& fusion, ad::Var x_s_pocket) {
  return ad::mean_rows(ad::matmul(x_s_pocket, tape.leaf(*fusion.w_s)));
}

}  // namespace s2::fusion
