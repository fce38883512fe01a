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

// Sequence-structure fusion over pocket residues.
//
//   x_g = atoms_to_residues(z)                 masked mean per pocket residue
//   beta = sigmoid([x_s W_s, x_g W_g] W_beta + b_beta)
//   x_f = beta * x_s W_s + (1 - beta) * x_g W_g
//   h   = mean_rows(block2(block1(x_f)))
//
// Each block is single-head self-attention and a d->d->d relu feed-forward,
// both with residual connection followed by layer norm.

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "s2screen/autograd.hpp"

namespace s2::fusion {

struct AttentionBlock {
  ad::Parameter* wq = nullptr;
  ad::Parameter* wk = nullptr;
  ad::Parameter* wv = nullptr;
  ad::Parameter* ff_w1 = nullptr;
  ad::Parameter* ff_b1 = nullptr;
  ad::Parameter* ff_w2 = nullptr;
  ad::Parameter* ff_b2 = nullptr;
};

struct FusionModule {
  ad::Parameter* w_s = nullptr;     // d_s x d
  ad::Parameter* w_g = nullptr;     // d_g x d
  ad::Parameter* w_beta = nullptr;  // 2d x 1
  ad::Parameter* b_beta = nullptr;  // 1 x 1
  AttentionBlock blocks[2];

  static FusionModule create(ad::ParameterSet& params, std::string_view prefix, int d_s, int d_g,
                             int d, Rng& rng);
  static FusionModule bind(ad::ParameterSet& params, std::string_view prefix);
  int dim() const { return static_cast<int>(w_s->value.cols()); }
};

// R x A mask: entry (r, a) = 1 iff atom a is assigned to pocket_residues[r].
// |pocket_residues| must be sorted ascending. Throws DataError if a pocket
// residue has no atom.
Matrix residue_mask(std::span<const int> assignment, std::span<const int> pocket_residues);

ad::Var atoms_to_residues(ad::Var z, std::span<const int> assignment,
                          std::span<const int> pocket_residues);

struct GateOutput {
  ad::Var fused;  // R x d
  ad::Var beta;   // R x 1
};

GateOutput gate_fuse(ad::Tape& tape, const FusionModule& fusion, ad::Var x_s, ad::Var x_g);

// When |attention| is non-null it receives each block's R x R weights.
ad::Var contextualize_pocket(ad::Tape& tape, const FusionModule& fusion, ad::Var x_f,
                             std::vector<Matrix>* attention = nullptr);

ad::Var pool_fused_pocket(ad::Var x);

// Sequence-only pocket embedding used when fusion is ablated:
// mean over pocket rows of x_s W_s.
ad::Var sequence_only_pocket(ad::Tape& tape, const FusionModule& fusion, ad::Var x_s_pocket);

}  // namespace s2::fusion
