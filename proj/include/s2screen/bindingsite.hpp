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

// Binding-site head. Ligand probes attend over the residue-level sequence
// representation; the per-residue probability is the probe-averaged
// attention weight. Only sequence features enter this head.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "s2screen/autograd.hpp"

namespace s2::bsp {

struct ProbeHead {
  ad::Parameter* w_r = nullptr;  // d_s x d
  ad::Parameter* w_l = nullptr;  // d x d

  static ProbeHead create(ad::ParameterSet& params, std::string_view prefix, int d_s, int d,
                          Rng& rng);
  static ProbeHead bind(ad::ParameterSet& params, std::string_view prefix);
};

// For each of |batch_size| proteins, K indices into the batch ligands. The
// first index is the protein's own ligand; the remaining K-1 are drawn
// uniformly from the other batch ligands, without replacement when at least
// K-1 exist and with replacement otherwise. A batch of one repeats the
// paired ligand. Throws std::invalid_argument if K < 1 or batch_size == 0.
std::vector<std::vector<std::size_t>> sample_probes(std::size_t batch_size, int k,
                                                    std::uint64_t seed);

// K x I: row k is the softmax over residues of (x_s W_r) . (probe_k W_l).
// |probes| is K x d.
ad::Var probe_attention(ad::Tape& tape, const ProbeHead& head, ad::Var x_s, ad::Var probes);

// 1 x I mean of the K attention rows.
ad::Var residue_binding_prob(ad::Var alpha);

// Concatenates per-probe attention vectors (each 1 x I) and averages them.
// Throws ShapeError on length mismatch.
ad::Var residue_binding_prob(const std::vector<ad::Var>& alphas);

// -(1/N) sum_n sum_i [y log yhat + (1 - y) log(1 - yhat)], with yhat clamped
// to [1e-12, 1 - 1e-12]. Throws ShapeError on length mismatch.
ad::Var bsp_loss(ad::Tape& tape, const std::vector<ad::Var>& y_hat,
                 const std::vector<std::vector<std::uint8_t>>& labels);

}  // namespace s2::bsp
