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

// Desk-scale encoders.
//
//  * SequenceEncoder: residue embedding followed by two residual relu
//    layers applied per residue. No positional information.
//  * MoleculeEncoder: element embedding plus one continuous-filter message
//    layer over Gaussian distance features, so outputs depend on interatomic
//    distances only. Used for ligands and for pocket atoms.
//  * ProjectionHead: Linear -> LayerNorm -> ReLU -> Linear into the shared
//    space.
//
// The structs below are views over named entries of an ad::ParameterSet;
// create() adds seeded parameters under a prefix, bind() looks them up.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "s2screen/autograd.hpp"
#include "s2screen/datamodel.hpp"

namespace s2::enc {

// Xavier-uniform fan_in x fan_out matrix.
Matrix xavier(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng);

struct RbfConfig {
  int centers = 16;
  double max_distance = 10.0;
  double width = 0.5;

  double center(int k) const { return max_distance * k / (centers - 1); }
};

// Per-molecule constants: element codes, the Gaussian features of every
// ordered atom pair (a, b != a), and the pair -> atom aggregation matrix.
struct MoleculeGeometry {
  std::vector<int> types;
  Matrix pair_rbf;           // P x centers
  std::vector<int> partner;  // P entries: atom b of each pair
  Matrix aggregate;          // A x P, ones where the pair belongs to atom a

  std::size_t atom_count() const { return types.size(); }
};

MoleculeGeometry make_geometry(std::span<const int> types, std::span<const Vec3> positions,
                               const RbfConfig& rbf = {});
MoleculeGeometry make_geometry(const LigandRecord& ligand, const RbfConfig& rbf = {});

struct SequenceEncoder {
  ad::Parameter* embed = nullptr;
  ad::Parameter* w1 = nullptr;
  ad::Parameter* b1 = nullptr;
  ad::Parameter* w2 = nullptr;
  ad::Parameter* b2 = nullptr;

  static SequenceEncoder create(ad::ParameterSet& params, std::string_view prefix, int dim, Rng& rng);
  static SequenceEncoder bind(ad::ParameterSet& params, std::string_view prefix);
  int dim() const { return static_cast<int>(embed->value.cols()); }
};

struct MoleculeEncoder {
  ad::Parameter* embed = nullptr;     // kElementVocab x d_g
  ad::Parameter* filter_w = nullptr;  // centers x d_g
  ad::Parameter* filter_b = nullptr;  // 1 x d_g
  ad::Parameter* out_w = nullptr;     // 2 d_g x d_g
  ad::Parameter* out_b = nullptr;     // 1 x d_g

  static MoleculeEncoder create(ad::ParameterSet& params, std::string_view prefix, int dim,
                                const RbfConfig& rbf, Rng& rng);
  static MoleculeEncoder bind(ad::ParameterSet& params, std::string_view prefix);
  int dim() const { return static_cast<int>(embed->value.cols()); }
};

struct ProjectionHead {
  ad::Parameter* w1 = nullptr;
  ad::Parameter* b1 = nullptr;
  ad::Parameter* w2 = nullptr;
  ad::Parameter* b2 = nullptr;

  static ProjectionHead create(ad::ParameterSet& params, std::string_view prefix, int in_dim,
                               int out_dim, Rng& rng);
  static ProjectionHead bind(ad::ParameterSet& params, std::string_view prefix);
  int out_dim() const { return static_cast<int>(w2->value.cols()); }

  ad::Var project(ad::Tape& tape, ad::Var x) const;
};

// I x d_s residue representations.
ad::Var encode_residues(ad::Tape& tape, const SequenceEncoder& enc, std::span<const int> codes);

// 1 x d: mean over residues, then projection.
ad::Var encode_protein_sequence(ad::Tape& tape, const SequenceEncoder& enc,
                                const ProjectionHead& proj, std::span<const int> codes);

// A x d_g atom representations: dense(concat(emb(a), sum_b filter(d_ab) * emb(b))).
ad::Var encode_molecule_atoms(ad::Tape& tape, const MoleculeEncoder& enc,
                              const MoleculeGeometry& geometry);

// 1 x d: mean over atoms, then projection.
ad::Var encode_ligand(ad::Tape& tape, const MoleculeEncoder& enc, const ProjectionHead& proj,
                      const MoleculeGeometry& geometry);

}  // namespace s2::enc
