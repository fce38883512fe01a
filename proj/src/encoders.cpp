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

#include "s2screen/encoders.hpp"

namespace s2::enc {

namespace {

std::string key(std::string_view prefix, std::string_view name) {
  std::string out(prefix);
  out += '.';
  out += name;
  return out;
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.normal();
  return m;
}

}  // namespace

Matrix xavier(Eigen::Index fan_in, Eigen::Index fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
  return m;
}

MoleculeGeometry make_geometry(std::span<const int> types, std::span<const Vec3> positions,
                               const RbfConfig& rbf) {
  if (types.empty()) throw DataError("molecule with no atoms");
  if (types.size() != positions.size()) throw ShapeError("make_geometry: types/positions length differ");
  for (const Vec3& p : positions) {
    if (!p.allFinite()) throw DataError("molecule with non-finite coordinate");
  }
  MoleculeGeometry g;
  g.types.assign(types.begin(), types.end());
  const auto n = static_cast<Eigen::Index>(types.size());
  const Eigen::Index pairs = n * (n - 1);
  g.pair_rbf.resize(pairs, rbf.centers);
  g.partner.reserve(static_cast<std::size_t>(pairs));
  g.aggregate = Matrix::Zero(n, pairs);
  const double inv_two_w2 = 1.0 / (2.0 * rbf.width * rbf.width);
  Eigen::Index p = 0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      const double d = (positions[static_cast<std::size_t>(a)] - positions[static_cast<std::size_t>(b)]).norm();
      for (int k = 0; k < rbf.centers; ++k) {
        const double delta = d - rbf.center(k);
        g.pair_rbf(p, k) = std::exp(-delta * delta * inv_two_w2);
      }
      g.partner.push_back(static_cast<int>(b));
      g.aggregate(a, p) = 1.0;
      ++p;
    }
  }
  return g;
}

MoleculeGeometry make_geometry(const LigandRecord& ligand, const RbfConfig& rbf) {
  std::vector<int> types;
  std::vector<Vec3> positions;
  for (const auto& a : ligand.atoms) {
    types.push_back(element_code(a.element));
    positions.push_back(a.position);
  }
  return make_geometry(types, positions, rbf);
}

// ---- parameter views -------------------------------------------------------------

SequenceEncoder SequenceEncoder::create(ad::ParameterSet& params, std::string_view prefix, int dim,
                                        Rng& rng) {
  if (dim < 8) throw std::invalid_argument("SequenceEncoder: dimension must be >= 8");
  params.add(key(prefix, "embed"), gaussian(kResidueVocab, dim, 1.0, rng));
  params.add(key(prefix, "w1"), xavier(dim, dim, rng));
  params.add(key(prefix, "b1"), Matrix::Zero(1, dim));
  params.add(key(prefix, "w2"), xavier(dim, dim, rng));
  params.add(key(prefix, "b2"), Matrix::Zero(1, dim));
  return bind(params, prefix);
}

SequenceEncoder SequenceEncoder::bind(ad::ParameterSet& params, std::string_view prefix) {
  return {&params.at(key(prefix, "embed")), &params.at(key(prefix, "w1")),
          &params.at(key(prefix, "b1")), &params.at(key(prefix, "w2")), &params.at(key(prefix, "b2"))};
}

MoleculeEncoder MoleculeEncoder::create(ad::ParameterSet& params, std::string_view prefix, int dim,
                                        const RbfConfig& rbf, Rng& rng) {
  params.add(key(prefix, "embed"), gaussian(kElementVocab, dim, 1.0, rng));
  params.add(key(prefix, "filter_w"), xavier(rbf.centers, dim, rng));
  params.add(key(prefix, "filter_b"), Matrix::Zero(1, dim));
  params.add(key(prefix, "out_w"), xavier(2 * dim, dim, rng));
  params.add(key(prefix, "out_b"), Matrix::Zero(1, dim));
  return bind(params, prefix);
}

MoleculeEncoder MoleculeEncoder::bind(ad::ParameterSet& params, std::string_view prefix) {
  return {&params.at(key(prefix, "embed")), &params.at(key(prefix, "filter_w")),
          &params.at(key(prefix, "filter_b")), &params.at(key(prefix, "out_w")),
          &params.at(key(prefix, "out_b"))};
}

ProjectionHead ProjectionHead::create(ad::ParameterSet& params, std::string_view prefix, int in_dim,
                                      int out_dim, Rng& rng) {
  params.add(key(prefix, "w1"), xavier(in_dim, out_dim, rng));
  params.add(key(prefix, "b1"), Matrix::Zero(1, out_dim));
  params.add(key(prefix, "w2"), xavier(out_dim, out_dim, rng));
  params.add(key(prefix, "b2"), Matrix::Zero(1, out_dim));
  return bind(params, prefix);
}

ProjectionHead ProjectionHead::bind(ad::ParameterSet& params, std::string_view prefix) {
  return {&params.at(key(prefix, "w1")), &params.at(key(prefix, "b1")),
          &params.at(key(prefix, "w2")), &params.at(key(prefix, "b2"))};
}

ad::Var ProjectionHead::project(ad::Tape& tape, ad::Var x) const {
  ad::Var h = ad::affine(x, tape.leaf(*w1), tape.leaf(*b1));
  h = ad::relu(ad::layer_norm_rows(h));
  return ad::affine(h, tape.leaf(*w2), tape.leaf(*b2));
}

// ---- forward paths ---------------------------------------------------------------

ad::Var encode_residues(ad::Tape& tape, const SequenceEncoder& enc, std::span<const int> codes) {
  if (codes.empty()) throw DataError("encode_residues: empty sequence");
  ad::Var h = ad::gather_rows(tape.leaf(*enc.embed), codes);
  h = h + ad::relu(ad::affine(h, tape.leaf(*enc.w1), tape.leaf(*enc.b1)));
  h = h + ad::relu(ad::affine(h, tape.leaf(*enc.w2), tape.leaf(*enc.b2)));
  return h;
}

ad::Var encode_protein_sequence(ad::Tape& tape, const SequenceEncoder& enc,
                                const ProjectionHead& proj, std::span<const int> codes) {
  return proj.project(tape, ad::mean_rows(encode_residues(tape, enc, codes)));
}

ad::Var encode_molecule_atoms(ad::Tape& tape, const MoleculeEncoder& enc,
                              const MoleculeGeometry& geometry) {
  if (geometry.types.empty()) throw DataError("encode_molecule_atoms: no atoms");
  ad::Var emb = ad::gather_rows(tape.leaf(*enc.embed), geometry.types);
  ad::Var messages;
  if (geometry.partner.empty()) {
    messages = tape.constant(Matrix::Zero(emb.rows(), emb.cols()));
  } else {
    ad::Var filter = ad::affine(tape.constant(geometry.pair_rbf), tape.leaf(*enc.filter_w),
                                tape.leaf(*enc.filter_b));
    ad::Var neighbors = ad::gather_rows(emb, geometry.partner);
    messages = ad::matmul(tape.constant(geometry.aggregate), ad::mul(filter, neighbors));
  }
  return ad::affine(ad::concat_cols({emb, messages}), tape.leaf(*enc.out_w), tape.leaf(*enc.out_b));
}

ad::Var encode_ligand(ad::Tape& tape, const MoleculeEncoder& enc, const ProjectionHead& proj,
                      const MoleculeGeometry& geometry) {
  return proj.project(tape, ad::mean_rows(encode_molecule_atoms(tape, enc, geometry)));
}

}  // namespace s2::enc
