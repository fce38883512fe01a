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

// Finite-difference checks of every primitive and of the full stage-2
// objective (contrastive plus binding-site loss through the fused pocket).

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "s2screen/autograd.hpp"
#include "s2screen/bindingsite.hpp"
#include "s2screen/losses.hpp"
#include "s2screen/training.hpp"

namespace s2::gradsuite {

struct Case {
  std::string name;
  ad::ParameterSet params;
  ad::ScalarFunction f;
};

inline Matrix randn(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

inline Matrix positive(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 0.5 + rng.uniform(0.0, 2.0);
  return m;
}

// sum(out * W) with a fixed random weight W, so every output entry matters.
inline ad::Var weigh(ad::Tape& tape, ad::Var out, const Matrix& w) {
  return ad::sum(ad::mul(out, tape.constant(w)));
}

using CaseList = std::vector<std::unique_ptr<Case>>;

// One scalar function per primitive, each with freshly drawn operands.
inline CaseList primitive_cases(Rng& rng) {
  CaseList cases;
  auto unary = [&](std::string name, Matrix a, std::function<ad::Var(ad::Var)> op, Eigen::Index out_r,
                   Eigen::Index out_c) {
    auto& c = *cases.emplace_back(std::make_unique<Case>());
    c.name = std::move(name);
    c.params.add("a", std::move(a));
    Matrix w = randn(out_r, out_c, rng);
    ad::Parameter* pa = &c.params.at("a");
    c.f = [pa, op, w](ad::Tape& t) { return weigh(t, op(t.leaf(*pa)), w); };
  };
  auto binary = [&](std::string name, Matrix a, Matrix b, std::function<ad::Var(ad::Var, ad::Var)> op,
                    Eigen::Index out_r, Eigen::Index out_c) {
    auto& c = *cases.emplace_back(std::make_unique<Case>());
    c.name = std::move(name);
    c.params.add("a", std::move(a));
    c.params.add("b", std::move(b));
    Matrix w = randn(out_r, out_c, rng);
    ad::Parameter* pa = &c.params.at("a");
    ad::Parameter* pb = &c.params.at("b");
    c.f = [pa, pb, op, w](ad::Tape& t) { return weigh(t, op(t.leaf(*pa), t.leaf(*pb)), w); };
  };

  binary("add", randn(3, 4, rng), randn(3, 4, rng), ad::add, 3, 4);
  binary("add_row_broadcast", randn(3, 4, rng), randn(1, 4, rng), ad::add, 3, 4);
  binary("sub_col_broadcast", randn(3, 4, rng), randn(3, 1, rng), ad::sub, 3, 4);
  binary("mul", randn(3, 4, rng), randn(3, 4, rng), ad::mul, 3, 4);
  binary("mul_scalar_broadcast", randn(3, 4, rng), randn(1, 1, rng), ad::mul, 3, 4);
  binary("matmul", randn(3, 5, rng), randn(5, 2, rng), ad::matmul, 3, 2);
  unary("transpose", randn(3, 4, rng), ad::transpose, 4, 3);
  unary("relu", randn(3, 4, rng), ad::relu, 3, 4);
  unary("sigmoid", randn(3, 4, rng), ad::sigmoid, 3, 4);
  unary("exp", randn(3, 4, rng), ad::exp, 3, 4);
  unary("log", positive(3, 4, rng), ad::log, 3, 4);
  unary("clamp", randn(3, 4, rng), [](ad::Var a) { return ad::clamp(a, -0.5, 0.5); }, 3, 4);
  unary("scalar_scale", randn(3, 4, rng), [](ad::Var a) { return ad::scalar_scale(a, -1.7); }, 3, 4);
  unary("add_scalar", randn(3, 4, rng), [](ad::Var a) { return ad::add_scalar(a, 0.3); }, 3, 4);
  unary("softmax_rows", randn(3, 4, rng), ad::softmax_rows, 3, 4);
  unary("log_softmax_rows", randn(3, 4, rng), ad::log_softmax_rows, 3, 4);
  unary("layer_norm_rows", randn(3, 4, rng), [](ad::Var a) { return ad::layer_norm_rows(a); }, 3, 4);
  unary("mean_rows", randn(3, 4, rng), ad::mean_rows, 1, 4);
  {
    Matrix mask = Matrix::Zero(2, 4);
    mask(0, 0) = mask(0, 2) = 1.0;
    mask(1, 1) = mask(1, 2) = mask(1, 3) = 1.0;
    unary("masked_mean_rows", randn(4, 3, rng), [mask](ad::Var a) { return ad::masked_mean_rows(a, mask); },
          2, 3);
  }
  binary("concat_cols", randn(3, 2, rng), randn(3, 3, rng),
         [](ad::Var a, ad::Var b) { return ad::concat_cols({a, b}); }, 3, 5);
  binary("concat_rows", randn(2, 3, rng), randn(1, 3, rng),
         [](ad::Var a, ad::Var b) { return ad::concat_rows({a, b}); }, 3, 3);
  unary("row_l2_normalize", randn(3, 4, rng), [](ad::Var a) { return ad::row_l2_normalize(a); }, 3, 4);
  unary("sum", randn(3, 4, rng), ad::sum, 1, 1);
  {
    const std::vector<int> rows = {2, 0, 2, 1};
    unary("gather_rows", randn(3, 4, rng), [rows](ad::Var a) { return ad::gather_rows(a, rows); }, 4, 4);
  }
  unary("diagonal", randn(4, 4, rng), ad::diagonal, 4, 1);
  {
    auto& c = *cases.emplace_back(std::make_unique<Case>());
    c.name = "infonce_symmetric";
    c.params.add("hp", randn(4, 8, rng));
    c.params.add("hl", randn(4, 8, rng));
    ad::Parameter* a = &c.params.at("hp");
    ad::Parameter* b = &c.params.at("hl");
    c.f = [a, b](ad::Tape& t) { return loss::infonce_symmetric(t.leaf(*a), t.leaf(*b), 0.1); };
  }
  return cases;
}

// Small stage-2 model on a tiny synthetic corpus; the objective mirrors one
// finetuning batch.
struct CompositeCase {
  train::Model model;
  std::vector<train::PreparedProtein> proteins;
  std::vector<enc::MoleculeGeometry> ligands;
  std::vector<std::vector<std::uint8_t>> labels;
  std::vector<std::vector<std::size_t>> probes;
  double lambda = 0.5;

  ad::Var loss(ad::Tape& tape) {
    std::vector<ad::Var> hp;
    std::vector<ad::Var> hl;
    std::vector<ad::Var> residues;
    for (const auto& p : proteins) {
      train::PocketForward f = train::pocket_forward(tape, model, p);
      hp.push_back(f.embedding);
      residues.push_back(f.residues);
    }
    for (const auto& g : ligands) hl.push_back(train::ligand_embedding(tape, model, g));
    ad::Var h_l = ad::concat_rows(hl);
    ad::Var l_fc = loss::infonce_symmetric(ad::concat_rows(hp), h_l, 0.1);
    std::vector<ad::Var> y_hat;
    const bsp::ProbeHead head = model.probe_head();
    for (std::size_t n = 0; n < proteins.size(); ++n) {
      std::vector<int> rows(probes[n].begin(), probes[n].end());
      y_hat.push_back(bsp::residue_binding_prob(
          bsp::probe_attention(tape, head, residues[n], ad::gather_rows(h_l, rows))));
    }
    return loss::total_loss(l_fc, bsp::bsp_loss(tape, y_hat, labels), lambda);
  }
};

inline CompositeCase composite_case(std::uint64_t seed) {
  MotifConfig mc;
  mc.n_classes = 3;
  mc.motif_length = 3;
  mc.n_variants = 2;
  mc.atoms_per_residue = 2;
  mc.world_seed = seed;
  const Dataset ds = generate_synthetic_dataset(3, 10, 4, mc, seed);
  CompositeCase c{train::Model::create({8, 8, 8}, seed), {}, {}, {}, {}, 0.5};
  c.model.add_stage2(seed + 1, false);
  for (const auto& t : ds.triplets) {
    const ProteinRecord& p = ds.proteins.at(t.protein_id);
    const LigandRecord& l = ds.ligands.at(t.ligand_id);
    c.proteins.push_back(train::prepare_protein(p, true));
    c.ligands.push_back(enc::make_geometry(l));
    c.labels.push_back(derive_binding_labels(p, l).labels);
  }
  c.probes = bsp::sample_probes(c.proteins.size(), 2, seed);
  return c;
}

struct SuiteResult {
  bool passed = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::size_t roundoff_limited = 0;
  double worst_rel_error = 0.0;
  std::string worst;
  double seconds = 0.0;
};

inline void merge(SuiteResult& r, const std::string& name, const ad::GradCheckReport& g) {
  r.checked += g.checked;
  r.skipped += g.skipped;
  r.roundoff_limited += g.roundoff_limited;
  if (!g.passed) r.passed = false;
  if (g.worst_rel_error >= r.worst_rel_error) {
    r.worst_rel_error = g.worst_rel_error;
    r.worst = name + ": " + g.describe();
  }
}

inline SuiteResult run(int instances, double tol_rel, std::size_t composite_coordinates) {
  const auto start = std::chrono::steady_clock::now();
  SuiteResult result;
  for (int i = 0; i < instances; ++i) {
    Rng rng(mix_seed(static_cast<std::uint64_t>(i), 41));
    ad::GradCheckOptions opt;
    opt.step = 1e-5;
    opt.tol_rel = tol_rel;
    for (auto& c : primitive_cases(rng)) merge(result, c->name, ad::gradient_check(c->params, c->f, opt));
    CompositeCase comp = composite_case(static_cast<std::uint64_t>(i));
    opt.max_coordinates = composite_coordinates;
    opt.seed = static_cast<std::uint64_t>(i);
    merge(result, "composite",
          ad::gradient_check(comp.model.params, [&comp](ad::Tape& t) { return comp.loss(t); }, opt));
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace s2::gradsuite
