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

#include <gtest/gtest.h>

#include <numeric>

#include "gradient_suite.hpp"

namespace s2::fusion {
namespace {

using gradsuite::randn;

struct Fixture {
  ad::ParameterSet params;
  FusionModule f;
  explicit Fixture(std::uint64_t seed, int d_s = 6, int d_g = 5, int d = 8) {
    Rng rng(seed);
    f = FusionModule::create(params, "fusion", d_s, d_g, d, rng);
  }
};

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

TEST(AtomsToResiduesTest, MeanOfAssignedAtoms) {
  ad::Tape t;
  Matrix z(3, 2);
  z << 1, 1, 3, 3, 7, 9;
  const std::vector<int> assign = {4, 4, 2};
  const std::vector<int> pocket = {2, 4};
  const Matrix out = atoms_to_residues(t.constant(z), assign, pocket).value();
  EXPECT_EQ(out.row(0), row({7, 9}));
  EXPECT_EQ(out.row(1), row({2, 2}));
}

TEST(AtomsToResiduesTest, OneAtomPerResidueReorders) {
  ad::Tape t;
  Rng rng(1);
  const Matrix z = randn(4, 3, rng);
  const std::vector<int> assign = {9, 1, 5, 3};
  const std::vector<int> pocket = {1, 3, 5, 9};
  const Matrix out = atoms_to_residues(t.constant(z), assign, pocket).value();
  EXPECT_EQ(out.row(0), z.row(1));
  EXPECT_EQ(out.row(1), z.row(3));
  EXPECT_EQ(out.row(2), z.row(2));
  EXPECT_EQ(out.row(3), z.row(0));
}

TEST(AtomsToResiduesTest, EmptyResidueThrows) {
  ad::Tape t;
  const std::vector<int> assign = {1, 1};
  const std::vector<int> pocket = {1, 2};
  EXPECT_THROW(atoms_to_residues(t.constant(Matrix::Ones(2, 2)), assign, pocket), DataError);
}

TEST(GateTest, ZeroGateAverages) {
  Fixture fx(2);
  fx.f.w_beta->value.setZero();
  Rng rng(2);
  ad::Tape t;
  const Matrix xs = randn(3, 6, rng);
  const Matrix xg = randn(3, 5, rng);
  const GateOutput g = gate_fuse(t, fx.f, t.constant(xs), t.constant(xg));
  const Matrix expected = 0.5 * (xs * fx.f.w_s->value + xg * fx.f.w_g->value);
  EXPECT_LT((g.fused.value() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((g.beta.value().array() - 0.5).abs().maxCoeff(), 1e-15);
}

TEST(GateTest, SaturatedBiasSelectsSequence) {
  Fixture fx(3);
  fx.f.b_beta->value(0, 0) = 50.0;
  Rng rng(3);
  ad::Tape t;
  const Matrix xs = randn(4, 6, rng);
  const Matrix xg = randn(4, 5, rng);
  const GateOutput g = gate_fuse(t, fx.f, t.constant(xs), t.constant(xg));
  EXPECT_LT((g.fused.value() - xs * fx.f.w_s->value).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GateTest, ZeroInputsGiveZeroRows) {
  Fixture fx(4);
  fx.f.b_beta->value(0, 0) = 0.7;
  ad::Tape t;
  const GateOutput g = gate_fuse(t, fx.f, t.constant(Matrix::Zero(2, 6)), t.constant(Matrix::Zero(2, 5)));
  EXPECT_EQ(g.fused.value().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(g.beta.value()(0, 0), 1.0 / (1.0 + std::exp(-0.7)), 1e-15);
  EXPECT_THROW(gate_fuse(t, fx.f, t.constant(Matrix::Zero(2, 6)), t.constant(Matrix::Zero(3, 5))), ShapeError);
}

TEST(GateTest, BetaStrictlyInsideUnitInterval) {
  Rng rng(5);
  for (int trial = 0; trial < 10000; ++trial) {
    Fixture fx(static_cast<std::uint64_t>(trial) % 17);
    fx.f.b_beta->value(0, 0) = rng.normal();
    ad::Tape t;
    const GateOutput g = gate_fuse(t, fx.f, t.constant(randn(1, 6, rng)), t.constant(randn(1, 5, rng)));
    const double b = g.beta.value()(0, 0);
    ASSERT_GT(b, 0.0);
    ASSERT_LT(b, 1.0);
  }
}

TEST(GateTest, StructureOffReducesToSequenceOnly) {
  Fixture fx(6);
  fx.f.b_beta->value(0, 0) = 50.0;
  Rng rng(6);
  ad::Tape t;
  const Matrix xs = randn(5, 6, rng);
  ad::Var fused = gate_fuse(t, fx.f, t.constant(xs), t.constant(Matrix::Zero(5, 5))).fused;
  const Matrix a = pool_fused_pocket(fused).value();
  const Matrix b = sequence_only_pocket(t, fx.f, t.constant(xs)).value();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ContextualizeTest, SingleResidueAttendsToItself) {
  Fixture fx(7);
  Rng rng(7);
  ad::Tape t;
  std::vector<Matrix> attn;
  contextualize_pocket(t, fx.f, t.constant(randn(1, 8, rng)), &attn);
  ASSERT_EQ(attn.size(), 2u);
  for (const auto& a : attn) EXPECT_DOUBLE_EQ(a(0, 0), 1.0);
}

TEST(ContextualizeTest, AttentionRowsSumToOne) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    Fixture fx(static_cast<std::uint64_t>(trial));
    ad::Tape t;
    std::vector<Matrix> attn;
    contextualize_pocket(t, fx.f, t.constant(3.0 * randn(1 + rng.index(9), 8, rng)), &attn);
    for (const auto& a : attn) {
      ASSERT_LT((a.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-9);
    }
  }
}

TEST(ContextualizeTest, PermutationEquivariantAndPoolingInvariant) {
  Fixture fx(9);
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = randn(6, 8, rng);
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Matrix px(6, 8);
    for (int i = 0; i < 6; ++i) px.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
    ad::Tape t;
    const Matrix a = contextualize_pocket(t, fx.f, t.constant(x)).value();
    const Matrix b = contextualize_pocket(t, fx.f, t.constant(px)).value();
    for (int i = 0; i < 6; ++i) {
      ASSERT_LT((b.row(i) - a.row(perm[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff(), 1e-12);
    }
    ASSERT_LT((pool_fused_pocket(t.constant(a)).value() - pool_fused_pocket(t.constant(b)).value())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(PoolTest, Examples) {
  ad::Tape t;
  Matrix same(3, 2);
  same << 1, 2, 1, 2, 1, 2;
  EXPECT_EQ(pool_fused_pocket(t.constant(same)).value(), row({1, 2}));
  Matrix opposite(2, 2);
  opposite << 1, -2, -1, 2;
  EXPECT_EQ(pool_fused_pocket(t.constant(opposite)).value(), row({0, 0}));
  Rng rng(10);
  const Matrix r = randn(3, 5, rng);
  const Matrix got = pool_fused_pocket(t.constant(r)).value();
  for (Eigen::Index c = 0; c < 5; ++c) {
    EXPECT_NEAR(got(0, c), (r(0, c) + r(1, c) + r(2, c)) / 3.0, 1e-15);
  }
}

TEST(FusionGradientTest, GatePathAndPoolingPassFiniteDifferences) {
  Fixture fx(11);
  Rng rng(11);
  const Matrix xs = randn(4, 6, rng);
  const Matrix z = randn(7, 5, rng);
  const std::vector<int> assign = {0, 0, 1, 2, 2, 3, 3};
  const std::vector<int> pocket = {0, 1, 2, 3};
  fx.params.add("x_s", xs);
  ad::GradCheckOptions opt;
  opt.tol_rel = 1e-3;
  const ad::GradCheckReport r = ad::gradient_check(fx.params, [&](ad::Tape& t) {
    ad::Var xg = atoms_to_residues(t.constant(z), assign, pocket);
    ad::Var fused = gate_fuse(t, fx.f, t.leaf(fx.params.at("x_s")), xg).fused;
    ad::Var h = pool_fused_pocket(contextualize_pocket(t, fx.f, fused));
    return ad::sum(ad::mul(h, h));
  }, opt);
  EXPECT_TRUE(r.passed) << r.describe();
}

}  // namespace
}  // namespace s2::fusion
