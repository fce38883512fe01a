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

#include "s2screen/splits.hpp"

#include <gtest/gtest.h>

#include <set>

#include "sampling_fixtures.hpp"

namespace s2::splits {
namespace {

using fixtures::protein;

std::vector<ProteinRecord> values(const std::map<std::string, ProteinRecord>& m) {
  std::vector<ProteinRecord> out;
  for (const auto& [id, p] : m) out.push_back(p);
  return out;
}

std::set<std::string> removed_ids(const ExclusionResult& r) {
  std::set<std::string> out;
  for (const auto& w : r.removed) out.insert(w.train_id);
  return out;
}

TEST(HomologyExclusionTest, DisjointSetsUnchanged) {
  const std::vector<ProteinRecord> train = {protein("T1", "WWWWWWWWWW"), protein("T2", "YYYYYYYYYY")};
  const std::vector<ProteinRecord> test = {protein("Q1", "AAAAAAAAAA")};
  const ExclusionResult r = homology_exclusion_split(train, test, 0.9);
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.kept[0].id, "T1");
  EXPECT_EQ(r.kept[1].id, "T2");
  EXPECT_TRUE(r.removed.empty());
}

TEST(HomologyExclusionTest, DuplicatedTestProteinRemoved) {
  const std::vector<ProteinRecord> train = {protein("T1", "ACDEFGHIKL"), protein("T2", "WWWWWWWWWW")};
  const std::vector<ProteinRecord> test = {protein("Q1", "ACDEFGHIKL")};
  const ExclusionResult r = homology_exclusion_split(train, test, 0.9);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].id, "T2");
  ASSERT_EQ(r.removed.size(), 1u);
  EXPECT_EQ(r.removed[0].train_id, "T1");
  EXPECT_EQ(r.removed[0].test_id, "Q1");
  EXPECT_DOUBLE_EQ(r.removed[0].identity, 1.0);
  const auto audit = r.audit_json();
  EXPECT_DOUBLE_EQ(audit.at("cutoff").get<double>(), 0.9);
  EXPECT_EQ(audit.at("removed").size(), 1u);
}

TEST(HomologyExclusionTest, LowerCutoffRemovesSuperset) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto train = values(fixtures::homolog_family(rng, 20));
    std::vector<ProteinRecord> test;
    for (const auto& p : values(fixtures::homolog_family(rng, 3))) {
      test.push_back(protein("Q" + p.id, p.sequence));
    }
    test.push_back(protein("QT", train[rng.index(train.size())].sequence));
    std::set<std::string> prev;
    for (double cutoff : {0.9, 0.6, 0.3}) {
      const auto r = homology_exclusion_split(train, test, cutoff);
      const auto ids = removed_ids(r);
      for (const auto& id : prev) EXPECT_TRUE(ids.count(id)) << id << " at " << cutoff;
      EXPECT_EQ(r.kept.size() + r.removed.size(), train.size());
      prev = ids;
    }
  }
}

TEST(HomologyExclusionTest, EveryRemovalHasWitnessAndKeptAreBelowCutoff) {
  Rng rng(2);
  const auto train = values(fixtures::homolog_family(rng, 25));
  std::vector<ProteinRecord> test = {train[3], train[9]};
  test[0].id = "Q0";
  test[1].id = "Q1";
  for (double cutoff : {0.9, 0.6, 0.3}) {
    const auto r = homology_exclusion_split(train, test, cutoff);
    for (const auto& w : r.removed) {
      EXPECT_GE(w.identity, cutoff);
      const auto& t = *std::find_if(train.begin(), train.end(), [&](const auto& p) { return p.id == w.train_id; });
      const auto& q = *std::find_if(test.begin(), test.end(), [&](const auto& p) { return p.id == w.test_id; });
      EXPECT_DOUBLE_EQ(sampling::seq_identity(t.sequence, q.sequence), w.identity);
      for (const auto& other : test) EXPECT_LE(sampling::seq_identity(t.sequence, other.sequence), w.identity);
    }
    for (const auto& k : r.kept) {
      for (const auto& q : test) EXPECT_LT(sampling::seq_identity(k.sequence, q.sequence), cutoff);
    }
  }
}

TEST(HomologyExclusionTest, ThreadsMatchSerial) {
  Rng rng(3);
  const auto train = values(fixtures::homolog_family(rng, 30));
  std::vector<ProteinRecord> test = {train[0], train[17]};
  test[0].id = "Q0";
  test[1].id = "Q1";
  const auto a = homology_exclusion_split(train, test, 0.6, 1);
  const auto b = homology_exclusion_split(train, test, 0.6, 4);
  EXPECT_EQ(a.audit_json(), b.audit_json());
  ASSERT_EQ(a.kept.size(), b.kept.size());
  for (std::size_t i = 0; i < a.kept.size(); ++i) EXPECT_EQ(a.kept[i].id, b.kept[i].id);
}

TEST(HomologyExclusionTest, InvalidArguments) {
  const std::vector<ProteinRecord> one = {protein("A", "ACD")};
  EXPECT_THROW(homology_exclusion_split({}, one, 0.5), std::invalid_argument);
  EXPECT_THROW(homology_exclusion_split(one, {}, 0.5), std::invalid_argument);
  EXPECT_THROW(homology_exclusion_split(one, one, 0.0), std::invalid_argument);
  EXPECT_THROW(homology_exclusion_split(one, one, 1.5), std::invalid_argument);
  EXPECT_NO_THROW(homology_exclusion_split(one, one, 1.0));
}

}  // namespace
}  // namespace s2::splits
