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

// Ranking metrics for virtual screening and binding-site evaluation.
//
// Rankings sort by descending score; equal scores keep input order. PR-AUC
// and f1_best work per distinct score threshold (predict positive iff
// score >= t), so tied items enter together.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace s2::metrics {

struct RankedList {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return scores.size(); }
  std::size_t positives() const;
  // Throws std::invalid_argument on length mismatch, non-finite score or a
  // label other than 0/1.
  void validate() const;
};

// Indices by descending score, ties by input order.
std::vector<std::size_t> rank_order(std::span<const double> scores);

// Mann-Whitney U / (n_pos n_neg), ties credited 0.5.
double auroc(const RankedList& list);

// Exponential early-recognition score, min-max rescaled so that all actives
// first gives 1 and all actives last gives 0.
double bedroc(const RankedList& list, double alpha = 80.5);

// (actives in the top ceil(x N) / n) / x.
double enrichment_factor(const RankedList& list, double fraction);

// Average precision: sum over thresholds of recall gain times precision.
double pr_auc(const RankedList& list);

struct F1Result {
  double f1 = 0.0;
  double threshold = 0.0;
};

// Best F1 over thresholds at every distinct score; on ties the highest
// threshold wins.
F1Result f1_best(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Rounds 100 x to 2 decimals.
double percent(double x);
std::string format_percent(double x);

struct TargetMetrics {
  std::string target_id;
  double auroc = 0.0;
  double bedroc = 0.0;
  double ef_0_5 = 0.0;
  double ef_1 = 0.0;
  double ef_5 = 0.0;
};

struct ScreeningReport {
  std::vector<TargetMetrics> per_target;
  // Unweighted means over targets, fraction scale (EF unscaled).
  TargetMetrics macro;

  // AUROC and BEDROC percentage-scaled, EF as ratios, all to 2 decimals.
  nlohmann::json to_json() const;
};

using NamedList = std::pair<std::string, RankedList>;

ScreeningReport evaluate_screening(const std::vector<NamedList>& targets);

struct SiteMetrics {
  std::string protein_id;
  double pr_auc = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;
  double prevalence = 0.0;
};

struct SiteReport {
  std::vector<SiteMetrics> per_protein;
  std::size_t skipped_no_positive = 0;
  SiteMetrics macro;

  nlohmann::json to_json() const;
};

// Proteins without a positive residue are skipped and counted.
SiteReport evaluate_sites(const std::vector<NamedList>& proteins);

// JSONL {"target_id", "scores", "labels"} per line. Throws DataError with
// "<source>:<line>: <reason>".
std::vector<NamedList> read_ranks(std::istream& in, std::string_view source = "ranks");
void write_ranks(std::ostream& out, const std::vector<NamedList>& lists);

}  // namespace s2::metrics
