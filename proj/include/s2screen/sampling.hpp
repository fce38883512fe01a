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

// Bilateral curation of protein-ligand affinity data: homology-aware
// protein weights, functional deduplication, affinity-variance and
// frequent-hitter filtering, and rebalanced weighted subsampling.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "s2screen/datamodel.hpp"

namespace s2::sampling {

// Global alignment identity: Needleman-Wunsch with match +2, mismatch -1 and
// linear gap -2. Among optimal-score alignments the one with the most
// identical columns is used. Identity = identical columns / max(|a|, |b|).
// Throws std::invalid_argument on an empty sequence.
double seq_identity(std::string_view a, std::string_view b);

struct HomologyClusters {
  double identity_threshold = 0.40;
  std::vector<std::vector<std::string>> clusters;
  // representatives[k] founded clusters[k].
  std::vector<std::string> representatives;
  std::map<std::string, std::size_t> cluster_of;

  std::size_t size_of(const std::string& protein_id) const {
    return clusters.at(cluster_of.at(protein_id)).size();
  }
};

// Greedy incremental clustering: proteins in descending length (ties by id)
// join the first cluster whose representative has identity >= threshold.
HomologyClusters cluster_homologs(const std::vector<const ProteinRecord*>& proteins,
                                  double threshold = 0.40);
HomologyClusters cluster_homologs(const std::map<std::string, ProteinRecord>& proteins,
                                  double threshold = 0.40);

// cluster_size^-alpha. Throws std::invalid_argument unless alpha in (0, 1]
// and cluster_size >= 1.
double homology_weight(std::size_t cluster_size, double alpha = 0.5);

// Keeps one protein per annotation: the one binding the most distinct
// ligands, ties to the smallest id. Proteins without annotation are kept.
std::set<std::string> functional_dedup(const std::map<std::string, ProteinRecord>& proteins,
                                       const std::vector<AffinityTriplet>& triplets);

struct AffinityStats {
  // Population standard deviation of log10 values.
  double sigma = 0.0;
  // Mean of log10 values.
  double canonical = 0.0;
};

AffinityStats affinity_variability(std::span<const double> values);

enum class AffinityScale {
  // Concentrations in nM: pAffinity = 9 - log10(value).
  kNanomolar,
  // Values are already pAffinity.
  kPValue,
};

double p_affinity(double canonical_log10, AffinityScale scale);

// f <= cutoff keeps; otherwise keeps iff strictly more than half of the
// pAffinity values are >= strong_cut.
bool frequent_hitter_keep(int f, std::span<const double> p_affinities, int cutoff = 20,
                          double strong_cut = 6.0);

// True iff any denylist pattern is a substring of |smiles|.
bool pains_flag(const std::optional<std::string>& smiles, std::span<const std::string> denylist);

struct SamplingPlan {
  std::map<std::string, double> protein_probability;
  std::map<std::string, double> ligand_weight;
  // Aligned with the dataset's triplets.
  std::vector<bool> clean;
  double alpha = 0.5;
  double delta = 1.0;
  int hitter_cutoff = 20;
  std::size_t target_size = 0;
  std::uint64_t seed = 0;
};

// Weight Pr(P) * w_lig(L) per clean triplet; draws target_size triplets
// without replacement by keeping the largest keys U^(1/weight). Throws
// std::invalid_argument if target_size exceeds the clean pool.
Dataset joint_subsample(const Dataset& dataset, const SamplingPlan& plan);

// Plan weights from clusters (Pr) and ligand target counts (1 / max(f, 1)).
SamplingPlan make_plan(const Dataset& dataset, const HomologyClusters& clusters, double alpha);

struct PipelineConfig {
  double alpha = 0.5;
  double delta = 1.0;
  int hitter_cutoff = 20;
  double strong_cut = 6.0;
  double identity_threshold = 0.40;
  AffinityScale scale = AffinityScale::kNanomolar;
  std::vector<std::string> pains_denylist;
  // Defaults to the whole clean pool.
  std::optional<std::size_t> target_size;
  std::uint64_t seed = 0;
};

struct CurationReport {
  std::size_t input_triplets = 0;
  std::size_t input_pairs = 0;
  std::size_t clusters = 0;
  std::map<std::size_t, std::size_t> cluster_size_histogram;
  // Removal counts are in (protein, ligand) pairs.
  std::size_t removed_functional_dedup = 0;
  std::size_t removed_affinity_variance = 0;
  std::size_t removed_frequent_hitter = 0;
  std::size_t removed_pains = 0;
  std::size_t removed_subsample = 0;
  std::size_t output_triplets = 0;

  std::size_t total_removed() const {
    return removed_functional_dedup + removed_affinity_variance + removed_frequent_hitter +
           removed_pains;
  }
  nlohmann::json to_json() const;
};

// Step 1 (clusters -> weights, functional dedup), step 2 (variance, hitter,
// denylist) on pairs collapsed to their canonical affinity, step 3 (joint
// subsample). Cluster sizes are taken before deduplication.
std::pair<Dataset, CurationReport> run_bilateral_pipeline(const Dataset& dataset,
                                                          const PipelineConfig& config);

}  // namespace s2::sampling
