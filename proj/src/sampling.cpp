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

#include "s2screen/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace s2::sampling {

namespace {

// Lexicographic (score, identical columns) so that ties in score prefer the
// alignment with more identities; both components add along a path.
struct Cell {
  int score;
  int ident;
  bool operator<(const Cell& o) const {
    return score < o.score || (score == o.score && ident < o.ident);
  }
};

constexpr int kMatch = 2;
constexpr int kMismatch = -1;
constexpr int kGap = -2;

}  // namespace

double seq_identity(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("seq_identity: empty sequence");
  const std::size_t m = b.size();
  std::vector<Cell> prev(m + 1);
  std::vector<Cell> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {kGap * static_cast<int>(j), 0};
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = {kGap * static_cast<int>(i), 0};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = a[i - 1] == b[j - 1];
      Cell diag{prev[j - 1].score + (same ? kMatch : kMismatch), prev[j - 1].ident + (same ? 1 : 0)};
      Cell up{prev[j].score + kGap, prev[j].ident};
      Cell left{cur[j - 1].score + kGap, cur[j - 1].ident};
      cur[j] = std::max({diag, up, left});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m].ident) / static_cast<double>(std::max(a.size(), b.size()));
}

HomologyClusters cluster_homologs(const std::vector<const ProteinRecord*>& proteins,
                                  double threshold) {
  if (proteins.empty()) throw std::invalid_argument("cluster_homologs: no proteins");
  std::vector<const ProteinRecord*> order = proteins;
  std::sort(order.begin(), order.end(), [](const ProteinRecord* x, const ProteinRecord* y) {
    if (x->length() != y->length()) return x->length() > y->length();
    return x->id < y->id;
  });
  HomologyClusters out;
  out.identity_threshold = threshold;
  std::vector<const ProteinRecord*> reps;
  for (const ProteinRecord* p : order) {
    std::size_t home = reps.size();
    for (std::size_t k = 0; k < reps.size(); ++k) {
      if (seq_identity(reps[k]->sequence, p->sequence) >= threshold) {
        home = k;
        break;
      }
    }
    if (home == reps.size()) {
      reps.push_back(p);
      out.representatives.push_back(p->id);
      out.clusters.emplace_back();
    }
    out.clusters[home].push_back(p->id);
    out.cluster_of[p->id] = home;
  }
  return out;
}

HomologyClusters cluster_homologs(const std::map<std::string, ProteinRecord>& proteins,
                                  double threshold) {
  std::vector<const ProteinRecord*> list;
  for (const auto& [id, p] : proteins) list.push_back(&p);
  return cluster_homologs(list, threshold);
}

double homology_weight(std::size_t cluster_size, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("homology_weight: alpha outside (0, 1]");
  if (cluster_size < 1) throw std::invalid_argument("homology_weight: empty cluster");
  return std::pow(static_cast<double>(cluster_size), -alpha);
}

std::set<std::string> functional_dedup(const std::map<std::string, ProteinRecord>& proteins,
                                       const std::vector<AffinityTriplet>& triplets) {
  std::map<std::string, std::set<std::string>> ligands_of;
  for (const auto& t : triplets) ligands_of[t.protein_id].insert(t.ligand_id);
  auto diversity = [&](const std::string& id) {
    auto it = ligands_of.find(id);
    return it == ligands_of.end() ? std::size_t{0} : it->second.size();
  };

  std::set<std::string> retained;
  std::map<std::string, std::string> best_of_group;
  for (const auto& [id, p] : proteins) {
    if (!p.annotation) {
      retained.insert(id);
      continue;
    }
    auto [it, inserted] = best_of_group.try_emplace(*p.annotation, id);
    // Map iteration is in id order, so ties keep the earlier (smaller) id.
    if (!inserted && diversity(id) > diversity(it->second)) it->second = id;
  }
  for (const auto& [group, id] : best_of_group) retained.insert(id);
  return retained;
}

AffinityStats affinity_variability(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("affinity_variability: no values");
  std::vector<double> logs;
  logs.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("affinity_variability: non-positive value");
    logs.push_back(std::log10(v));
  }
  const double mean = std::accumulate(logs.begin(), logs.end(), 0.0) / static_cast<double>(logs.size());
  if (logs.size() == 1) return {0.0, mean};
  double ss = 0.0;
  for (double l : logs) ss += (l - mean) * (l - mean);
  return {std::sqrt(ss / static_cast<double>(logs.size())), mean};
}

double p_affinity(double canonical_log10, AffinityScale scale) {
  return scale == AffinityScale::kNanomolar ? 9.0 - canonical_log10 : canonical_log10;
}

bool frequent_hitter_keep(int f, std::span<const double> p_affinities, int cutoff,
                          double strong_cut) {
  if (f <= cutoff) return true;
  const auto strong = std::count_if(p_affinities.begin(), p_affinities.end(),
                                    [&](double p) { return p >= strong_cut; });
  return 2 * static_cast<std::size_t>(strong) > p_affinities.size();
}

bool pains_flag(const std::optional<std::string>& smiles, std::span<const std::string> denylist) {
  if (!smiles) return false;
  return std::any_of(denylist.begin(), denylist.end(), [&](const std::string& pattern) {
    return smiles->find(pattern) != std::string::npos;
  });
}

SamplingPlan make_plan(const Dataset& dataset, const HomologyClusters& clusters, double alpha) {
  SamplingPlan plan;
  plan.alpha = alpha;
  for (const auto& [id, p] : dataset.proteins) {
    auto it = clusters.cluster_of.find(id);
    const std::size_t size = it == clusters.cluster_of.end() ? 1 : clusters.clusters[it->second].size();
    plan.protein_probability[id] = homology_weight(size, alpha);
  }
  for (const auto& [id, l] : dataset.ligands) {
    plan.ligand_weight[id] = 1.0 / static_cast<double>(std::max(l.target_count, 1));
  }
  plan.clean.assign(dataset.triplets.size(), true);
  plan.target_size = dataset.triplets.size();
  return plan;
}

Dataset joint_subsample(const Dataset& dataset, const SamplingPlan& plan) {
  if (plan.clean.size() != dataset.triplets.size()) {
    throw std::invalid_argument("joint_subsample: clean flags do not match triplets");
  }
  const auto pool = static_cast<std::size_t>(std::count(plan.clean.begin(), plan.clean.end(), true));
  if (plan.target_size > pool) {
    throw std::invalid_argument("joint_subsample: target_size " + std::to_string(plan.target_size) +
                                " exceeds clean pool of " + std::to_string(pool));
  }

  struct Keyed {
    double log_key;
    std::size_t index;
  };
  std::vector<Keyed> keys;
  keys.reserve(pool);
  Rng rng(plan.seed);
  for (std::size_t i = 0; i < dataset.triplets.size(); ++i) {
    if (!plan.clean[i]) continue;
    const auto& t = dataset.triplets[i];
    const double w = plan.protein_probability.at(t.protein_id) * plan.ligand_weight.at(t.ligand_id);
    if (!(w > 0.0)) throw std::invalid_argument("joint_subsample: non-positive weight");
    // log(U^(1/w)) keeps the ordering of U^(1/w) without underflow.
    keys.push_back({std::log(rng.uniform_open_low()) / w, i});
  }
  std::stable_sort(keys.begin(), keys.end(),
                   [](const Keyed& a, const Keyed& b) { return a.log_key > b.log_key; });
  keys.resize(plan.target_size);
  std::sort(keys.begin(), keys.end(), [](const Keyed& a, const Keyed& b) { return a.index < b.index; });

  Dataset out;
  for (const Keyed& k : keys) {
    const auto& t = dataset.triplets[k.index];
    out.triplets.push_back(t);
    out.proteins.try_emplace(t.protein_id, dataset.proteins.at(t.protein_id));
    out.ligands.try_emplace(t.ligand_id, dataset.ligands.at(t.ligand_id));
  }
  out.count_targets();
  return out;
}

nlohmann::json CurationReport::to_json() const {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [size, count] : cluster_size_histogram) hist[std::to_string(size)] = count;
  return {{"input_triplets", input_triplets},
          {"input_pairs", input_pairs},
          {"clusters", clusters},
          {"cluster_size_histogram", hist},
          {"removed",
           {{"functional_dedup", removed_functional_dedup},
            {"affinity_variance", removed_affinity_variance},
            {"frequent_hitter", removed_frequent_hitter},
            {"pains", removed_pains},
            {"subsample", removed_subsample}}},
          {"output_triplets", output_triplets}};
}

std::pair<Dataset, CurationReport> run_bilateral_pipeline(const Dataset& dataset,
                                                          const PipelineConfig& config) {
  CurationReport report;
  report.input_triplets = dataset.triplets.size();

  // Step 1: protein side.
  const HomologyClusters clusters = cluster_homologs(dataset.proteins, config.identity_threshold);
  report.clusters = clusters.clusters.size();
  for (const auto& c : clusters.clusters) ++report.cluster_size_histogram[c.size()];
  const std::set<std::string> retained = functional_dedup(dataset.proteins, dataset.triplets);

  // Collapse repeated measurements of a pair, in order of first appearance.
  struct Pair {
    AffinityTriplet canonical;
    std::vector<double> values;
    double canonical_log = 0.0;
    bool clean = true;
  };
  std::vector<Pair> pairs;
  std::map<std::pair<std::string, std::string>, std::size_t> pair_index;
  for (const auto& t : dataset.triplets) {
    auto [it, inserted] = pair_index.try_emplace({t.protein_id, t.ligand_id}, pairs.size());
    if (inserted) pairs.push_back({t, {}, 0.0, true});
    pairs[it->second].values.push_back(t.affinity);
  }
  report.input_pairs = pairs.size();

  // Step 2: ligand side.
  for (Pair& p : pairs) {
    const AffinityStats stats = affinity_variability(p.values);
    p.canonical_log = stats.canonical;
    if (p.values.size() > 1) {
      p.canonical.affinity = std::pow(10.0, stats.canonical);
      p.canonical.assay_id.clear();
    }
    if (!retained.count(p.canonical.protein_id)) {
      p.clean = false;
      ++report.removed_functional_dedup;
    } else if (stats.sigma >= config.delta) {
      p.clean = false;
      ++report.removed_affinity_variance;
    }
  }

  std::map<std::string, std::vector<std::size_t>> clean_pairs_of_ligand;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].clean) clean_pairs_of_ligand[pairs[i].canonical.ligand_id].push_back(i);
  }
  for (const auto& [ligand_id, members] : clean_pairs_of_ligand) {
    std::vector<double> p_values;
    for (std::size_t i : members) p_values.push_back(p_affinity(pairs[i].canonical_log, config.scale));
    // Pairs are distinct (protein, ligand), so |members| counts distinct proteins.
    const int f = static_cast<int>(members.size());
    if (!frequent_hitter_keep(f, p_values, config.hitter_cutoff, config.strong_cut)) {
      for (std::size_t i : members) pairs[i].clean = false;
      report.removed_frequent_hitter += members.size();
    }
  }
  for (Pair& p : pairs) {
    if (p.clean && pains_flag(dataset.ligands.at(p.canonical.ligand_id).smiles, config.pains_denylist)) {
      p.clean = false;
      ++report.removed_pains;
    }
  }

  // Step 3: joint subsample over the collapsed pairs.
  Dataset collapsed;
  collapsed.proteins = dataset.proteins;
  collapsed.ligands = dataset.ligands;
  for (const Pair& p : pairs) collapsed.triplets.push_back(p.canonical);
  SamplingPlan plan = make_plan(collapsed, clusters, config.alpha);
  plan.delta = config.delta;
  plan.hitter_cutoff = config.hitter_cutoff;
  plan.seed = config.seed;
  for (std::size_t i = 0; i < pairs.size(); ++i) plan.clean[i] = pairs[i].clean;
  const auto pool = static_cast<std::size_t>(std::count(plan.clean.begin(), plan.clean.end(), true));
  plan.target_size = config.target_size.value_or(pool);
  Dataset out = joint_subsample(collapsed, plan);
  report.removed_subsample = pool - plan.target_size;
  report.output_triplets = out.triplets.size();
  return {std::move(out), report};
}

}  // namespace s2::sampling
