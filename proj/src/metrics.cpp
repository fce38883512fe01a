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

#include "s2screen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "s2screen/core.hpp"

namespace s2::metrics {

namespace {

void require_both_classes(const RankedList& list, const char* what) {
  list.validate();
  const std::size_t pos = list.positives();
  if (pos == 0 || pos == list.size()) {
    throw std::invalid_argument(std::string(what) + ": need at least one positive and one negative");
  }
}

void require_positive(const RankedList& list, const char* what) {
  list.validate();
  if (list.positives() == 0) throw std::invalid_argument(std::string(what) + ": no positives");
}

// Groups of equal score in descending order: (end offset in |order|).
std::vector<std::size_t> tie_group_ends(const std::vector<std::size_t>& order,
                                        std::span<const double> scores) {
  std::vector<std::size_t> ends;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k + 1 == order.size() || scores[order[k + 1]] != scores[order[k]]) ends.push_back(k + 1);
  }
  return ends;
}

}  // namespace

std::size_t RankedList::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

void RankedList::validate() const {
  if (scores.size() != labels.size()) throw std::invalid_argument("RankedList: scores/labels length differ");
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("RankedList: non-finite score");
  }
  for (auto l : labels) {
    if (l > 1) throw std::invalid_argument("RankedList: label must be 0 or 1");
  }
}

std::vector<std::size_t> rank_order(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double auroc(const RankedList& list) {
  require_both_classes(list, "auroc");
  // Ascending tie-averaged ranks; twice the U statistic stays integral.
  std::vector<std::size_t> order = rank_order(list.scores);
  std::reverse(order.begin(), order.end());
  double twice_rank_sum = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t j = k;
    while (j < order.size() && list.scores[order[j]] == list.scores[order[k]]) ++j;
    // Ranks k+1..j average to (k+1+j)/2.
    const double twice_avg = static_cast<double>(k + 1 + j);
    for (std::size_t t = k; t < j; ++t) {
      if (list.labels[order[t]]) twice_rank_sum += twice_avg;
    }
    k = j;
  }
  const double n_pos = static_cast<double>(list.positives());
  const double n_neg = static_cast<double>(list.size()) - n_pos;
  const double twice_u = twice_rank_sum - n_pos * (n_pos + 1.0);
  return twice_u / (2.0 * n_pos * n_neg);
}

double bedroc(const RankedList& list, double alpha) {
  require_both_classes(list, "bedroc");
  if (!(alpha > 0.0)) throw std::invalid_argument("bedroc: alpha must be > 0");
  const std::vector<std::size_t> order = rank_order(list.scores);
  const std::size_t n_total = list.size();
  const std::size_t n_act = list.positives();
  const double big_n = static_cast<double>(n_total);
  auto weight = [&](std::size_t rank) { return std::exp(-alpha * static_cast<double>(rank) / big_n); };
  double s = 0.0;
  for (std::size_t k = 0; k < n_total; ++k) {
    if (list.labels[order[k]]) s += weight(k + 1);
  }
  double s_max = 0.0;
  for (std::size_t r = 1; r <= n_act; ++r) s_max += weight(r);
  double s_min = 0.0;
  for (std::size_t r = n_total - n_act + 1; r <= n_total; ++r) s_min += weight(r);
  return (s - s_min) / (s_max - s_min);
}

double enrichment_factor(const RankedList& list, double fraction) {
  list.validate();
  if (list.size() == 0) throw std::invalid_argument("enrichment_factor: empty list");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("enrichment_factor: fraction must be in (0, 1]");
  }
  const std::size_t n_act = list.positives();
  if (n_act == 0) throw std::invalid_argument("enrichment_factor: no actives");
  const auto top = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(list.size()) - 1e-9));
  if (top < 1) throw std::invalid_argument("enrichment_factor: empty top set");
  const std::vector<std::size_t> order = rank_order(list.scores);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < top; ++k) hits += list.labels[order[k]];
  return (static_cast<double>(hits) / static_cast<double>(n_act)) / fraction;
}

double pr_auc(const RankedList& list) {
  require_positive(list, "pr_auc");
  const std::vector<std::size_t> order = rank_order(list.scores);
  const double n_pos = static_cast<double>(list.positives());
  double ap = 0.0;
  std::size_t tp = 0;
  std::size_t begin = 0;
  for (std::size_t end : tie_group_ends(order, list.scores)) {
    std::size_t gained = 0;
    for (std::size_t k = begin; k < end; ++k) gained += list.labels[order[k]];
    tp += gained;
    if (gained > 0) {
      ap += (static_cast<double>(gained) / n_pos) *
            (static_cast<double>(tp) / static_cast<double>(end));
    }
    begin = end;
  }
  return ap;
}

F1Result f1_best(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  RankedList list{{scores.begin(), scores.end()}, {labels.begin(), labels.end()}};
  require_positive(list, "f1_best");
  const std::vector<std::size_t> order = rank_order(list.scores);
  const std::size_t n_pos = list.positives();
  F1Result best{0.0, list.scores[order.front()]};
  std::size_t tp = 0;
  std::size_t begin = 0;
  for (std::size_t end : tie_group_ends(order, list.scores)) {
    for (std::size_t k = begin; k < end; ++k) tp += list.labels[order[k]];
    const std::size_t fp = end - tp;
    const std::size_t fn = n_pos - tp;
    const double f1 = tp == 0 ? 0.0
                              : 2.0 * static_cast<double>(tp) /
                                    static_cast<double>(2 * tp + fp + fn);
    if (f1 > best.f1) best = {f1, list.scores[order[end - 1]]};
    begin = end;
  }
  return best;
}

double percent(double x) { return std::round(x * 10000.0) / 100.0; }

std::string format_percent(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", percent(x));
  return buf;
}

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

nlohmann::json target_json(const TargetMetrics& m) {
  return {{"target_id", m.target_id},
          {"auroc", percent(m.auroc)},
          {"bedroc", percent(m.bedroc)},
          {"ef_0.5", round2(m.ef_0_5)},
          {"ef_1", round2(m.ef_1)},
          {"ef_5", round2(m.ef_5)}};
}

}  // namespace

nlohmann::json ScreeningReport::to_json() const {
  nlohmann::json out;
  out["targets"] = per_target.size();
  out["macro"] = target_json(macro);
  out["macro"].erase("target_id");
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : per_target) rows.push_back(target_json(t));
  out["per_target"] = std::move(rows);
  return out;
}

ScreeningReport evaluate_screening(const std::vector<NamedList>& targets) {
  if (targets.empty()) throw std::invalid_argument("evaluate_screening: no targets");
  ScreeningReport report;
  for (const auto& [id, list] : targets) {
    TargetMetrics m;
    m.target_id = id;
    m.auroc = auroc(list);
    m.bedroc = bedroc(list);
    m.ef_0_5 = enrichment_factor(list, 0.005);
    m.ef_1 = enrichment_factor(list, 0.01);
    m.ef_5 = enrichment_factor(list, 0.05);
    report.per_target.push_back(std::move(m));
  }
  const double n = static_cast<double>(report.per_target.size());
  report.macro.target_id = "macro";
  for (const auto& m : report.per_target) {
    report.macro.auroc += m.auroc / n;
    report.macro.bedroc += m.bedroc / n;
    report.macro.ef_0_5 += m.ef_0_5 / n;
    report.macro.ef_1 += m.ef_1 / n;
    report.macro.ef_5 += m.ef_5 / n;
  }
  return report;
}

nlohmann::json SiteReport::to_json() const {
  auto row = [](const SiteMetrics& m) {
    return nlohmann::json{{"protein_id", m.protein_id},
                          {"pr_auc", percent(m.pr_auc)},
                          {"f1", percent(m.f1)},
                          {"threshold", m.threshold},
                          {"prevalence", percent(m.prevalence)}};
  };
  nlohmann::json out;
  out["proteins"] = per_protein.size();
  out["skipped_no_positive"] = skipped_no_positive;
  out["macro"] = row(macro);
  out["macro"].erase("protein_id");
  out["macro"].erase("threshold");
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : per_protein) rows.push_back(row(m));
  out["per_protein"] = std::move(rows);
  return out;
}

SiteReport evaluate_sites(const std::vector<NamedList>& proteins) {
  SiteReport report;
  for (const auto& [id, list] : proteins) {
    list.validate();
    if (list.positives() == 0) {
      ++report.skipped_no_positive;
      continue;
    }
    SiteMetrics m;
    m.protein_id = id;
    m.pr_auc = pr_auc(list);
    const F1Result f1 = f1_best(list.scores, list.labels);
    m.f1 = f1.f1;
    m.threshold = f1.threshold;
    m.prevalence = static_cast<double>(list.positives()) / static_cast<double>(list.size());
    report.per_protein.push_back(std::move(m));
  }
  if (report.per_protein.empty()) throw std::invalid_argument("evaluate_sites: no protein with a positive");
  const double n = static_cast<double>(report.per_protein.size());
  report.macro.protein_id = "macro";
  for (const auto& m : report.per_protein) {
    report.macro.pr_auc += m.pr_auc / n;
    report.macro.f1 += m.f1 / n;
    report.macro.prevalence += m.prevalence / n;
  }
  return report;
}

std::vector<NamedList> read_ranks(std::istream& in, std::string_view source) {
  std::vector<NamedList> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    return DataError(std::string(source) + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("invalid JSON: ") + e.what());
    }
    try {
      RankedList list;
      list.scores = j.at("scores").get<std::vector<double>>();
      for (int l : j.at("labels").get<std::vector<int>>()) {
        if (l != 0 && l != 1) throw fail("label must be 0 or 1");
        list.labels.push_back(static_cast<std::uint8_t>(l));
      }
      list.validate();
      out.emplace_back(j.at("target_id").get<std::string>(), std::move(list));
    } catch (const nlohmann::json::exception& e) {
      throw fail(std::string("bad record: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
  }
  return out;
}

void write_ranks(std::ostream& out, const std::vector<NamedList>& lists) {
  for (const auto& [id, list] : lists) {
    std::vector<int> labels(list.labels.begin(), list.labels.end());
    out << nlohmann::json{{"target_id", id}, {"scores", list.scores}, {"labels", labels}}.dump()
        << '\n';
  }
}

}  // namespace s2::metrics
