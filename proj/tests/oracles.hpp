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

// Brute-force reference implementations shared by the unit tests and the
// acceptance driver. Written independently of the library code paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "s2screen/core.hpp"
#include "s2screen/metrics.hpp"

namespace s2::oracle {

// 1-based rank of item i: items with a strictly higher score, plus earlier
// items with an equal score, come first.
inline std::size_t rank_of(const std::vector<double>& s, std::size_t i) {
  std::size_t r = 1;
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] > s[i] || (s[j] == s[i] && j < i)) ++r;
  }
  return r;
}

inline double auroc(const metrics::RankedList& l) {
  double wins = 0.0;
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l.labels[i]) {
      pos += 1.0;
    } else {
      neg += 1.0;
    }
  }
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!l.labels[i]) continue;
    for (std::size_t j = 0; j < l.size(); ++j) {
      if (l.labels[j]) continue;
      if (l.scores[i] > l.scores[j]) wins += 1.0;
      if (l.scores[i] == l.scores[j]) wins += 0.5;
    }
  }
  return wins / (pos * neg);
}

// Closed-form Truchon-Bayly expression in terms of RIE.
inline double bedroc(const metrics::RankedList& l, double alpha = 80.5) {
  const double N = static_cast<double>(l.size());
  double n = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!l.labels[i]) continue;
    n += 1.0;
    sum += std::exp(-alpha * static_cast<double>(rank_of(l.scores, i)) / N);
  }
  const double ra = n / N;
  const double rie =
      sum / (ra * (std::exp(-alpha / N) * (1.0 - std::exp(-alpha)) / (1.0 - std::exp(-alpha / N))));
  return rie * ra * std::sinh(alpha / 2.0) /
             (std::cosh(alpha / 2.0) - std::cosh(alpha / 2.0 - alpha * ra)) +
         1.0 / (1.0 - std::exp(alpha * (1.0 - ra)));
}

// Expected BEDROC of a uniformly random ranking: the RIE expectation is 1.
inline double bedroc_random_expectation(std::size_t N, std::size_t n, double alpha = 80.5) {
  const double ra = static_cast<double>(n) / static_cast<double>(N);
  return ra * std::sinh(alpha / 2.0) /
             (std::cosh(alpha / 2.0) - std::cosh(alpha / 2.0 - alpha * ra)) +
         1.0 / (1.0 - std::exp(alpha * (1.0 - ra)));
}

// Fraction given as num / den so the top-set size is exact integer math.
inline double enrichment(const metrics::RankedList& l, std::size_t num, std::size_t den) {
  const std::size_t top = (num * l.size() + den - 1) / den;
  double hits = 0.0;
  double n = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!l.labels[i]) continue;
    n += 1.0;
    if (rank_of(l.scores, i) <= top) hits += 1.0;
  }
  return (hits / n) / (static_cast<double>(num) / static_cast<double>(den));
}

// Average precision over distinct thresholds, counting directly.
inline double average_precision(const metrics::RankedList& l) {
  std::set<double, std::greater<>> thresholds(l.scores.begin(), l.scores.end());
  double n = 0.0;
  for (auto y : l.labels) n += y;
  double ap = 0.0;
  double prev_tp = 0.0;
  for (double t : thresholds) {
    double tp = 0.0;
    double predicted = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (l.scores[i] >= t) {
        predicted += 1.0;
        tp += l.labels[i];
      }
    }
    ap += (tp - prev_tp) / n * (tp / predicted);
    prev_tp = tp;
  }
  return ap;
}

inline metrics::F1Result best_f1(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  metrics::F1Result best{-1.0, 0.0};
  for (double t : s) {
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool pred = s[i] >= t;
      if (pred && y[i]) tp += 1.0;
      if (pred && !y[i]) fp += 1.0;
      if (!pred && y[i]) fn += 1.0;
    }
    const double f1 = tp == 0.0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    if (f1 > best.f1 || (f1 == best.f1 && t > best.threshold)) best = {f1, t};
  }
  return best;
}

// Scores drawn from a small integer range so that ties are common.
inline metrics::RankedList random_list(Rng& rng, std::size_t max_n, bool ties) {
  const std::size_t n = 2 + rng.index(max_n - 1);
  metrics::RankedList l;
  for (std::size_t i = 0; i < n; ++i) {
    l.scores.push_back(ties ? static_cast<double>(rng.index(n / 3 + 2)) : rng.normal());
    l.labels.push_back(rng.uniform() < 0.3 ? 1 : 0);
  }
  const std::size_t pos = rng.index(n);
  l.labels[pos] = 1;
  l.labels[(pos + 1 + rng.index(n - 1)) % n] = 0;
  return l;
}

inline Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("s2screen_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace s2::oracle
