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

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "s2screen/sampling.hpp"

namespace s2::splits {

nlohmann::json ExclusionResult::audit_json() const {
  nlohmann::json removed_rows = nlohmann::json::array();
  for (const auto& w : removed) {
    removed_rows.push_back({{"train_id", w.train_id}, {"test_id", w.test_id}, {"identity", w.identity}});
  }
  return {{"cutoff", cutoff},
          {"kept", kept.size()},
          {"removed_count", removed.size()},
          {"removed", std::move(removed_rows)}};
}

ExclusionResult homology_exclusion_split(const std::vector<ProteinRecord>& train,
                                         const std::vector<ProteinRecord>& test, double cutoff,
                                         int threads) {
  if (train.empty() || test.empty()) throw std::invalid_argument("homology_exclusion_split: empty set");
  if (!(cutoff > 0.0 && cutoff <= 1.0)) {
    throw std::invalid_argument("homology_exclusion_split: cutoff must be in (0, 1]");
  }
  // Best identity and its witness per training protein.
  std::vector<double> best(train.size(), -1.0);
  std::vector<std::size_t> witness(train.size(), 0);
  auto work = [&](std::size_t i) {
    for (std::size_t t = 0; t < test.size(); ++t) {
      const double id = sampling::seq_identity(train[i].sequence, test[t].sequence);
      if (id > best[i]) {
        best[i] = id;
        witness[i] = t;
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1) {
    for (std::size_t i = 0; i < train.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < train.size(); i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExclusionResult result;
  result.cutoff = cutoff;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (best[i] >= cutoff) {
      result.removed.push_back({train[i].id, test[witness[i]].id, best[i]});
    } else {
      result.kept.push_back(train[i]);
    }
  }
  return result;
}

}  // namespace s2::splits
