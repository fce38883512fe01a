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

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s2screen/datamodel.hpp"

namespace s2::splits {

struct ExclusionWitness {
  std::string train_id;
  std::string test_id;
  double identity = 0.0;
};

struct ExclusionResult {
  std::vector<ProteinRecord> kept;
  // One entry per removed training protein, in input order. The witness is
  // the test protein with the highest identity (first on ties).
  std::vector<ExclusionWitness> removed;
  double cutoff = 0.0;

  nlohmann::json audit_json() const;
};

// Removes every training protein whose identity to any test protein is
// >= cutoff. Identities use sampling::seq_identity. Throws
// std::invalid_argument if either set is empty or cutoff is outside (0, 1].
// |threads| > 1 spreads the pairwise alignments over worker threads.
ExclusionResult homology_exclusion_split(const std::vector<ProteinRecord>& train,
                                         const std::vector<ProteinRecord>& test, double cutoff,
                                         int threads = 1);

}  // namespace s2::splits
