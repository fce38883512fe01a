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

#include "s2screen/autograd.hpp"

namespace s2::loss {

struct ContrastiveConfig {
  double tau = 0.1;
  double lambda = 0.5;
};

// N x M cosine similarities between the rows of |a| and |b|.
ad::Var cosine_similarity_matrix(ad::Var a, ad::Var b);

// -(1/N) sum_n [log softmax_m(S/tau)(n, n) + log softmax_n(S/tau)(n, n)]
// with S the cosine similarity of paired rows. Both directions are summed.
// Throws std::invalid_argument if tau <= 0.
ad::Var infonce_symmetric(ad::Var h_p, ad::Var h_l, double tau);

ad::Var total_loss(ad::Var l_fc, ad::Var l_bsp, double lambda);

}  // namespace s2::loss
