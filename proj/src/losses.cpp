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

#include "s2screen/losses.hpp"

namespace s2::loss {

ad::Var cosine_similarity_matrix(ad::Var a, ad::Var b) {
  if (a.cols() != b.cols()) throw ShapeError("cosine_similarity_matrix: dimension mismatch");
  return ad::matmul(ad::row_l2_normalize(a), ad::transpose(ad::row_l2_normalize(b)));
}

ad::Var infonce_symmetric(ad::Var h_p, ad::Var h_l, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("infonce_symmetric: tau must be > 0");
  if (h_p.rows() != h_l.rows() || h_p.rows() < 1) {
    throw ShapeError("infonce_symmetric: need equal, nonzero row counts");
  }
  ad::Var logits = ad::scalar_scale(cosine_similarity_matrix(h_p, h_l), 1.0 / tau);
  ad::Var rows = ad::sum(ad::diagonal(ad::log_softmax_rows(logits)));
  ad::Var cols = ad::sum(ad::diagonal(ad::log_softmax_rows(ad::transpose(logits))));
  return ad::scalar_scale(rows + cols, -1.0 / static_cast<double>(h_p.rows()));
}

ad::Var total_loss(ad::Var l_fc, ad::Var l_bsp, double lambda) {
  return l_fc + ad::scalar_scale(l_bsp, lambda);
}

}  // namespace s2::loss
