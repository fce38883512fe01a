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

#include "s2screen/bindingsite.hpp"

#include <numeric>
#include <string>

#include "s2screen/encoders.hpp"

namespace s2::bsp {

namespace {

constexpr double kClamp = 1e-12;

std::string key(std::string_view prefix, std::string_view name) {
  std::string out(prefix);
  out += '.';
  out += name;
  return out;
}

}  // namespace

ProbeHead ProbeHead::create(ad::ParameterSet& params, std::string_view prefix, int d_s, int d,
                            Rng& rng) {
  params.add(key(prefix, "w_r"), enc::xavier(d_s, d, rng));
  params.add(key(prefix, "w_l"), enc::xavier(d, d, rng));
  return bind(params, prefix);
}

ProbeHead ProbeHead::bind(ad::ParameterSet& params, std::string_view prefix) {
  return {&params.at(key(prefix, "w_r")), &params.at(key(prefix, "w_l"))};
}

std::vector<std::vector<std::size_t>> sample_probes(std::size_t batch_size, int k,
                                                    std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("sample_probes: K must be >= 1");
  if (batch_size == 0) throw std::invalid_argument("sample_probes: empty batch");
  Rng rng(seed);
  const auto extra = static_cast<std::size_t>(k - 1);
  std::vector<std::vector<std::size_t>> out(batch_size);
  for (std::size_t n = 0; n < batch_size; ++n) {
    auto& probes = out[n];
    probes.push_back(n);
    if (extra == 0) continue;
    std::vector<std::size_t> others;
    for (std::size_t m = 0; m < batch_size; ++m) {
      if (m != n) others.push_back(m);
    }
    if (others.empty()) {
      probes.insert(probes.end(), extra, n);
    } else if (others.size() >= extra) {
      // Partial Fisher-Yates.
      for (std::size_t j = 0; j < extra; ++j) {
        std::swap(others[j], others[j + rng.index(others.size() - j)]);
        probes.push_back(others[j]);
      }
    } else {
      for (std::size_t j = 0; j < extra; ++j) probes.push_back(others[rng.index(others.size())]);
    }
  }
  return out;
}

ad::Var probe_attention(ad::Tape& tape, const ProbeHead& head, ad::Var x_s, ad::Var probes) {
  if (x_s.rows() < 1) throw ShapeError("probe_attention: empty sequence");
  ad::Var r = ad::matmul(x_s, tape.leaf(*head.w_r));
  ad::Var l = ad::matmul(probes, tape.leaf(*head.w_l));
  return ad::softmax_rows(ad::matmul(l, ad::transpose(r)));
}

ad::Var residue_binding_prob(ad::Var alpha) { return ad::mean_rows(alpha); }

ad::Var residue_binding_prob(const std::vector<ad::Var>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("residue_binding_prob: no probes");
  for (const auto& a : alphas) {
    if (a.rows() != 1 || a.cols() != alphas.front().cols()) {
      throw ShapeError("residue_binding_prob: attention length mismatch");
    }
  }
  return ad::mean_rows(ad::concat_rows(alphas));
}

ad::Var bsp_loss(ad::Tape& tape, const std::vector<ad::Var>& y_hat,
                 const std::vector<std::vector<std::uint8_t>>& labels) {
  if (y_hat.size() != labels.size() || y_hat.empty()) {
    throw ShapeError("bsp_loss: batch size mismatch");
  }
  ad::Var total;
  for (std::size_t n = 0; n < y_hat.size(); ++n) {
    const auto& y = labels[n];
    if (y_hat[n].rows() != 1 || y_hat[n].cols() != static_cast<Eigen::Index>(y.size())) {
      throw ShapeError("bsp_loss: label length mismatch for item " + std::to_string(n));
    }
    Matrix pos(1, static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) pos(0, static_cast<Eigen::Index>(i)) = y[i] ? 1.0 : 0.0;
    const Matrix neg = Matrix::Ones(1, pos.cols()) - pos;
    ad::Var p = ad::clamp(y_hat[n], kClamp, 1.0 - kClamp);
    ad::Var term = ad::sum(ad::mul(tape.constant(pos), ad::log(p))) +
                   ad::sum(ad::mul(tape.constant(neg), ad::log(ad::add_scalar(-p, 1.0))));
    total = total.valid() ? total + term : term;
  }
  return ad::scalar_scale(total, -1.0 / static_cast<double>(y_hat.size()));
}

}  // namespace s2::bsp
