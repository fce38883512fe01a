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

#include "s2screen/retrieval.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <set>
#include <thread>

#include <boost/crc.hpp>

#include "s2screen/binary_io.hpp"

namespace s2::retrieval {

namespace {

constexpr std::string_view kMagic = "S2EMB1";
constexpr double kNormEps = 1e-12;

using Crc64Xz = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, 0xFFFFFFFFFFFFFFFFULL,
                                   0xFFFFFFFFFFFFFFFFULL, true, true>;

}  // namespace

void EmbeddingStore::validate() const {
  if (static_cast<std::size_t>(vectors.rows()) != ids.size()) {
    throw DataError("embedding store: " + std::to_string(vectors.rows()) + " rows but " +
                    std::to_string(ids.size()) + " ids");
  }
  if (!ids.empty() && static_cast<std::size_t>(vectors.cols()) != dim) {
    throw DataError("embedding store: vector width differs from dim");
  }
  std::set<std::string_view> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw DataError("embedding store: duplicate id " + id);
  }
  if (!vectors.allFinite()) throw DataError("embedding store: non-finite entry");
}

std::uint64_t crc64(std::string_view bytes) {
  Crc64Xz crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::string serialize_store(const EmbeddingStore& store) {
  store.validate();
  io::ByteWriter w;
  w.raw(kMagic);
  w.u32(static_cast<std::uint32_t>(store.dim));
  w.u64(store.size());
  for (const auto& id : store.ids) w.str32(id);
  for (Eigen::Index r = 0; r < store.vectors.rows(); ++r) {
    for (Eigen::Index c = 0; c < store.vectors.cols(); ++c) w.f64(store.vectors(r, c));
  }
  std::string bytes = w.take();
  io::ByteWriter tail;
  tail.u64(crc64(bytes));
  bytes += tail.take();
  return bytes;
}

EmbeddingStore deserialize_store(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 8) throw DataError("embedding store: truncated");
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  io::ByteReader crc_reader(bytes.substr(bytes.size() - 8));
  if (crc_reader.u64() != crc64(body)) throw DataError("embedding store: checksum mismatch");
  io::ByteReader r(body);
  if (r.raw(kMagic.size()) != kMagic) throw DataError("embedding store: bad magic");
  EmbeddingStore store;
  store.dim = r.u32();
  const std::uint64_t count = r.u64();
  if (count > body.size()) throw DataError("embedding store: implausible count");
  store.ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) store.ids.push_back(r.str32());
  store.vectors.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(store.dim));
  for (Eigen::Index i = 0; i < store.vectors.rows(); ++i) {
    for (Eigen::Index c = 0; c < store.vectors.cols(); ++c) store.vectors(i, c) = r.f64();
  }
  if (!r.done()) throw DataError("embedding store: trailing bytes");
  store.validate();
  return store;
}

void store_write(const std::filesystem::path& path, const EmbeddingStore& store) {
  io::write_file(path, serialize_store(store));
}

void store_write(const std::filesystem::path& path, const std::vector<std::string>& ids,
                 const Matrix& vectors) {
  EmbeddingStore store;
  store.dim = static_cast<std::size_t>(vectors.cols());
  store.ids = ids;
  store.vectors = vectors;
  store_write(path, store);
}

EmbeddingStore store_read(const std::filesystem::path& path) {
  return deserialize_store(io::read_file(path));
}

std::vector<double> cosine_scores(const RowVector& query, const EmbeddingStore& store) {
  if (static_cast<std::size_t>(query.size()) != store.dim) {
    throw std::invalid_argument("screen: query dim " + std::to_string(query.size()) +
                                " differs from store dim " + std::to_string(store.dim));
  }
  const double qn = std::max(query.norm(), kNormEps);
  std::vector<double> scores(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto row = store.vectors.row(static_cast<Eigen::Index>(i));
    scores[i] = row.dot(query) / (qn * std::max(row.norm(), kNormEps));
  }
  return scores;
}

std::vector<Hit> screen(const RowVector& query, const EmbeddingStore& store, std::size_t top_k) {
  if (top_k < 1) throw std::invalid_argument("screen: top_k must be >= 1");
  if (store.size() == 0) throw std::invalid_argument("screen: empty store");
  const std::vector<double> scores = cosine_scores(query, store);
  std::vector<std::size_t> order(store.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t k = std::min(top_k, store.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return store.ids[a] < store.ids[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
  std::vector<Hit> hits;
  hits.reserve(k);
  for (std::size_t i = 0; i < k; ++i) hits.push_back({store.ids[order[i]], scores[order[i]]});
  return hits;
}

std::vector<std::vector<Hit>> screen_batch(const Matrix& queries, const EmbeddingStore& store,
                                           std::size_t top_k, int threads) {
  std::vector<std::vector<Hit>> out(static_cast<std::size_t>(queries.rows()));
  auto work = [&](std::size_t q) {
    out[q] = screen(queries.row(static_cast<Eigen::Index>(q)), store, top_k);
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || out.size() < 2) {
    for (std::size_t q = 0; q < out.size(); ++q) work(q);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t q = next++; q < out.size(); q = next++) work(q);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace s2::retrieval
