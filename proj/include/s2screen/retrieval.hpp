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

// Persisted embedding store and cosine top-k screening.
//
// File layout (little-endian): "S2EMB1", u32 dim, u64 count, count ids as
// u32 length + UTF-8 bytes, count x dim float64 row-major payload, then the
// CRC-64/XZ of every preceding byte as u64. Vectors are stored as given and
// normalized at query time.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "s2screen/core.hpp"

namespace s2::retrieval {

struct EmbeddingStore {
  std::size_t dim = 0;
  std::vector<std::string> ids;
  Matrix vectors;  // count x dim

  std::size_t size() const { return ids.size(); }
  // Throws DataError on row/id count mismatch, duplicate id or a
  // non-finite entry.
  void validate() const;
};

// CRC-64/XZ (ECMA-182 polynomial, reflected, init and xorout all ones).
std::uint64_t crc64(std::string_view bytes);

std::string serialize_store(const EmbeddingStore& store);
EmbeddingStore deserialize_store(std::string_view bytes);

void store_write(const std::filesystem::path& path, const EmbeddingStore& store);
void store_write(const std::filesystem::path& path, const std::vector<std::string>& ids,
                 const Matrix& vectors);
EmbeddingStore store_read(const std::filesystem::path& path);

struct Hit {
  std::string id;
  double score = 0.0;
};

// Cosine similarity of |query| against every row, in store order.
std::vector<double> cosine_scores(const RowVector& query, const EmbeddingStore& store);

// min(top_k, size) hits by descending cosine, ties by ascending id. Throws
// std::invalid_argument on dim mismatch, empty store or top_k < 1.
std::vector<Hit> screen(const RowVector& query, const EmbeddingStore& store, std::size_t top_k);

// One screen per query row; |threads| > 1 splits queries across workers.
std::vector<std::vector<Hit>> screen_batch(const Matrix& queries, const EmbeddingStore& store,
                                           std::size_t top_k, int threads = 1);

}  // namespace s2::retrieval
