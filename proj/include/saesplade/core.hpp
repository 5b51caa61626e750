// Copyright 2026 The SaeSplade Authors.
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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saesplade/error.hpp"

namespace saesplade {

using DenseVector = std::vector<double>;

struct SparseEntry {
  uint32_t id = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Sorted (latent id, positive weight) pairs over a vocabulary of size M.
// Immutable once built; the factory enforces strictly increasing ids,
// weights > 0 and ids < vocab_size.
class SparseVector {
 public:
  explicit SparseVector(uint32_t vocab_size = 0) : vocab_size_(vocab_size) {}

  static SparseVector from_entries(uint32_t vocab_size,
                                   std::vector<SparseEntry> entries);

  uint32_t vocab_size() const noexcept { return vocab_size_; }
  size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const SparseEntry> entries() const noexcept { return entries_; }

  // Weight of `id`, 0 when absent.
  double weight(uint32_t id) const;
  DenseVector to_dense() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  uint32_t vocab_size_;
  std::vector<SparseEntry> entries_;
};

// Sum over shared ids of weight_a * weight_b.
double sparse_dot(const SparseVector& a, const SparseVector& b);

// Keeps the k largest entries of v and zeroes the rest. Ties keep the
// lowest index. k >= v.size() returns v unchanged.
DenseVector topk_mask(std::span<const double> v, size_t k);

// Indices of the entries topk_mask keeps, ascending.
std::vector<uint32_t> topk_indices(std::span<const double> v, size_t k);

// Strictly positive components of v with their indices.
SparseVector to_sparse(std::span<const double> v);

// One text as N contextual token embeddings of dimension d, stored
// row-major.
class TokenEmbeddingSequence {
 public:
  TokenEmbeddingSequence(std::string doc_id, size_t dim,
                         std::vector<double> values,
                         std::optional<std::vector<uint32_t>> token_ids = {});

  const std::string& doc_id() const noexcept { return doc_id_; }
  size_t dim() const noexcept { return dim_; }
  size_t size() const noexcept { return values_.size() / dim_; }
  std::span<const double> token(size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const double> values() const noexcept { return values_; }
  const std::optional<std::vector<uint32_t>>& token_ids() const noexcept {
    return token_ids_;
  }

  friend bool operator==(const TokenEmbeddingSequence&,
                         const TokenEmbeddingSequence&) = default;

 private:
  std::string doc_id_;
  size_t dim_;
  std::vector<double> values_;
  std::optional<std::vector<uint32_t>> token_ids_;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

}  // namespace saesplade
