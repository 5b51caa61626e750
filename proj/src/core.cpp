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

#include "saesplade/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace saesplade {

SparseVector SparseVector::from_entries(uint32_t vocab_size,
                                        std::vector<SparseEntry> entries) {
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.id >= vocab_size) {
      throw DimensionError("sparse id " + std::to_string(e.id) +
                           " outside vocabulary of size " +
                           std::to_string(vocab_size));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("sparse weight must be finite and strictly positive");
    }
    if (i > 0 && entries[i - 1].id >= e.id) {
      throw InvalidArgument("sparse ids must be strictly increasing");
    }
  }
  SparseVector out(vocab_size);
  out.entries_ = std::move(entries);
  return out;
}

double SparseVector::weight(uint32_t id) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const SparseEntry& e, uint32_t v) { return e.id < v; });
  return (it != entries_.end() && it->id == id) ? it->weight : 0.0;
}

DenseVector SparseVector::to_dense() const {
  DenseVector out(vocab_size_, 0.0);
  for (const auto& e : entries_) out[e.id] = e.weight;
  return out;
}

double sparse_dot(const SparseVector& a, const SparseVector& b) {
  if (a.vocab_size() != b.vocab_size()) {
    throw DimensionError("sparse_dot: vocabulary sizes differ (" +
                         std::to_string(a.vocab_size()) + " vs " +
                         std::to_string(b.vocab_size()) + ")");
  }
  auto ea = a.entries();
  auto eb = b.entries();
  double sum = 0.0;
  size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].id < eb[j].id) {
      ++i;
    } else if (eb[j].id < ea[i].id) {
      ++j;
    } else {
      sum += ea[i].weight * eb[j].weight;
      ++i;
      ++j;
    }
  }
  return sum;
}

std::vector<uint32_t> topk_indices(std::span<const double> v, size_t k) {
  std::vector<uint32_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0u);
  if (k >= v.size()) return idx;
  auto better = [&](uint32_t a, uint32_t b) {
    return v[a] > v[b] || (v[a] == v[b] && a < b);
  };
  std::nth_element(idx.begin(), idx.begin() + static_cast<ptrdiff_t>(k),
                   idx.end(), better);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

DenseVector topk_mask(std::span<const double> v, size_t k) {
  if (k >= v.size()) return DenseVector(v.begin(), v.end());
  DenseVector out(v.size(), 0.0);
  for (uint32_t i : topk_indices(v, k)) out[i] = v[i];
  return out;
}

SparseVector to_sparse(std::span<const double> v) {
  std::vector<SparseEntry> entries;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) entries.push_back({static_cast<uint32_t>(i), v[i]});
  }
  return SparseVector::from_entries(static_cast<uint32_t>(v.size()),
                                    std::move(entries));
}

TokenEmbeddingSequence::TokenEmbeddingSequence(
    std::string doc_id, size_t dim, std::vector<double> values,
    std::optional<std::vector<uint32_t>> token_ids)
    : doc_id_(std::move(doc_id)),
      dim_(dim),
      values_(std::move(values)),
      token_ids_(std::move(token_ids)) {
  if (dim_ == 0) throw DimensionError("token embedding dimension must be > 0");
  if (values_.empty()) {
    throw EmptyInputError("token sequence '" + doc_id_ + "' has no tokens");
  }
  if (values_.size() % dim_ != 0) {
    throw DimensionError("token sequence '" + doc_id_ +
                         "' is not a whole number of d=" +
                         std::to_string(dim_) + " vectors");
  }
  if (token_ids_ && token_ids_->size() != size()) {
    throw DimensionError("token sequence '" + doc_id_ +
                         "': token_ids length differs from token count");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace saesplade
