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

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "saesplade/core.hpp"
#include "saesplade/retrieval_types.hpp"

namespace saesplade {

struct Posting {
  uint32_t doc = 0;
  float weight = 0.0f;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct IndexStats {
  double avg_doc_len = 0.0;
  uint64_t total_postings = 0;
  uint64_t nonempty_lists = 0;
  uint64_t num_docs = 0;
};

// Impact index: per latent, (doc ordinal, weight) postings in ordinal order.
// Weights are held in single precision and scores accumulate in double.
// Immutable after construction; concurrent searches are safe.
class InvertedIndex {
 public:
  explicit InvertedIndex(uint32_t vocab_size = 0);

  // Validates every structural invariant; used by the file reader.
  static InvertedIndex from_parts(uint32_t vocab_size,
                                  std::vector<std::string> doc_ids,
                                  std::vector<uint32_t> doc_nnz,
                                  std::vector<std::vector<Posting>> postings);

  uint32_t vocab_size() const noexcept { return vocab_size_; }
  size_t num_docs() const noexcept { return doc_ids_.size(); }
  const std::string& doc_id(uint32_t ordinal) const { return doc_ids_.at(ordinal); }
  uint32_t doc_nnz(uint32_t ordinal) const { return doc_nnz_.at(ordinal); }
  std::span<const Posting> postings(uint32_t latent) const {
    return postings_.at(latent);
  }
  std::span<const std::string> doc_ids() const noexcept { return doc_ids_; }
  std::span<const uint32_t> doc_nnz() const noexcept { return doc_nnz_; }

  // Rebuilds document `ordinal` from the postings.
  SparseVector document(uint32_t ordinal) const;

  // Exact top-`cutoff` by dot product. Docs without overlap are never
  // returned; ties go to the lower ordinal.
  std::vector<ScoredDoc> search(const SparseVector& query, size_t cutoff) const;

  IndexStats stats() const;

  friend bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
    return a.vocab_size_ == b.vocab_size_ && a.doc_ids_ == b.doc_ids_ &&
           a.doc_nnz_ == b.doc_nnz_ && a.postings_ == b.postings_;
  }

 private:
  friend class IndexBuilder;

  uint32_t vocab_size_;
  std::vector<std::string> doc_ids_;
  std::vector<uint32_t> doc_nnz_;
  std::vector<std::vector<Posting>> postings_;
};

// Assigns ordinals in insertion order. Rejects duplicate ids and
// vocabulary mismatches.
class IndexBuilder {
 public:
  explicit IndexBuilder(uint32_t vocab_size);

  void add(const std::string& doc_id, const SparseVector& doc);
  InvertedIndex finish() &&;

 private:
  InvertedIndex index_;
  std::unordered_map<std::string, uint32_t> seen_;
};

InvertedIndex build_index(std::span<const std::string> doc_ids,
                          std::span<const SparseVector> docs,
                          uint32_t vocab_size);

// Weight as the index stores it.
inline float stored_weight(double w) {
  const float f = static_cast<float>(w);
  return f > 0.0f ? f : std::numeric_limits<float>::denorm_min();
}

// Runs every query against the index.
Run search_all(const InvertedIndex& index, std::span<const std::string> query_ids,
               std::span<const SparseVector> queries, size_t cutoff);

}  // namespace saesplade
