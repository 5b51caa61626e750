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

#include "saesplade/index.hpp"

#include <algorithm>

namespace saesplade {

InvertedIndex::InvertedIndex(uint32_t vocab_size)
    : vocab_size_(vocab_size), postings_(vocab_size) {}

InvertedIndex InvertedIndex::from_parts(
    uint32_t vocab_size, std::vector<std::string> doc_ids,
    std::vector<uint32_t> doc_nnz, std::vector<std::vector<Posting>> postings) {
  if (postings.size() != vocab_size) {
    throw FormatError("index: expected " + std::to_string(vocab_size) +
                      " posting lists, got " + std::to_string(postings.size()));
  }
  if (doc_ids.size() != doc_nnz.size()) {
    throw FormatError("index: doc table and nnz table differ in length");
  }
  std::unordered_map<std::string, uint32_t> seen;
  for (uint32_t i = 0; i < doc_ids.size(); ++i) {
    if (!seen.emplace(doc_ids[i], i).second) {
      throw FormatError("index: duplicate doc_id '" + doc_ids[i] + "'");
    }
  }
  std::vector<uint32_t> counted(doc_ids.size(), 0);
  for (uint32_t t = 0; t < vocab_size; ++t) {
    const auto& list = postings[t];
    for (size_t i = 0; i < list.size(); ++i) {
      if (list[i].doc >= doc_ids.size()) {
        throw FormatError("index: posting for latent " + std::to_string(t) +
                          " references unknown ordinal");
      }
      if (!(list[i].weight > 0.0f)) {
        throw FormatError("index: non-positive posting weight");
      }
      if (i > 0 && list[i - 1].doc >= list[i].doc) {
        throw FormatError("index: posting list " + std::to_string(t) +
                          " not strictly ordered by ordinal");
      }
      ++counted[list[i].doc];
    }
  }
  if (counted != doc_nnz) {
    throw FormatError("index: doc nnz table disagrees with postings");
  }
  InvertedIndex ix(vocab_size);
  ix.doc_ids_ = std::move(doc_ids);
  ix.doc_nnz_ = std::move(doc_nnz);
  ix.postings_ = std::move(postings);
  return ix;
}

SparseVector InvertedIndex::document(uint32_t ordinal) const {
  if (ordinal >= doc_ids_.size()) throw NotFoundError("index: bad ordinal");
  std::vector<SparseEntry> entries;
  for (uint32_t t = 0; t < vocab_size_; ++t) {
    const auto& list = postings_[t];
    auto it = std::lower_bound(
        list.begin(), list.end(), ordinal,
        [](const Posting& p, uint32_t v) { return p.doc < v; });
    if (it != list.end() && it->doc == ordinal) {
      entries.push_back({t, static_cast<double>(it->weight)});
    }
  }
  return SparseVector::from_entries(vocab_size_, std::move(entries));
}

std::vector<ScoredDoc> InvertedIndex::search(const SparseVector& query,
                                             size_t cutoff) const {
  if (query.vocab_size() != vocab_size_) {
    throw DimensionError("search: query vocabulary " +
                         std::to_string(query.vocab_size()) + " vs index " +
                         std::to_string(vocab_size_));
  }
  std::vector<double> acc(doc_ids_.size(), 0.0);
  std::vector<uint8_t> hit(doc_ids_.size(), 0);
  std::vector<uint32_t> touched;
  for (const auto& e : query.entries()) {
    for (const auto& p : postings_[e.id]) {
      if (!hit[p.doc]) {
        hit[p.doc] = 1;
        touched.push_back(p.doc);
      }
      acc[p.doc] += e.weight * static_cast<double>(p.weight);
    }
  }
  auto better = [&](uint32_t a, uint32_t b) {
    return acc[a] > acc[b] || (acc[a] == acc[b] && a < b);
  };
  const size_t n = std::min(cutoff, touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<ptrdiff_t>(n),
                    touched.end(), better);
  std::vector<ScoredDoc> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    out.push_back({doc_ids_[touched[i]], acc[touched[i]]});
  }
  return out;
}

IndexStats InvertedIndex::stats() const {
  IndexStats s;
  s.num_docs = doc_ids_.size();
  for (const auto& list : postings_) {
    s.total_postings += list.size();
    if (!list.empty()) ++s.nonempty_lists;
  }
  s.avg_doc_len = s.num_docs == 0 ? 0.0
                                  : static_cast<double>(s.total_postings) /
                                        static_cast<double>(s.num_docs);
  return s;
}

IndexBuilder::IndexBuilder(uint32_t vocab_size) : index_(vocab_size) {}

void IndexBuilder::add(const std::string& doc_id, const SparseVector& doc) {
  if (doc.vocab_size() != index_.vocab_size_) {
    throw DimensionError("build_index: '" + doc_id + "' has vocabulary " +
                         std::to_string(doc.vocab_size()) + ", index has " +
                         std::to_string(index_.vocab_size_));
  }
  const auto ordinal = static_cast<uint32_t>(index_.doc_ids_.size());
  if (!seen_.emplace(doc_id, ordinal).second) {
    throw InvalidArgument("build_index: duplicate doc_id '" + doc_id + "'");
  }
  index_.doc_ids_.push_back(doc_id);
  index_.doc_nnz_.push_back(static_cast<uint32_t>(doc.nnz()));
  for (const auto& e : doc.entries()) {
    index_.postings_[e.id].push_back({ordinal, stored_weight(e.weight)});
  }
}

InvertedIndex IndexBuilder::finish() && { return std::move(index_); }

InvertedIndex build_index(std::span<const std::string> doc_ids,
                          std::span<const SparseVector> docs,
                          uint32_t vocab_size) {
  if (doc_ids.size() != docs.size()) {
    throw DimensionError("build_index: ids and vectors differ in count");
  }
  IndexBuilder b(vocab_size);
  for (size_t i = 0; i < docs.size(); ++i) b.add(doc_ids[i], docs[i]);
  return std::move(b).finish();
}

Run search_all(const InvertedIndex& index, std::span<const std::string> query_ids,
               std::span<const SparseVector> queries, size_t cutoff) {
  if (query_ids.size() != queries.size()) {
    throw DimensionError("search_all: ids and vectors differ in count");
  }
  Run run;
  for (size_t i = 0; i < queries.size(); ++i) {
    run[query_ids[i]] = index.search(queries[i], cutoff);
  }
  return run;
}

}  // namespace saesplade
