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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "saesplade/core.hpp"
#include "saesplade/retrieval_types.hpp"

namespace saesplade {

// Frozen contextual token embeddings for a set of texts.
class EmbeddingCorpus {
 public:
  explicit EmbeddingCorpus(size_t dim = 0) : dim_(dim) {}

  size_t dim() const noexcept { return dim_; }
  size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const std::vector<TokenEmbeddingSequence>& items() const noexcept {
    return items_;
  }
  const TokenEmbeddingSequence& operator[](size_t i) const { return items_[i]; }

  // Throws on dimension mismatch or a duplicate doc_id.
  void add(TokenEmbeddingSequence seq);
  const TokenEmbeddingSequence* find(std::string_view doc_id) const;

  size_t token_count() const;
  // Every token of every item, in corpus order.
  std::vector<DenseVector> flatten_tokens() const;

  friend bool operator==(const EmbeddingCorpus& a, const EmbeddingCorpus& b) {
    return a.dim_ == b.dim_ && a.items_ == b.items_;
  }

 private:
  size_t dim_;
  std::vector<TokenEmbeddingSequence> items_;
  std::unordered_map<std::string, size_t> by_id_;
};

struct ToyEncoderConfig {
  size_t dim = 64;
  size_t window = 1;
  uint64_t seed = 0;
};

// Deterministic stand-in for a frozen transformer. Each lowercased
// whitespace term hashes to a pseudo-random unit vector; position i is the
// mean of the term vectors within `window` positions of i.
TokenEmbeddingSequence toy_encode(std::string_view doc_id,
                                  std::string_view text,
                                  const ToyEncoderConfig& cfg);

// Seed-independent 32-bit id of a lowercased term.
// Lower-cased whitespace terms, as the toy encoder sees them.
std::vector<std::string> toy_terms(std::string_view text);
uint32_t toy_term_id(std::string_view term);

struct SyntheticSpec {
  size_t dim = 16;
  size_t concepts = 8;
  size_t active_per_token = 1;
  double noise_sigma = 0.0;
  size_t docs = 10;
  size_t tokens_per_doc = 5;
  uint64_t seed = 0;
};

struct GroundTruth {
  std::vector<DenseVector> atoms;
  // One entry per generated token, in corpus order.
  std::vector<std::vector<uint32_t>> active_sets;
};

struct SyntheticData {
  EmbeddingCorpus corpus;
  GroundTruth truth;
};

// Tokens are sums of `active_per_token` unit atoms with coefficients in
// [0.5, 1.5] plus isotropic Gaussian noise. token_ids hold the smallest
// active concept of each token.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Unit-norm Gaussian directions.
std::vector<DenseVector> random_unit_vectors(size_t count, size_t dim,
                                             uint64_t seed);

// A retrieval task over synthetic concept embeddings. Every topic has two
// surface forms: documents always use the document form, queries switch to
// the query form with probability `query_variant_rate`. Negatives share no
// topic with the query's positive.
struct RelevanceTaskSpec {
  size_t dim = 32;
  size_t topics = 24;
  size_t topics_per_doc = 3;
  size_t tokens_per_topic = 3;
  size_t query_tokens_per_topic = 1;
  size_t docs = 300;
  size_t train_queries = 400;
  size_t test_queries = 100;
  size_t negatives = 4;
  double query_variant_rate = 0.7;
  double noise_sigma = 0.01;
  uint64_t seed = 0;
};

struct RelevanceTask {
  EmbeddingCorpus docs;
  EmbeddingCorpus train_queries;
  EmbeddingCorpus test_queries;
  std::vector<Triple> train_triples;
  Qrels train_qrels;
  Qrels test_qrels;
  std::vector<DenseVector> atoms;
};

RelevanceTask generate_relevance_task(const RelevanceTaskSpec& spec);

}  // namespace saesplade
