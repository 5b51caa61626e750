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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "saesplade/core.hpp"
#include "saesplade/sae.hpp"

namespace saesplade {

// Mean cosine similarity over `num_pairs` seeded random unordered pairs of
// distinct sample indices. When num_pairs covers every pair, all pairs are
// enumerated once instead.
double anisotropy(std::span<const DenseVector> sample, size_t num_pairs,
                  uint64_t seed);

// Document-level presence counts. A token (or latent) counts once per
// document however often it occurs there.
struct CooccurrenceStats {
  std::map<uint32_t, uint32_t> token_counts;
  std::map<uint32_t, uint32_t> latent_counts;
  std::map<std::pair<uint32_t, uint32_t>, uint32_t> joint_counts;
  uint32_t total_docs = 0;
};

struct CoocDocument {
  std::vector<uint32_t> token_ids;
  SparseVector encoding;
};

// Tokens and latents present in fewer than `min_count` documents are
// removed from every table.
CooccurrenceStats collect_cooccurrence(std::span<const CoocDocument> docs,
                                       uint32_t min_count = 5);

enum class PairKind { kSynonym, kPolysemy, kIdentity, kUnclassified };

std::string to_string(PairKind k);

struct PairLabel {
  uint32_t token = 0;
  uint32_t latent = 0;
  double p_l_given_t = 0.0;
  double p_t_given_l = 0.0;
  PairKind label = PairKind::kUnclassified;
  double p_value_lt = 1.0;
  double p_value_tl = 1.0;
};

// Threshold labels: synonym P(t|l) <= 0.4 and P(l|t) >= 0.6; polysemy
// P(l|t) <= 0.4 and P(t|l) >= 0.6; identity both >= 0.6.
PairKind classify_probabilities(double p_l_given_t, double p_t_given_l);

// Drops pairs with either conditional probability below `prob_floor`,
// then labels the rest. Ordered by (token, latent).
std::vector<PairLabel> classify_pairs(const CooccurrenceStats& stats,
                                      double prob_floor = 0.1);

// P(X >= observed) for X ~ Binomial(n, p0).
double binomial_upper_tail(uint32_t n, double p0, uint32_t observed);

// Keeps pairs whose joint count is significantly above independence in both
// directions: against Binomial(token_count, latent_count / total_docs) and
// Binomial(latent_count, token_count / total_docs), each one-sided at
// level 1 - confidence. Fills in the p-values.
std::vector<PairLabel> binomial_filter(const CooccurrenceStats& stats,
                                       std::span<const PairLabel> pairs,
                                       double confidence = 0.95);

struct OverlapStats {
  double mean_overlap = 0.0;
  double std_overlap = 0.0;
  double mean_doc_len = 0.0;
  double std_doc_len = 0.0;
  size_t documents = 0;
};

// parallel[doc][language]: the encodings of one document's translations.
// Overlap is the size of the intersection of all their supports; standard
// deviations are population deviations.
OverlapStats multilingual_overlap(
    std::span<const std::vector<SparseVector>> parallel);

// Fraction of `atoms` matched to a distinct decoder column with
// |cosine| >= threshold. Matching is greedy on |cosine|, best pair first.
double atom_recovery(const SaeParams& p, std::span<const DenseVector> atoms,
                     double threshold = 0.9);

}  // namespace saesplade
