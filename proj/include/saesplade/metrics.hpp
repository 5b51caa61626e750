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
#include <span>

#include "saesplade/core.hpp"
#include "saesplade/retrieval_types.hpp"

namespace saesplade {

// Every query of `run` must appear in `qrels`; an empty run is an error.
double mrr_at_k(const Run& run, const Qrels& qrels, size_t k = 10);
double ndcg_at_k(const Run& run, const Qrels& qrels, size_t k = 10);
double success_at_k(const Run& run, const Qrels& qrels, size_t k = 5);

// Expected shared-support size of a random (query, document) pair,
// enumerated over every pair.
double qd_flops_pairwise(std::span<const SparseVector> queries,
                         std::span<const SparseVector> docs);
// The same expectation as sum_t f_Q(t) * f_D(t) over activation
// frequencies. Linear in the total number of entries.
double qd_flops(std::span<const SparseVector> queries,
                std::span<const SparseVector> docs);
// qd_flops over at most `max_docs` documents drawn without replacement.
double qd_flops_sampled(std::span<const SparseVector> queries,
                        std::span<const SparseVector> docs, size_t max_docs,
                        uint64_t seed);

struct E2Config {
  double mu1 = 0.01;
  double mu2 = 0.09;
  double tau = 5.0;
  double beta = 2.0;
};

// (1/beta) * log(1 + exp(beta * x)), stable for large |beta * x|.
double softplus(double x, double beta);

// MRR - mu1 * QD-FLOPs - mu2 * softplus_beta(QD-FLOPs - tau), 0-1 scale.
double e2_score(double mrr, double qdflops, const E2Config& cfg = {});

struct MrrFlops {
  double mrr = 0.0;
  double qdflops = 0.0;
};

inline constexpr MrrFlops kBm25MsMarco{0.183, 0.13};

// 100 * (E2(model) - E2(baseline)).
double delta_e2(MrrFlops model, MrrFlops baseline = kBm25MsMarco,
                const E2Config& cfg = {});

}  // namespace saesplade
