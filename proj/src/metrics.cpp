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

#include "saesplade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "saesplade/hash.hpp"

namespace saesplade {

namespace {

using Judgments = std::unordered_map<std::string, int>;

// Mean of per_query(ranked, judgments) over every run query.
double mean_over_run(const Run& run, const Qrels& qrels, const char* metric,
                     const std::function<double(const std::vector<ScoredDoc>&,
                                                const Judgments&)>& per_query) {
  if (run.empty()) {
    throw EmptyInputError(std::string(metric) + ": run has no queries");
  }
  double sum = 0.0;
  for (const auto& [qid, ranked] : run) {
    auto it = qrels.find(qid);
    if (it == qrels.end()) {
      throw NotFoundError(std::string(metric) + ": query '" + qid +
                          "' missing from qrels");
    }
    sum += per_query(ranked, it->second);
  }
  return sum / static_cast<double>(run.size());
}

int grade_of(const Judgments& j, const std::string& doc) {
  auto it = j.find(doc);
  return it == j.end() ? 0 : it->second;
}

}  // namespace

double mrr_at_k(const Run& run, const Qrels& qrels, size_t k) {
  return mean_over_run(run, qrels, "mrr", [k](const auto& ranked, const auto& j) {
    const size_t n = std::min(k, ranked.size());
    for (size_t i = 0; i < n; ++i) {
      if (grade_of(j, ranked[i].doc_id) >= 1) {
        return 1.0 / static_cast<double>(i + 1);
      }
    }
    return 0.0;
  });
}

double ndcg_at_k(const Run& run, const Qrels& qrels, size_t k) {
  return mean_over_run(run, qrels, "ndcg", [k](const auto& ranked, const auto& j) {
    double dcg = 0.0;
    const size_t n = std::min(k, ranked.size());
    for (size_t i = 0; i < n; ++i) {
      dcg += grade_of(j, ranked[i].doc_id) / std::log2(static_cast<double>(i) + 2.0);
    }
    std::vector<int> grades;
    for (const auto& [doc, g] : j) {
      if (g > 0) grades.push_back(g);
    }
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double ideal = 0.0;
    for (size_t i = 0; i < std::min(k, grades.size()); ++i) {
      ideal += grades[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    return ideal > 0.0 ? dcg / ideal : 0.0;
  });
}

double success_at_k(const Run& run, const Qrels& qrels, size_t k) {
  return mean_over_run(run, qrels, "success", [k](const auto& ranked, const auto& j) {
    const size_t n = std::min(k, ranked.size());
    for (size_t i = 0; i < n; ++i) {
      if (grade_of(j, ranked[i].doc_id) >= 1) return 1.0;
    }
    return 0.0;
  });
}

namespace {

uint32_t check_lists(std::span<const SparseVector> queries,
                     std::span<const SparseVector> docs) {
  if (queries.empty() || docs.empty()) {
    throw EmptyInputError("qd_flops: queries and documents must be non-empty");
  }
  const uint32_t m = queries.front().vocab_size();
  for (const auto& v : queries) {
    if (v.vocab_size() != m) throw DimensionError("qd_flops: mixed vocabularies");
  }
  for (const auto& v : docs) {
    if (v.vocab_size() != m) throw DimensionError("qd_flops: mixed vocabularies");
  }
  return m;
}

size_t shared_support(const SparseVector& a, const SparseVector& b) {
  auto ea = a.entries();
  auto eb = b.entries();
  size_t i = 0, j = 0, n = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].id < eb[j].id) {
      ++i;
    } else if (eb[j].id < ea[i].id) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double qd_flops_pairwise(std::span<const SparseVector> queries,
                         std::span<const SparseVector> docs) {
  check_lists(queries, docs);
  double total = 0.0;
  for (const auto& q : queries) {
    size_t row = 0;
    for (const auto& d : docs) row += shared_support(q, d);
    total += static_cast<double>(row);
  }
  return total / (static_cast<double>(queries.size()) *
                  static_cast<double>(docs.size()));
}

double qd_flops(std::span<const SparseVector> queries,
                std::span<const SparseVector> docs) {
  const uint32_t m = check_lists(queries, docs);
  std::vector<uint64_t> fq(m, 0), fd(m, 0);
  for (const auto& q : queries) {
    for (const auto& e : q.entries()) ++fq[e.id];
  }
  for (const auto& d : docs) {
    for (const auto& e : d.entries()) ++fd[e.id];
  }
  double sum = 0.0;
  for (uint32_t t = 0; t < m; ++t) {
    if (fq[t] && fd[t]) {
      sum += static_cast<double>(fq[t]) * static_cast<double>(fd[t]);
    }
  }
  return sum / (static_cast<double>(queries.size()) *
                static_cast<double>(docs.size()));
}

double qd_flops_sampled(std::span<const SparseVector> queries,
                        std::span<const SparseVector> docs, size_t max_docs,
                        uint64_t seed) {
  if (docs.size() <= max_docs) return qd_flops(queries, docs);
  std::vector<SparseVector> sample;
  sample.reserve(max_docs);
  std::mt19937_64 rng(splitmix64(seed ^ 0x71646670ULL));
  std::sample(docs.begin(), docs.end(), std::back_inserter(sample), max_docs,
              rng);
  return qd_flops(queries, sample);
}

double softplus(double x, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("softplus: beta must be > 0");
  const double bx = beta * x;
  if (bx >= 40.0) return x;
  if (bx <= -40.0) return std::exp(bx) / beta;
  return std::log1p(std::exp(bx)) / beta;
}

double e2_score(double mrr, double qdflops, const E2Config& cfg) {
  return mrr - cfg.mu1 * qdflops -
         cfg.mu2 * softplus(qdflops - cfg.tau, cfg.beta);
}

double delta_e2(MrrFlops model, MrrFlops baseline, const E2Config& cfg) {
  return 100.0 * (e2_score(model.mrr, model.qdflops, cfg) -
                  e2_score(baseline.mrr, baseline.qdflops, cfg));
}

}  // namespace saesplade
