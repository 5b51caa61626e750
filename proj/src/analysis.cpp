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

#include "saesplade/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <boost/math/distributions/binomial.hpp>

#include "saesplade/hash.hpp"

namespace saesplade {

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw InvalidArgument("anisotropy: zero vector in a sampled pair");
  }
  return dot(a, b) / (na * nb);
}

}  // namespace

double anisotropy(std::span<const DenseVector> sample, size_t num_pairs,
                  uint64_t seed) {
  const size_t n = sample.size();
  if (n < 2) throw InvalidArgument("anisotropy: need at least 2 vectors");
  if (num_pairs == 0) throw InvalidArgument("anisotropy: num_pairs must be > 0");
  const double all_pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  double sum = 0.0;
  if (static_cast<double>(num_pairs) >= all_pairs) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) sum += cosine(sample[i], sample[j]);
    }
    return sum / all_pairs;
  }
  std::mt19937_64 rng(splitmix64(seed ^ 0x616e69ULL));
  std::uniform_int_distribution<size_t> first(0, n - 1);
  std::uniform_int_distribution<size_t> other(0, n - 2);
  for (size_t k = 0; k < num_pairs; ++k) {
    const size_t i = first(rng);
    size_t j = other(rng);
    if (j >= i) ++j;
    sum += cosine(sample[i], sample[j]);
  }
  return sum / static_cast<double>(num_pairs);
}

CooccurrenceStats collect_cooccurrence(std::span<const CoocDocument> docs,
                                       uint32_t min_count) {
  CooccurrenceStats raw;
  raw.total_docs = static_cast<uint32_t>(docs.size());
  for (const auto& doc : docs) {
    std::set<uint32_t> tokens(doc.token_ids.begin(), doc.token_ids.end());
    for (uint32_t t : tokens) ++raw.token_counts[t];
    for (const auto& e : doc.encoding.entries()) {
      ++raw.latent_counts[e.id];
      for (uint32_t t : tokens) ++raw.joint_counts[{t, e.id}];
    }
  }
  CooccurrenceStats out;
  out.total_docs = raw.total_docs;
  for (const auto& [t, c] : raw.token_counts) {
    if (c >= min_count) out.token_counts.emplace(t, c);
  }
  for (const auto& [l, c] : raw.latent_counts) {
    if (c >= min_count) out.latent_counts.emplace(l, c);
  }
  for (const auto& [key, c] : raw.joint_counts) {
    if (out.token_counts.contains(key.first) &&
        out.latent_counts.contains(key.second)) {
      out.joint_counts.emplace(key, c);
    }
  }
  return out;
}

std::string to_string(PairKind k) {
  switch (k) {
    case PairKind::kSynonym:
      return "synonym";
    case PairKind::kPolysemy:
      return "polysemy";
    case PairKind::kIdentity:
      return "identity";
    case PairKind::kUnclassified:
      return "unclassified";
  }
  return "unclassified";
}

PairKind classify_probabilities(double p_l_given_t, double p_t_given_l) {
  if (p_t_given_l <= 0.4 && p_l_given_t >= 0.6) return PairKind::kSynonym;
  if (p_l_given_t <= 0.4 && p_t_given_l >= 0.6) return PairKind::kPolysemy;
  if (p_l_given_t >= 0.6 && p_t_given_l >= 0.6) return PairKind::kIdentity;
  return PairKind::kUnclassified;
}

std::vector<PairLabel> classify_pairs(const CooccurrenceStats& stats,
                                      double prob_floor) {
  std::vector<PairLabel> out;
  for (const auto& [key, joint] : stats.joint_counts) {
    const auto tc = stats.token_counts.find(key.first);
    const auto lc = stats.latent_counts.find(key.second);
    if (tc == stats.token_counts.end() || lc == stats.latent_counts.end()) {
      continue;
    }
    PairLabel p;
    p.token = key.first;
    p.latent = key.second;
    p.p_l_given_t = static_cast<double>(joint) / tc->second;
    p.p_t_given_l = static_cast<double>(joint) / lc->second;
    if (p.p_l_given_t < prob_floor || p.p_t_given_l < prob_floor) continue;
    p.label = classify_probabilities(p.p_l_given_t, p.p_t_given_l);
    out.push_back(p);
  }
  return out;
}

double binomial_upper_tail(uint32_t n, double p0, uint32_t observed) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) {
    throw InvalidArgument("binomial_upper_tail: p0 must lie in [0, 1]");
  }
  if (observed == 0) return 1.0;
  if (observed > n) return 0.0;
  boost::math::binomial_distribution<double> dist(n, p0);
  return boost::math::cdf(boost::math::complement(dist, observed - 1));
}

std::vector<PairLabel> binomial_filter(const CooccurrenceStats& stats,
                                       std::span<const PairLabel> pairs,
                                       double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidArgument("binomial_filter: confidence must lie in (0, 1)");
  }
  if (stats.total_docs == 0) return {};
  const double alpha = 1.0 - confidence;
  const double total = stats.total_docs;
  std::vector<PairLabel> out;
  for (PairLabel p : pairs) {
    const auto tc = stats.token_counts.find(p.token);
    const auto lc = stats.latent_counts.find(p.latent);
    const auto jc = stats.joint_counts.find({p.token, p.latent});
    if (tc == stats.token_counts.end() || lc == stats.latent_counts.end() ||
        jc == stats.joint_counts.end()) {
      throw InvalidArgument("binomial_filter: pair not present in stats");
    }
    p.p_value_lt = binomial_upper_tail(tc->second, lc->second / total, jc->second);
    p.p_value_tl = binomial_upper_tail(lc->second, tc->second / total, jc->second);
    if (p.p_value_lt < alpha && p.p_value_tl < alpha) out.push_back(p);
  }
  return out;
}

OverlapStats multilingual_overlap(
    std::span<const std::vector<SparseVector>> parallel) {
  if (parallel.empty()) throw EmptyInputError("multilingual_overlap: no documents");
  std::vector<double> overlaps, lens;
  for (size_t d = 0; d < parallel.size(); ++d) {
    const auto& langs = parallel[d];
    if (langs.size() < 2) {
      throw InvalidArgument("multilingual_overlap: document " + std::to_string(d) +
                            " has fewer than 2 languages");
    }
    std::vector<uint32_t> common;
    for (const auto& e : langs[0].entries()) common.push_back(e.id);
    for (const auto& v : langs) {
      std::vector<uint32_t> ids;
      for (const auto& e : v.entries()) ids.push_back(e.id);
      std::vector<uint32_t> next;
      std::set_intersection(common.begin(), common.end(), ids.begin(), ids.end(),
                            std::back_inserter(next));
      common = std::move(next);
      lens.push_back(static_cast<double>(v.nnz()));
    }
    overlaps.push_back(static_cast<double>(common.size()));
  }
  auto mean_std = [](const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    return std::pair{m, std::sqrt(var / static_cast<double>(xs.size()))};
  };
  OverlapStats s;
  s.documents = parallel.size();
  std::tie(s.mean_overlap, s.std_overlap) = mean_std(overlaps);
  std::tie(s.mean_doc_len, s.std_doc_len) = mean_std(lens);
  return s;
}

double atom_recovery(const SaeParams& p, std::span<const DenseVector> atoms,
                     double threshold) {
  if (atoms.empty()) throw EmptyInputError("atom_recovery: no atoms");
  struct Cand {
    double cos;
    size_t atom, latent;
  };
  std::vector<Cand> cands;
  cands.reserve(atoms.size() * p.latents);
  for (size_t c = 0; c < atoms.size(); ++c) {
    if (atoms[c].size() != p.dim) {
      throw DimensionError("atom_recovery: atom dim " +
                           std::to_string(atoms[c].size()) + " != " +
                           std::to_string(p.dim));
    }
    const double an = l2_norm(atoms[c]);
    for (size_t j = 0; j < p.latents; ++j) {
      const double dn = l2_norm(p.dec_col(j));
      const double cs =
          an > 0.0 && dn > 0.0 ? std::abs(dot(p.dec_col(j), atoms[c])) / (an * dn)
                               : 0.0;
      cands.push_back({cs, c, j});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.cos > b.cos; });
  std::vector<bool> used_atom(atoms.size()), used_latent(p.latents);
  size_t hits = 0;
  for (const auto& c : cands) {
    if (used_atom[c.atom] || used_latent[c.latent]) continue;
    used_atom[c.atom] = used_latent[c.latent] = true;
    if (c.cos >= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(atoms.size());
}

}  // namespace saesplade
