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

#include "saesplade/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include "saesplade/hash.hpp"

namespace saesplade {

void EmbeddingCorpus::add(TokenEmbeddingSequence seq) {
  if (dim_ == 0) dim_ = seq.dim();
  if (seq.dim() != dim_) {
    throw DimensionError("corpus has d=" + std::to_string(dim_) + " but '" +
                         seq.doc_id() + "' has d=" + std::to_string(seq.dim()));
  }
  auto [it, inserted] = by_id_.emplace(seq.doc_id(), items_.size());
  if (!inserted) {
    throw InvalidArgument("duplicate doc_id '" + seq.doc_id() + "'");
  }
  items_.push_back(std::move(seq));
}

const TokenEmbeddingSequence* EmbeddingCorpus::find(
    std::string_view doc_id) const {
  auto it = by_id_.find(std::string(doc_id));
  return it == by_id_.end() ? nullptr : &items_[it->second];
}

size_t EmbeddingCorpus::token_count() const {
  size_t n = 0;
  for (const auto& item : items_) n += item.size();
  return n;
}

std::vector<DenseVector> EmbeddingCorpus::flatten_tokens() const {
  std::vector<DenseVector> out;
  out.reserve(token_count());
  for (const auto& item : items_) {
    for (size_t i = 0; i < item.size(); ++i) {
      auto t = item.token(i);
      out.emplace_back(t.begin(), t.end());
    }
  }
  return out;
}

namespace {

DenseVector unit_gaussian(std::mt19937_64& rng, size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& x : v) x = normal(rng);
    norm = l2_norm(v);
  }
  for (auto& x : v) x /= norm;
  return v;
}

// Picks `count` distinct values from [0, n).
std::vector<uint32_t> sample_distinct(std::mt19937_64& rng, size_t n,
                                      size_t count) {
  std::vector<uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

std::vector<std::string> toy_terms(std::string_view text) {
  std::vector<std::string> terms;
  std::string cur;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) terms.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) terms.push_back(std::move(cur));
  return terms;
}

uint32_t toy_term_id(std::string_view term) {
  return static_cast<uint32_t>(fnv1a64(term));
}

TokenEmbeddingSequence toy_encode(std::string_view doc_id,
                                  std::string_view text,
                                  const ToyEncoderConfig& cfg) {
  if (cfg.dim == 0) throw DimensionError("toy encoder needs d > 0");
  const auto terms = toy_terms(text);
  if (terms.empty()) {
    throw EmptyInputError("toy_encode: text for '" + std::string(doc_id) +
                          "' has no terms");
  }
  const uint64_t seed_mix = splitmix64(cfg.seed);
  std::vector<DenseVector> term_vecs;
  std::vector<uint32_t> ids;
  term_vecs.reserve(terms.size());
  for (const auto& t : terms) {
    const uint64_t h = fnv1a64(t);
    std::mt19937_64 rng(splitmix64(h ^ seed_mix));
    term_vecs.push_back(unit_gaussian(rng, cfg.dim));
    ids.push_back(static_cast<uint32_t>(h));
  }

  const size_t n = terms.size();
  std::vector<double> values(n * cfg.dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i >= cfg.window ? i - cfg.window : 0;
    const size_t hi = std::min(n - 1, i + cfg.window);
    const double inv = 1.0 / static_cast<double>(hi - lo + 1);
    double* row = values.data() + i * cfg.dim;
    for (size_t j = lo; j <= hi; ++j) {
      for (size_t c = 0; c < cfg.dim; ++c) row[c] += term_vecs[j][c];
    }
    for (size_t c = 0; c < cfg.dim; ++c) row[c] *= inv;
  }
  return TokenEmbeddingSequence(std::string(doc_id), cfg.dim, std::move(values),
                                std::move(ids));
}

std::vector<DenseVector> random_unit_vectors(size_t count, size_t dim,
                                             uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<DenseVector> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(unit_gaussian(rng, dim));
  return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.dim == 0 || spec.concepts == 0 || spec.active_per_token == 0 ||
      spec.docs == 0 || spec.tokens_per_doc == 0) {
    throw InvalidArgument("synthetic spec counts must be positive");
  }
  if (spec.active_per_token > spec.concepts) {
    throw InvalidArgument("synthetic spec: active_per_token (" +
                          std::to_string(spec.active_per_token) +
                          ") exceeds concepts (" +
                          std::to_string(spec.concepts) + ")");
  }
  if (spec.noise_sigma < 0.0) {
    throw InvalidArgument("synthetic spec: noise_sigma must be >= 0");
  }

  SyntheticData out{EmbeddingCorpus(spec.dim), {}};
  out.truth.atoms =
      random_unit_vectors(spec.concepts, spec.dim, splitmix64(spec.seed));
  std::mt19937_64 rng(splitmix64(spec.seed ^ 0x5eedULL));
  std::uniform_real_distribution<double> coef(0.5, 1.5);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (size_t doc = 0; doc < spec.docs; ++doc) {
    std::vector<double> values(spec.tokens_per_doc * spec.dim, 0.0);
    std::vector<uint32_t> token_ids(spec.tokens_per_doc);
    for (size_t t = 0; t < spec.tokens_per_doc; ++t) {
      auto active = sample_distinct(rng, spec.concepts, spec.active_per_token);
      std::sort(active.begin(), active.end());
      double* row = values.data() + t * spec.dim;
      for (uint32_t c : active) {
        const double a = coef(rng);
        for (size_t i = 0; i < spec.dim; ++i) {
          row[i] += a * out.truth.atoms[c][i];
        }
      }
      if (spec.noise_sigma > 0.0) {
        for (size_t i = 0; i < spec.dim; ++i) {
          row[i] += spec.noise_sigma * noise(rng);
        }
      }
      token_ids[t] = active.front();
      out.truth.active_sets.push_back(std::move(active));
    }
    out.corpus.add(TokenEmbeddingSequence("doc" + std::to_string(doc),
                                          spec.dim, std::move(values),
                                          std::move(token_ids)));
  }
  return out;
}

namespace {

struct TokenWriter {
  const std::vector<DenseVector>& atoms;
  double noise_sigma;
  std::mt19937_64& rng;
  std::uniform_real_distribution<double> coef{0.5, 1.5};
  std::normal_distribution<double> noise{0.0, 1.0};

  void append(uint32_t concept_id, std::vector<double>& values,
              std::vector<uint32_t>& ids) {
    const double a = coef(rng);
    for (double x : atoms[concept_id]) {
      values.push_back(a * x + (noise_sigma > 0.0 ? noise_sigma * noise(rng)
                                                  : 0.0));
    }
    ids.push_back(concept_id);
  }
};

}  // namespace

RelevanceTask generate_relevance_task(const RelevanceTaskSpec& spec) {
  if (spec.dim == 0 || spec.topics == 0 || spec.topics_per_doc == 0 ||
      spec.tokens_per_topic == 0 || spec.query_tokens_per_topic == 0 ||
      spec.docs < 2 || spec.negatives == 0) {
    throw InvalidArgument("relevance task counts must be positive");
  }
  if (2 * spec.topics_per_doc > spec.topics) {
    throw InvalidArgument(
        "relevance task needs topics >= 2 * topics_per_doc so that "
        "disjoint negatives exist");
  }

  RelevanceTask task{EmbeddingCorpus(spec.dim), EmbeddingCorpus(spec.dim),
                     EmbeddingCorpus(spec.dim), {}, {}, {}, {}};
  // Concept 2t is the document form of topic t, 2t+1 the query form.
  task.atoms =
      random_unit_vectors(2 * spec.topics, spec.dim, splitmix64(spec.seed));
  std::mt19937_64 rng(splitmix64(spec.seed ^ 0x7e1ULL));
  TokenWriter writer{task.atoms, spec.noise_sigma, rng};

  std::vector<std::vector<uint32_t>> doc_topics(spec.docs);
  for (size_t d = 0; d < spec.docs; ++d) {
    doc_topics[d] = sample_distinct(rng, spec.topics, spec.topics_per_doc);
    std::vector<uint32_t> order;
    for (uint32_t t : doc_topics[d]) {
      for (size_t r = 0; r < spec.tokens_per_topic; ++r) order.push_back(t);
    }
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> values;
    std::vector<uint32_t> ids;
    for (uint32_t t : order) writer.append(2 * t, values, ids);
    task.docs.add(TokenEmbeddingSequence("d" + std::to_string(d), spec.dim,
                                         std::move(values), std::move(ids)));
    std::sort(doc_topics[d].begin(), doc_topics[d].end());
  }

  auto disjoint = [&](size_t a, size_t b) {
    for (uint32_t t : doc_topics[a]) {
      if (std::binary_search(doc_topics[b].begin(), doc_topics[b].end(), t)) {
        return false;
      }
    }
    return true;
  };

  std::uniform_int_distribution<size_t> pick_doc(0, spec.docs - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto make_query = [&](const std::string& qid, EmbeddingCorpus& into,
                        Qrels& qrels) -> size_t {
    const size_t pos = pick_doc(rng);
    std::vector<double> values;
    std::vector<uint32_t> ids;
    for (uint32_t t : doc_topics[pos]) {
      for (size_t r = 0; r < spec.query_tokens_per_topic; ++r) {
        const bool variant = unit(rng) < spec.query_variant_rate;
        writer.append(2 * t + (variant ? 1u : 0u), values, ids);
      }
    }
    into.add(TokenEmbeddingSequence(qid, spec.dim, std::move(values),
                                    std::move(ids)));
    qrels[qid]["d" + std::to_string(pos)] = 1;
    return pos;
  };

  const double pos_score = 2.0 * static_cast<double>(spec.topics_per_doc);
  for (size_t q = 0; q < spec.train_queries; ++q) {
    const std::string qid = "q" + std::to_string(q);
    const size_t pos = make_query(qid, task.train_queries, task.train_qrels);
    Triple triple{qid, "d" + std::to_string(pos), {}, {pos_score}};
    size_t attempts = 0;
    while (triple.neg_ids.size() < spec.negatives) {
      const size_t cand = pick_doc(rng);
      if (++attempts > 1000 * spec.docs) {
        throw InvalidArgument("relevance task: cannot find disjoint negatives");
      }
      if (cand == pos || !disjoint(pos, cand)) continue;
      triple.neg_ids.push_back("d" + std::to_string(cand));
      triple.teacher_scores.push_back(0.0);
    }
    task.train_triples.push_back(std::move(triple));
  }
  for (size_t q = 0; q < spec.test_queries; ++q) {
    make_query("t" + std::to_string(q), task.test_queries, task.test_qrels);
  }
  return task;
}

}  // namespace saesplade
