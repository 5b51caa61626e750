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

#include "saesplade/splade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "saesplade/hash.hpp"
#include "saesplade/metrics.hpp"

namespace saesplade {

SparseVector splade_pool(std::span<const DenseVector> activations) {
  if (activations.empty()) throw EmptyInputError("splade_pool: no tokens");
  const size_t m = activations.front().size();
  DenseVector best(m, 0.0);
  for (const auto& row : activations) {
    if (row.size() != m) throw DimensionError("splade_pool: ragged rows");
    for (size_t j = 0; j < m; ++j) best[j] = std::max(best[j], row[j]);
  }
  std::vector<SparseEntry> entries;
  for (size_t j = 0; j < m; ++j) {
    if (best[j] > 0.0) {
      const double w = std::log1p(best[j]);
      if (w > 0.0) entries.push_back({static_cast<uint32_t>(j), w});
    }
  }
  return SparseVector::from_entries(static_cast<uint32_t>(m), std::move(entries));
}

namespace {

// Pooled representation plus what backpropagation needs: for each kept
// latent, the arg-max token and d(weight)/d(pre-activation).
struct TextForward {
  SparseVector weights;
  std::vector<uint32_t> argmax_token;
  std::vector<double> dweight_dpre;
  std::vector<DenseVector> inputs;
};

TextForward forward_text(const SaeParams& p, const TokenEmbeddingSequence& seq,
                         std::optional<size_t> k,
                         const InputNormalizer* normalizer) {
  if (seq.dim() != p.dim) {
    throw DimensionError("encode_text: '" + seq.doc_id() + "' has d=" +
                         std::to_string(seq.dim()) + ", SAE d=" +
                         std::to_string(p.dim));
  }
  TextForward f;
  const double scale = normalizer ? normalizer->sigma : 1.0;
  DenseVector best(p.latents, 0.0);
  std::vector<uint32_t> best_token(p.latents, 0);
  f.inputs.reserve(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) {
    auto raw = seq.token(i);
    f.inputs.push_back(normalizer ? normalizer->apply(raw)
                                  : DenseVector(raw.begin(), raw.end()));
    const DenseVector z = sae_encode(p, f.inputs.back(), k);
    for (size_t j = 0; j < p.latents; ++j) {
      if (z[j] > best[j]) {
        best[j] = z[j];
        best_token[j] = static_cast<uint32_t>(i);
      }
    }
  }
  std::vector<SparseEntry> entries;
  for (size_t j = 0; j < p.latents; ++j) {
    if (!(best[j] > 0.0)) continue;
    const double w = scale * std::log1p(best[j]);
    if (!(w > 0.0)) continue;
    entries.push_back({static_cast<uint32_t>(j), w});
    f.argmax_token.push_back(best_token[j]);
    f.dweight_dpre.push_back(scale / (1.0 + best[j]));
  }
  f.weights = SparseVector::from_entries(static_cast<uint32_t>(p.latents),
                                         std::move(entries));
  return f;
}

}  // namespace

SparseVector encode_text(const SaeParams& p, const TokenEmbeddingSequence& seq,
                         std::optional<size_t> k_splade,
                         const InputNormalizer* normalizer) {
  if (seq.dim() != p.dim) {
    throw DimensionError("encode_text: '" + seq.doc_id() + "' has d=" +
                         std::to_string(seq.dim()) + ", SAE d=" +
                         std::to_string(p.dim));
  }
  std::vector<DenseVector> rows;
  rows.reserve(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) {
    auto raw = seq.token(i);
    rows.push_back(normalizer ? sae_encode(p, normalizer->apply(raw), k_splade)
                              : sae_encode(p, raw, k_splade));
  }
  SparseVector pooled = splade_pool(rows);
  if (!normalizer) return pooled;
  std::vector<SparseEntry> scaled(pooled.entries().begin(),
                                  pooled.entries().end());
  for (auto& e : scaled) e.weight *= normalizer->sigma;
  return SparseVector::from_entries(pooled.vocab_size(), std::move(scaled));
}

std::vector<SparseVector> encode_corpus(const SaeParams& p,
                                        const EmbeddingCorpus& corpus,
                                        std::optional<size_t> k_splade,
                                        const InputNormalizer* normalizer) {
  std::vector<SparseVector> out;
  out.reserve(corpus.size());
  for (const auto& item : corpus.items()) {
    out.push_back(encode_text(p, item, k_splade, normalizer));
  }
  return out;
}

namespace {

// Batch means per latent; also validates the batch.
DenseVector batch_means(std::span<const SparseVector> batch) {
  if (batch.empty()) throw EmptyInputError("flops_reg: empty batch");
  const uint32_t m = batch.front().vocab_size();
  DenseVector mean(m, 0.0);
  for (const auto& v : batch) {
    if (v.vocab_size() != m) throw DimensionError("flops_reg: mixed vocabularies");
    for (const auto& e : v.entries()) mean[e.id] += e.weight;
  }
  for (auto& x : mean) x /= static_cast<double>(batch.size());
  return mean;
}

void check_groups(std::span<const std::vector<double>> student,
                  std::span<const std::vector<double>> teacher,
                  const char* what) {
  if (student.size() != teacher.size()) {
    throw DimensionError(std::string(what) + ": group count mismatch");
  }
  if (student.empty()) throw EmptyInputError(std::string(what) + ": no groups");
  for (size_t g = 0; g < student.size(); ++g) {
    if (student[g].size() != teacher[g].size()) {
      throw DimensionError(std::string(what) + ": group size mismatch");
    }
    if (student[g].size() < 2) {
      throw InvalidArgument(std::string(what) +
                            ": every group needs at least 2 candidates");
    }
  }
}

std::vector<double> log_softmax(std::span<const double> x) {
  const double mx = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  const double lse = mx + std::log(s);
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] - lse;
  return out;
}

}  // namespace

double flops_reg(std::span<const SparseVector> batch) {
  const DenseVector mean = batch_means(batch);
  double s = 0.0;
  for (double x : mean) s += x * x;
  return s;
}

double kl_loss(std::span<const std::vector<double>> student,
               std::span<const std::vector<double>> teacher) {
  check_groups(student, teacher, "kl_loss");
  double total = 0.0;
  for (size_t g = 0; g < student.size(); ++g) {
    const auto ls = log_softmax(student[g]);
    const auto lt = log_softmax(teacher[g]);
    double kl = 0.0;
    for (size_t i = 0; i < ls.size(); ++i) kl += std::exp(lt[i]) * (lt[i] - ls[i]);
    total += kl;
  }
  return total / static_cast<double>(student.size());
}

double margin_mse_loss(std::span<const std::vector<double>> student,
                       std::span<const std::vector<double>> teacher) {
  check_groups(student, teacher, "margin_mse_loss");
  double total = 0.0;
  size_t pairs = 0;
  for (size_t g = 0; g < student.size(); ++g) {
    for (size_t n = 1; n < student[g].size(); ++n) {
      const double diff = (student[g][0] - student[g][n]) -
                          (teacher[g][0] - teacher[g][n]);
      total += diff * diff;
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

void validate(const IrTrainConfig& cfg) {
  if (cfg.lambda_kl < 0 || cfg.lambda_mse < 0 || cfg.lambda_flops_d < 0 ||
      cfg.lambda_flops_q < 0) {
    throw InvalidArgument("IR loss weights must be >= 0");
  }
  if (cfg.k_splade && *cfg.k_splade == 0) {
    throw InvalidArgument("k_splade must be positive (omit it for no mask)");
  }
  if (cfg.batch_queries == 0 || cfg.negatives_per_query == 0) {
    throw InvalidArgument("batch_queries and negatives_per_query must be > 0");
  }
}

namespace {

struct BatchForward {
  std::vector<TextForward> queries;
  std::vector<std::vector<TextForward>> candidates;
  std::vector<std::vector<double>> student;
  std::vector<std::vector<double>> teacher;
  IrLossReport report;
};

BatchForward forward_batch(const SaeParams& p, const DistillBatch& batch,
                           const IrTrainConfig& cfg,
                           const InputNormalizer* normalizer) {
  if (batch.empty()) throw EmptyInputError("ir_loss: empty batch");
  BatchForward f;
  std::vector<SparseVector> qvecs, dvecs;
  for (const auto& ex : batch) {
    if (!ex.query) throw InvalidArgument("ir_loss: example without a query");
    if (ex.candidates.size() < 2 ||
        ex.teacher_scores.size() != ex.candidates.size()) {
      throw InvalidArgument(
          "ir_loss: each example needs >= 2 candidates with one teacher score "
          "each");
    }
    f.queries.push_back(forward_text(p, *ex.query, cfg.k_splade, normalizer));
    qvecs.push_back(f.queries.back().weights);
    auto& cands = f.candidates.emplace_back();
    std::vector<double> scores;
    for (const auto* c : ex.candidates) {
      if (!c) throw InvalidArgument("ir_loss: null candidate");
      cands.push_back(forward_text(p, *c, cfg.k_splade, normalizer));
      dvecs.push_back(cands.back().weights);
      scores.push_back(sparse_dot(qvecs.back(), cands.back().weights));
    }
    f.student.push_back(std::move(scores));
    f.teacher.push_back(ex.teacher_scores);
  }
  auto& r = f.report;
  r.kl = kl_loss(f.student, f.teacher);
  r.mse = margin_mse_loss(f.student, f.teacher);
  r.flops_d = flops_reg(dvecs);
  r.flops_q = flops_reg(qvecs);
  r.total = cfg.lambda_kl * r.kl + cfg.lambda_mse * r.mse +
            cfg.lambda_flops_d * r.flops_d + cfg.lambda_flops_q * r.flops_q;
  return f;
}

// Adds dL/dw (dense, length M) of one text into the encoder gradients.
void backprop_text(const SaeParams& p, const TextForward& f,
                   std::span<const double> dweights, EncoderGrads& g) {
  auto entries = f.weights.entries();
  for (size_t e = 0; e < entries.size(); ++e) {
    const uint32_t j = entries[e].id;
    const double dpre = dweights[j] * f.dweight_dpre[e];
    if (dpre == 0.0) continue;
    const auto& h = f.inputs[f.argmax_token[e]];
    g.b_enc[j] += dpre;
    double* row = g.w_enc.data() + static_cast<size_t>(j) * p.dim;
    for (size_t i = 0; i < p.dim; ++i) row[i] += dpre * h[i];
  }
}

// dL/dscore for every (group, candidate).
std::vector<std::vector<double>> score_grads(const BatchForward& f,
                                             const IrTrainConfig& cfg) {
  const double n_groups = static_cast<double>(f.student.size());
  size_t pairs = 0;
  for (const auto& s : f.student) pairs += s.size() - 1;
  std::vector<std::vector<double>> out;
  for (size_t g = 0; g < f.student.size(); ++g) {
    const auto& s = f.student[g];
    const auto& t = f.teacher[g];
    std::vector<double> ds(s.size(), 0.0);
    if (cfg.lambda_kl != 0.0) {
      const auto ls = log_softmax(s);
      const auto lt = log_softmax(t);
      for (size_t i = 0; i < s.size(); ++i) {
        ds[i] += cfg.lambda_kl * (std::exp(ls[i]) - std::exp(lt[i])) / n_groups;
      }
    }
    if (cfg.lambda_mse != 0.0) {
      for (size_t n = 1; n < s.size(); ++n) {
        const double diff = (s[0] - s[n]) - (t[0] - t[n]);
        const double c = cfg.lambda_mse * 2.0 * diff / static_cast<double>(pairs);
        ds[0] += c;
        ds[n] -= c;
      }
    }
    out.push_back(std::move(ds));
  }
  return out;
}

}  // namespace

IrLossReport ir_loss(const SaeParams& p, const DistillBatch& batch,
                     const IrTrainConfig& cfg,
                     const InputNormalizer* normalizer) {
  validate(cfg);
  return forward_batch(p, batch, cfg, normalizer).report;
}

EncoderGrads ir_grad(const SaeParams& p, const DistillBatch& batch,
                     const IrTrainConfig& cfg,
                     const InputNormalizer* normalizer, IrLossReport* report) {
  validate(cfg);
  const BatchForward f = forward_batch(p, batch, cfg, normalizer);
  if (report) *report = f.report;
  EncoderGrads g{std::vector<double>(p.w_enc.size(), 0.0),
                 std::vector<double>(p.b_enc.size(), 0.0)};
  const size_t m = p.latents;

  // FLOPS terms: d/dw_bj of sum_j mean_j^2 is 2 mean_j / B.
  DenseVector q_mean(m, 0.0), d_mean(m, 0.0);
  size_t n_docs = 0;
  for (const auto& q : f.queries) {
    for (const auto& e : q.weights.entries()) q_mean[e.id] += e.weight;
  }
  for (const auto& cands : f.candidates) {
    for (const auto& c : cands) {
      for (const auto& e : c.weights.entries()) d_mean[e.id] += e.weight;
      ++n_docs;
    }
  }
  const double n_q = static_cast<double>(f.queries.size());
  const double n_d = static_cast<double>(n_docs);
  for (size_t j = 0; j < m; ++j) {
    q_mean[j] /= n_q;
    d_mean[j] /= n_d;
  }

  const auto ds = score_grads(f, cfg);
  DenseVector dq(m), dd(m);
  for (size_t gi = 0; gi < f.queries.size(); ++gi) {
    const auto& q = f.queries[gi];
    for (size_t j = 0; j < m; ++j) {
      dq[j] = cfg.lambda_flops_q * 2.0 * q_mean[j] / n_q;
    }
    for (size_t c = 0; c < f.candidates[gi].size(); ++c) {
      const auto& doc = f.candidates[gi][c];
      const double s = ds[gi][c];
      for (size_t j = 0; j < m; ++j) {
        dd[j] = cfg.lambda_flops_d * 2.0 * d_mean[j] / n_d;
      }
      if (s != 0.0) {
        // score = sum over shared ids of w_q * w_d.
        for (const auto& e : doc.weights.entries()) dq[e.id] += s * e.weight;
        for (const auto& e : q.weights.entries()) dd[e.id] += s * e.weight;
      }
      backprop_text(p, doc, dd, g);
    }
    backprop_text(p, q, dq, g);
  }
  return g;
}

DistillExample make_example(const Triple& t, const EmbeddingCorpus& queries,
                            const EmbeddingCorpus& docs, size_t max_negatives) {
  DistillExample ex;
  ex.query = queries.find(t.query_id);
  if (!ex.query) throw NotFoundError("triple query '" + t.query_id + "' not found");
  if (t.teacher_scores.size() != t.neg_ids.size() + 1) {
    throw InvalidArgument("triple for '" + t.query_id +
                          "': teacher_scores must align with [pos, neg...]");
  }
  auto resolve = [&](const std::string& id) {
    const auto* d = docs.find(id);
    if (!d) throw NotFoundError("triple document '" + id + "' not found");
    return d;
  };
  ex.candidates.push_back(resolve(t.pos_id));
  ex.teacher_scores.push_back(t.teacher_scores[0]);
  const size_t n = std::min(max_negatives, t.neg_ids.size());
  for (size_t i = 0; i < n; ++i) {
    ex.candidates.push_back(resolve(t.neg_ids[i]));
    ex.teacher_scores.push_back(t.teacher_scores[i + 1]);
  }
  if (ex.candidates.size() < 2) {
    throw InvalidArgument("triple for '" + t.query_id + "' has no negatives");
  }
  return ex;
}

FinetuneResult finetune(const SaeParams& init, const EmbeddingCorpus& queries,
                        const EmbeddingCorpus& docs,
                        std::span<const Triple> triples,
                        const IrTrainConfig& cfg,
                        const InputNormalizer* normalizer) {
  validate(cfg);
  if (cfg.normalize_inputs && !normalizer) {
    throw InvalidArgument("finetune: normalize_inputs set but no normalizer given");
  }
  const InputNormalizer* norm = cfg.normalize_inputs ? normalizer : nullptr;
  FinetuneResult out{init, {}};
  if (cfg.steps == 0) return out;
  if (triples.empty()) throw EmptyInputError("finetune: no triples");
  if (queries.dim() != init.dim || docs.dim() != init.dim) {
    throw DimensionError("finetune: corpus d differs from SAE d=" +
                         std::to_string(init.dim));
  }

  std::vector<DistillExample> examples;
  examples.reserve(triples.size());
  for (const auto& t : triples) {
    examples.push_back(make_example(t, queries, docs, cfg.negatives_per_query));
  }
  std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x66696e65ULL));
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const size_t n_eval =
      examples.size() >= 10 ? std::min(cfg.eval_triples, examples.size() / 5) : 0;
  std::vector<size_t> eval(order.begin(),
                           order.begin() + static_cast<ptrdiff_t>(
                                               n_eval > 0 ? n_eval : order.size()));
  std::vector<size_t> train(order.begin() + static_cast<ptrdiff_t>(n_eval),
                            order.end());

  SaeParams& p = out.params;
  const size_t sizes[] = {p.w_enc.size(), p.b_enc.size()};
  AdamState adam(sizes);
  const size_t batch_size = std::min(cfg.batch_queries, train.size());
  size_t cursor = 0;
  DistillBatch batch(batch_size);

  auto eval_stats = [&](FinetuneLogEntry& e) {
    std::vector<SparseVector> qv, dv;
    for (size_t i : eval) {
      qv.push_back(encode_text(p, *examples[i].query, cfg.k_splade, norm));
      for (const auto* c : examples[i].candidates) {
        dv.push_back(encode_text(p, *c, cfg.k_splade, norm));
      }
    }
    double qn = 0.0, dn = 0.0;
    for (const auto& v : qv) qn += static_cast<double>(v.nnz());
    for (const auto& v : dv) dn += static_cast<double>(v.nnz());
    e.mean_query_nnz = qn / static_cast<double>(qv.size());
    e.mean_doc_nnz = dn / static_cast<double>(dv.size());
    e.qd_flops = qd_flops(qv, dv);
  };

  for (size_t step = 1; step <= cfg.steps; ++step) {
    for (size_t b = 0; b < batch_size; ++b) {
      if (cursor == train.size()) {
        std::shuffle(train.begin(), train.end(), rng);
        cursor = 0;
      }
      batch[b] = examples[train[cursor++]];
    }
    IrLossReport rep;
    const EncoderGrads g = ir_grad(p, batch, cfg, norm, &rep);
    const std::span<double> params[] = {p.w_enc, p.b_enc};
    const std::span<const double> grads[] = {g.w_enc, g.b_enc};
    adam.update(params, grads, cfg.adam);

    if ((cfg.log_every > 0 && step % cfg.log_every == 0) || step == cfg.steps) {
      FinetuneLogEntry e;
      e.step = step;
      e.train = rep;
      eval_stats(e);
      out.report.log.push_back(e);
    }
  }
  return out;
}

}  // namespace saesplade
