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

#include "saesplade/sae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "saesplade/hash.hpp"

namespace saesplade {

std::vector<std::span<double>> SaeParams::blocks() {
  return {w_enc, b_enc, w_dec, b_dec};
}

std::vector<std::span<const double>> SaeParams::blocks() const {
  return {w_enc, b_enc, w_dec, b_dec};
}

std::string to_string(SaeVariant v) {
  switch (v) {
    case SaeVariant::kTopK:
      return "topk";
    case SaeVariant::kHierarchicalTopK:
      return "hierarchical_topk";
    case SaeVariant::kMatryoshkaTopK:
      return "matryoshka_topk";
    case SaeVariant::kL1:
      return "l1";
  }
  return "unknown";
}

SaeVariant parse_sae_variant(const std::string& name) {
  if (name == "topk") return SaeVariant::kTopK;
  if (name == "hierarchical_topk" || name == "hierarchical") {
    return SaeVariant::kHierarchicalTopK;
  }
  if (name == "matryoshka_topk" || name == "matryoshka") {
    return SaeVariant::kMatryoshkaTopK;
  }
  if (name == "l1") return SaeVariant::kL1;
  throw InvalidArgument("unknown SAE variant '" + name + "'");
}

void validate(const SaeTrainConfig& cfg, size_t latents) {
  if (latents == 0) throw InvalidArgument("SAE needs at least one latent");
  if (cfg.batch_tokens == 0) throw InvalidArgument("batch_tokens must be > 0");
  if (cfg.alpha_sp < 0.0) throw InvalidArgument("alpha_sp must be >= 0");
  auto ascending = [](const std::vector<size_t>& v) {
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 0 || (i > 0 && v[i] <= v[i - 1])) return false;
    }
    return true;
  };
  switch (cfg.variant) {
    case SaeVariant::kTopK:
      if (cfg.k_sae == 0) throw InvalidArgument("k_sae must be > 0");
      break;
    case SaeVariant::kMatryoshkaTopK:
      if (cfg.k_sae == 0) throw InvalidArgument("k_sae must be > 0");
      if (cfg.nested_sizes.empty() || !ascending(cfg.nested_sizes) ||
          cfg.nested_sizes.back() != latents) {
        throw InvalidArgument(
            "nested_sizes must be strictly ascending and end at M=" +
            std::to_string(latents));
      }
      break;
    case SaeVariant::kHierarchicalTopK:
      if (cfg.hierarchy_ks.empty() || !ascending(cfg.hierarchy_ks)) {
        throw InvalidArgument(
            "hierarchy_ks must be non-empty and strictly ascending");
      }
      break;
    case SaeVariant::kL1:
      break;
  }
}

DenseVector InputNormalizer::apply(std::span<const double> h) const {
  if (h.size() != mean.size()) {
    throw DimensionError("normalizer: d=" + std::to_string(mean.size()) +
                         ", input d=" + std::to_string(h.size()));
  }
  DenseVector out(h.size());
  for (size_t i = 0; i < h.size(); ++i) out[i] = (h[i] - mean[i]) / sigma;
  return out;
}

InputNormalizer fit_normalizer(std::span<const DenseVector> sample) {
  if (sample.empty()) throw EmptyInputError("fit_normalizer: empty sample");
  const size_t d = sample.front().size();
  InputNormalizer out{DenseVector(d, 0.0), 0.0};
  for (const auto& h : sample) {
    if (h.size() != d) throw DimensionError("fit_normalizer: ragged sample");
    for (size_t i = 0; i < d; ++i) out.mean[i] += h[i];
  }
  for (auto& x : out.mean) x /= static_cast<double>(sample.size());
  double total = 0.0;
  for (const auto& h : sample) {
    double sq = 0.0;
    for (size_t i = 0; i < d; ++i) sq += (h[i] - out.mean[i]) * (h[i] - out.mean[i]);
    total += std::sqrt(sq);
  }
  out.sigma = total / static_cast<double>(sample.size());
  if (!(out.sigma > 1e-12)) {
    throw InvalidArgument(
        "fit_normalizer: degenerate sigma (all sampled vectors coincide)");
  }
  return out;
}

InputNormalizer fit_normalizer(const EmbeddingCorpus& corpus,
                               size_t sample_size, uint64_t seed) {
  auto tokens = corpus.flatten_tokens();
  if (tokens.size() <= sample_size) return fit_normalizer(tokens);
  std::vector<size_t> idx(tokens.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::vector<size_t> picked;
  std::mt19937_64 rng(splitmix64(seed ^ 0x6e6f726dULL));
  std::sample(idx.begin(), idx.end(), std::back_inserter(picked), sample_size,
              rng);
  std::vector<DenseVector> sample;
  sample.reserve(picked.size());
  for (size_t i : picked) sample.push_back(std::move(tokens[i]));
  return fit_normalizer(sample);
}

SaeParams sae_init(size_t dim, size_t latents, uint64_t seed) {
  if (dim == 0 || latents == 0) {
    throw InvalidArgument("sae_init: d and M must be positive");
  }
  SaeParams p(dim, latents);
  auto cols = random_unit_vectors(latents, dim, seed);
  for (size_t j = 0; j < latents; ++j) {
    std::copy(cols[j].begin(), cols[j].end(), p.dec_col(j).begin());
  }
  // Row j of W_enc is column j of W_dec: the two layouts coincide.
  p.w_enc = p.w_dec;
  return p;
}

DenseVector sae_pre_activation(const SaeParams& p, std::span<const double> h) {
  if (h.size() != p.dim) {
    throw DimensionError("sae_encode: input d=" + std::to_string(h.size()) +
                         ", SAE d=" + std::to_string(p.dim));
  }
  DenseVector pre(p.latents);
  for (size_t j = 0; j < p.latents; ++j) {
    const double* row = p.w_enc.data() + j * p.dim;
    double s = p.b_enc[j];
    for (size_t i = 0; i < p.dim; ++i) s += row[i] * h[i];
    pre[j] = s;
  }
  return pre;
}

DenseVector sae_encode(const SaeParams& p, std::span<const double> h,
                       std::optional<size_t> k) {
  DenseVector z = sae_pre_activation(p, h);
  for (auto& x : z) x = std::max(x, 0.0);
  if (k) return topk_mask(z, *k);
  return z;
}

DenseVector sae_decode(const SaeParams& p, std::span<const double> z) {
  if (z.size() != p.latents) {
    throw DimensionError("sae_decode: code length " + std::to_string(z.size()) +
                         ", SAE M=" + std::to_string(p.latents));
  }
  DenseVector out(p.b_dec);
  for (size_t j = 0; j < p.latents; ++j) {
    if (z[j] == 0.0) continue;
    auto col = p.dec_col(j);
    for (size_t i = 0; i < p.dim; ++i) out[i] += z[j] * col[i];
  }
  return out;
}

namespace {

// Positive entries among the top k of act[0, limit).
std::vector<uint32_t> positive_topk(std::span<const double> act, size_t limit,
                                    size_t k) {
  auto idx = topk_indices(act.first(limit), k);
  std::erase_if(idx, [&](uint32_t j) { return !(act[j] > 0.0); });
  return idx;
}

struct ReconTerm {
  std::vector<uint32_t> support;
  double weight = 1.0;
  bool aux = false;
};

struct SampleForward {
  DenseVector act;
  std::vector<ReconTerm> terms;
  std::vector<uint32_t> main_support;
};

SampleForward forward_sample(const SaeParams& p, std::span<const double> h,
                             const SaeTrainConfig& cfg) {
  SampleForward f;
  f.act = sae_pre_activation(p, h);
  for (auto& x : f.act) x = std::max(x, 0.0);
  const size_t m = p.latents;

  switch (cfg.variant) {
    case SaeVariant::kTopK:
      f.terms.push_back({positive_topk(f.act, m, cfg.k_sae), 1.0, false});
      break;
    case SaeVariant::kHierarchicalTopK: {
      const double w = 1.0 / static_cast<double>(cfg.hierarchy_ks.size());
      for (size_t k : cfg.hierarchy_ks) {
        f.terms.push_back({positive_topk(f.act, m, k), w, false});
      }
      break;
    }
    case SaeVariant::kMatryoshkaTopK: {
      const double w = 1.0 / static_cast<double>(cfg.nested_sizes.size());
      for (size_t prefix : cfg.nested_sizes) {
        f.terms.push_back({positive_topk(f.act, prefix, cfg.k_sae), w, false});
      }
      break;
    }
    case SaeVariant::kL1: {
      std::vector<uint32_t> support;
      for (uint32_t j = 0; j < m; ++j) {
        if (f.act[j] > 0.0) support.push_back(j);
      }
      f.terms.push_back({std::move(support), 1.0, false});
      break;
    }
  }
  f.main_support = f.terms.back().support;

  return f;
}

// Main support plus the strongest `aux_k` positive dead latents.
void add_aux_term(SampleForward& f, const SaeTrainConfig& cfg,
                  std::span<const uint8_t> dead) {
  const size_t m = f.act.size();
  DenseVector cand(m, 0.0);
  for (size_t j = 0; j < m; ++j) {
    if (dead[j]) cand[j] = f.act[j];
  }
  for (uint32_t j : f.main_support) cand[j] = 0.0;
  const auto extra = positive_topk(cand, m, cfg.aux_k);
  std::vector<uint32_t> support = f.main_support;
  support.insert(support.end(), extra.begin(), extra.end());
  std::sort(support.begin(), support.end());
  f.terms.push_back({std::move(support), cfg.aux_alpha, true});
}

DenseVector reconstruction_error(const SaeParams& p, const SampleForward& f,
                                 const ReconTerm& term,
                                 std::span<const double> h) {
  DenseVector err(p.b_dec);
  for (uint32_t j : term.support) {
    auto col = p.dec_col(j);
    const double a = f.act[j];
    for (size_t i = 0; i < p.dim; ++i) err[i] += a * col[i];
  }
  for (size_t i = 0; i < p.dim; ++i) err[i] -= h[i];
  return err;
}

SaeLossReport run_batch(const SaeParams& p, std::span<const DenseVector> batch,
                        const SaeTrainConfig& cfg, std::span<const uint8_t> dead,
                        SaeGrads* grads, std::span<uint8_t> fired) {
  if (batch.empty()) throw EmptyInputError("SAE loss: empty batch");
  validate(cfg, p.latents);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  SaeLossReport rep;
  DenseVector d_act(p.latents);

  std::vector<SampleForward> fwd;
  fwd.reserve(batch.size());
  std::vector<uint8_t> in_batch(p.latents, 0);
  for (const auto& h : batch) {
    if (h.size() != p.dim) {
      throw DimensionError("SAE loss: token d=" + std::to_string(h.size()) +
                           ", SAE d=" + std::to_string(p.dim));
    }
    fwd.push_back(forward_sample(p, h, cfg));
    for (uint32_t j : fwd.back().main_support) in_batch[j] = 1;
  }
  if (!fired.empty()) std::copy(in_batch.begin(), in_batch.end(), fired.begin());

  // A latent selected anywhere in this batch is not dead. While any latent
  // is dead every token gets the aux term; tokens without a positive dead
  // latent repeat their main reconstruction there.
  if (cfg.variant != SaeVariant::kL1 && cfg.aux_k > 0 && !dead.empty()) {
    if (dead.size() != p.latents) throw DimensionError("dead mask length != M");
    std::vector<uint8_t> live_dead(p.latents, 0);
    bool any = false;
    for (size_t j = 0; j < p.latents; ++j) {
      live_dead[j] = dead[j] && !in_batch[j];
      any = any || live_dead[j];
    }
    if (any) {
      for (auto& f : fwd) add_aux_term(f, cfg, live_dead);
    }
  }

  for (size_t s = 0; s < batch.size(); ++s) {
    const auto& h = batch[s];
    const SampleForward& f = fwd[s];
    if (grads) std::fill(d_act.begin(), d_act.end(), 0.0);

    for (const auto& term : f.terms) {
      const DenseVector err = reconstruction_error(p, f, term, h);
      const double sq = dot(err, err);
      if (term.aux) {
        rep.aux += sq * inv_n;
      } else {
        rep.rsct += term.weight * sq * inv_n;
      }
      if (!grads) continue;
      // d/d(err) of weight * ||err||^2 / n.
      const double scale = 2.0 * term.weight * inv_n;
      for (size_t i = 0; i < p.dim; ++i) grads->b_dec[i] += scale * err[i];
      for (uint32_t j : term.support) {
        auto col = p.dec_col(j);
        auto gcol = grads->dec_col(j);
        const double a = f.act[j];
        double g_a = 0.0;
        for (size_t i = 0; i < p.dim; ++i) {
          gcol[i] += scale * err[i] * a;
          g_a += scale * err[i] * col[i];
        }
        d_act[j] += g_a;
      }
    }

    if (cfg.variant == SaeVariant::kL1) {
      double l1 = 0.0;
      for (double a : f.act) l1 += a;
      rep.sparsity += l1 * inv_n;
      if (grads) {
        for (size_t j = 0; j < p.latents; ++j) {
          if (f.act[j] > 0.0) d_act[j] += cfg.alpha_sp * inv_n;
        }
      }
    }

    if (!grads) continue;
    // act = relu(pre); only latents with act > 0 ever carry gradient.
    for (size_t j = 0; j < p.latents; ++j) {
      const double g = d_act[j];
      if (g == 0.0 || !(f.act[j] > 0.0)) continue;
      grads->b_enc[j] += g;
      auto grow = grads->enc_row(j);
      for (size_t i = 0; i < p.dim; ++i) grow[i] += g * h[i];
    }
  }
  rep.total = rep.rsct + cfg.alpha_sp * rep.sparsity + cfg.aux_alpha * rep.aux;
  return rep;
}

}  // namespace

SaeLossReport sae_loss(const SaeParams& p, std::span<const DenseVector> batch,
                       const SaeTrainConfig& cfg,
                       std::span<const uint8_t> dead) {
  return run_batch(p, batch, cfg, dead, nullptr, {});
}

SaeGrads sae_grad(const SaeParams& p, std::span<const DenseVector> batch,
                  const SaeTrainConfig& cfg, std::span<const uint8_t> dead,
                  SaeLossReport* report, std::span<uint8_t> fired) {
  SaeGrads g(p.dim, p.latents);
  if (!fired.empty() && fired.size() != p.latents) {
    throw DimensionError("fired mask length != M");
  }
  auto rep = run_batch(p, batch, cfg, dead, &g, fired);
  if (report) *report = rep;
  return g;
}

void renormalize_decoder(SaeParams& p) {
  for (size_t j = 0; j < p.latents; ++j) {
    auto col = p.dec_col(j);
    const double n = l2_norm(col);
    if (n == 0.0) continue;
    for (auto& x : col) x /= n;
  }
}

double dead_latent_ratio(const SaeParams& p, std::span<const DenseVector> sample,
                         std::optional<size_t> k) {
  if (sample.empty()) throw EmptyInputError("dead_latent_ratio: empty sample");
  if (p.latents == 0) return 0.0;
  std::vector<uint8_t> alive(p.latents, 0);
  for (const auto& h : sample) {
    const DenseVector z = sae_encode(p, h, k);
    for (size_t j = 0; j < p.latents; ++j) {
      if (z[j] > 0.0) alive[j] = 1;
    }
  }
  const auto live = std::count(alive.begin(), alive.end(), uint8_t{1});
  return 1.0 - static_cast<double>(live) / static_cast<double>(p.latents);
}

namespace {

std::optional<size_t> encode_k(const SaeTrainConfig& cfg) {
  switch (cfg.variant) {
    case SaeVariant::kL1:
      return std::nullopt;
    case SaeVariant::kHierarchicalTopK:
      return cfg.hierarchy_ks.back();
    default:
      return cfg.k_sae;
  }
}

}  // namespace

SaeTrainResult train_sae(std::span<const DenseVector> tokens,
                         const SaeTrainConfig& cfg) {
  if (tokens.empty()) throw EmptyInputError("train_sae: no tokens");
  validate(cfg, cfg.latents);
  const size_t d = tokens.front().size();
  for (const auto& t : tokens) {
    if (t.size() != d) throw DimensionError("train_sae: ragged token list");
  }

  SaeTrainResult out{sae_init(d, cfg.latents, cfg.seed), {}, std::nullopt};
  SaeParams& p = out.params;

  std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x747261696eULL));
  std::vector<size_t> order(tokens.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  const size_t n_eval =
      tokens.size() >= 10 ? std::min(cfg.eval_tokens, tokens.size() / 5) : 0;
  std::vector<DenseVector> eval;
  for (size_t i = 0; i < (n_eval > 0 ? n_eval : tokens.size()); ++i) {
    eval.push_back(tokens[order[i]]);
  }
  std::vector<size_t> train(order.begin() + static_cast<ptrdiff_t>(n_eval),
                            order.end());
  out.report.train_tokens = train.size();
  out.report.eval_tokens = eval.size();

  SaeTrainConfig eval_cfg = cfg;
  eval_cfg.aux_k = 0;
  out.report.initial_eval_rsct = sae_loss(p, eval, eval_cfg).rsct;
  out.report.final_eval_rsct = out.report.initial_eval_rsct;
  const auto k_eval = encode_k(cfg);
  out.report.final_dead_ratio = dead_latent_ratio(p, eval, k_eval);
  if (cfg.steps == 0) return out;

  std::vector<size_t> block_sizes;
  for (auto b : p.blocks()) block_sizes.push_back(b.size());
  AdamState adam(block_sizes);

  const size_t batch_size = std::min(cfg.batch_tokens, train.size());
  std::vector<DenseVector> batch(batch_size);
  std::vector<uint32_t> since_fired(cfg.latents, 0);
  std::vector<uint8_t> dead(cfg.latents, 0);
  std::vector<uint8_t> fired(cfg.latents, 0);
  size_t cursor = 0;

  for (size_t step = 1; step <= cfg.steps; ++step) {
    for (size_t b = 0; b < batch_size; ++b) {
      if (cursor == train.size()) {
        std::shuffle(train.begin(), train.end(), rng);
        cursor = 0;
      }
      batch[b] = tokens[train[cursor++]];
    }
    for (size_t j = 0; j < cfg.latents; ++j) {
      dead[j] = since_fired[j] >= cfg.aux_dead_steps ? 1 : 0;
    }
    std::fill(fired.begin(), fired.end(), uint8_t{0});

    SaeLossReport rep;
    const SaeGrads g = sae_grad(p, batch, cfg, dead, &rep, fired);
    adam.update(p.blocks(), std::as_const(g).blocks(), cfg.adam);
    renormalize_decoder(p);

    for (size_t j = 0; j < cfg.latents; ++j) {
      since_fired[j] = fired[j] ? 0 : since_fired[j] + 1;
    }

    if ((cfg.log_every > 0 && step % cfg.log_every == 0) || step == cfg.steps) {
      SaeLogEntry e;
      e.step = step;
      e.train = rep;
      e.eval_rsct = sae_loss(p, eval, eval_cfg).rsct;
      e.dead_ratio = dead_latent_ratio(p, eval, k_eval);
      out.report.log.push_back(e);
    }
  }
  out.report.final_eval_rsct = out.report.log.back().eval_rsct;
  out.report.final_dead_ratio = out.report.log.back().dead_ratio;
  return out;
}

SaeTrainResult train_sae(const EmbeddingCorpus& corpus,
                         const SaeTrainConfig& cfg) {
  if (corpus.empty()) throw EmptyInputError("train_sae: empty corpus");
  auto tokens = corpus.flatten_tokens();
  std::optional<InputNormalizer> norm;
  if (cfg.normalize_inputs) {
    norm = fit_normalizer(corpus, cfg.normalizer_sample, cfg.seed);
    for (auto& t : tokens) t = norm->apply(t);
  }
  auto out = train_sae(tokens, cfg);
  out.normalizer = std::move(norm);
  return out;
}

}  // namespace saesplade
