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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saesplade/core.hpp"
#include "saesplade/embed.hpp"
#include "saesplade/optim.hpp"

namespace saesplade {

// The semantic vocabulary: an M-latent sparse autoencoder over d-dim
// token embeddings. The encoder is stored row-major (row j = latent j);
// the decoder stores each latent's direction (a column of W_dec)
// contiguously.
struct SaeParams {
  size_t dim = 0;
  size_t latents = 0;
  std::vector<double> w_enc;
  std::vector<double> b_enc;
  std::vector<double> w_dec;
  std::vector<double> b_dec;

  SaeParams() = default;
  SaeParams(size_t d, size_t m)
      : dim(d),
        latents(m),
        w_enc(d * m, 0.0),
        b_enc(m, 0.0),
        w_dec(d * m, 0.0),
        b_dec(d, 0.0) {}

  std::span<double> enc_row(size_t j) { return {w_enc.data() + j * dim, dim}; }
  std::span<const double> enc_row(size_t j) const {
    return {w_enc.data() + j * dim, dim};
  }
  std::span<double> dec_col(size_t j) { return {w_dec.data() + j * dim, dim}; }
  std::span<const double> dec_col(size_t j) const {
    return {w_dec.data() + j * dim, dim};
  }

  // All four blocks, in the order w_enc, b_enc, w_dec, b_dec.
  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;

  friend bool operator==(const SaeParams&, const SaeParams&) = default;
};

// Gradients share the parameter layout.
using SaeGrads = SaeParams;

enum class SaeVariant { kTopK, kHierarchicalTopK, kMatryoshkaTopK, kL1 };

std::string to_string(SaeVariant v);
SaeVariant parse_sae_variant(const std::string& name);

struct SaeTrainConfig {
  SaeVariant variant = SaeVariant::kTopK;
  size_t latents = 64;
  size_t k_sae = 8;
  double alpha_sp = 0.0;
  std::vector<size_t> nested_sizes;
  std::vector<size_t> hierarchy_ks;
  AdamConfig adam{};
  size_t steps = 1000;
  size_t batch_tokens = 256;
  uint64_t seed = 0;
  bool normalize_inputs = false;
  size_t normalizer_sample = 10000;

  // Auxiliary reconstruction through dead latents (top-k variants only).
  // A latent is dead once it has gone `aux_dead_steps` consecutive steps
  // without being selected, and stops being dead as soon as a batch selects
  // it. While any latent is dead, every token adds aux_alpha times the
  // error of reconstructing it from its main support plus its `aux_k`
  // strongest positive dead latents. aux_k = 0 disables the term.
  size_t aux_k = 0;
  double aux_alpha = 1.0 / 32.0;
  size_t aux_dead_steps = 10;

  size_t log_every = 100;
  size_t eval_tokens = 4096;
};

// Throws InvalidArgument when the config cannot drive an M-latent model.
void validate(const SaeTrainConfig& cfg, size_t latents);

struct InputNormalizer {
  DenseVector mean;
  double sigma = 1.0;

  DenseVector apply(std::span<const double> h) const;
  friend bool operator==(const InputNormalizer&,
                         const InputNormalizer&) = default;
};

// mean = element-wise mean; sigma = mean norm of the centred vectors.
InputNormalizer fit_normalizer(std::span<const DenseVector> sample);
// Draws up to `sample_size` tokens uniformly without replacement.
InputNormalizer fit_normalizer(const EmbeddingCorpus& corpus,
                               size_t sample_size, uint64_t seed);

SaeParams sae_init(size_t dim, size_t latents, uint64_t seed);

DenseVector sae_pre_activation(const SaeParams& p, std::span<const double> h);
// relu(W_enc h + b_enc), top-k masked when k is given.
DenseVector sae_encode(const SaeParams& p, std::span<const double> h,
                       std::optional<size_t> k);
DenseVector sae_decode(const SaeParams& p, std::span<const double> z);

struct SaeLossReport {
  double total = 0.0;
  double rsct = 0.0;
  double sparsity = 0.0;
  double aux = 0.0;
};

// `dead` (length M, nonzero = dead) enables the auxiliary term when
// cfg.aux_k > 0.
SaeLossReport sae_loss(const SaeParams& p, std::span<const DenseVector> batch,
                       const SaeTrainConfig& cfg,
                       std::span<const uint8_t> dead = {});

// Analytic gradient of sae_loss with every top-k selection held fixed.
// `fired`, when non-empty, receives 1 for each latent selected by the main
// reconstruction on some token of the batch.
SaeGrads sae_grad(const SaeParams& p, std::span<const DenseVector> batch,
                  const SaeTrainConfig& cfg, std::span<const uint8_t> dead = {},
                  SaeLossReport* report = nullptr,
                  std::span<uint8_t> fired = {});

// Scales each nonzero decoder column to unit norm.
void renormalize_decoder(SaeParams& p);

double dead_latent_ratio(const SaeParams& p, std::span<const DenseVector> sample,
                         std::optional<size_t> k);

struct SaeLogEntry {
  size_t step = 0;
  SaeLossReport train;
  double eval_rsct = 0.0;
  double dead_ratio = 0.0;
};

struct SaeTrainReport {
  std::vector<SaeLogEntry> log;
  double initial_eval_rsct = 0.0;
  double final_eval_rsct = 0.0;
  double final_dead_ratio = 0.0;
  size_t train_tokens = 0;
  size_t eval_tokens = 0;
};

struct SaeTrainResult {
  SaeParams params;
  SaeTrainReport report;
  std::optional<InputNormalizer> normalizer;
};

// sae_grad -> adam -> renormalize_decoder per step. Deterministic per seed.
SaeTrainResult train_sae(const EmbeddingCorpus& corpus,
                         const SaeTrainConfig& cfg);
// Same loop over an explicit token list (already normalized if wanted).
SaeTrainResult train_sae(std::span<const DenseVector> tokens,
                         const SaeTrainConfig& cfg);

}  // namespace saesplade
