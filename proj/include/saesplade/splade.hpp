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
#include <vector>

#include "saesplade/core.hpp"
#include "saesplade/embed.hpp"
#include "saesplade/optim.hpp"
#include "saesplade/retrieval_types.hpp"
#include "saesplade/sae.hpp"

namespace saesplade {

// SPLADE-max pooling of per-token activations (rows of length M, already
// relu'd and masked): w_j = max_i log(1 + Z_ij), zero weights dropped.
SparseVector splade_pool(std::span<const DenseVector> activations);

// Encodes each token with the SAE encoder (top-k_splade when given), pools,
// and, with a normalizer, rescales the pooled weights by its sigma.
SparseVector encode_text(const SaeParams& p, const TokenEmbeddingSequence& seq,
                         std::optional<size_t> k_splade,
                         const InputNormalizer* normalizer = nullptr);

std::vector<SparseVector> encode_corpus(const SaeParams& p,
                                        const EmbeddingCorpus& corpus,
                                        std::optional<size_t> k_splade,
                                        const InputNormalizer* normalizer = nullptr);

// sum_j (batch mean of w_j)^2.
double flops_reg(std::span<const SparseVector> batch);

// Mean over groups of KL(softmax(teacher) || softmax(student)).
double kl_loss(std::span<const std::vector<double>> student,
               std::span<const std::vector<double>> teacher);

// Groups are [pos, neg...]; mean over (group, negative) pairs of the
// squared difference between student and teacher margins.
double margin_mse_loss(std::span<const std::vector<double>> student,
                       std::span<const std::vector<double>> teacher);

struct IrTrainConfig {
  double lambda_kl = 1.0;
  double lambda_mse = 0.05;
  double lambda_flops_d = 0.04;
  double lambda_flops_q = 0.06;
  // nullopt: no per-token mask (k_SPLADE = M).
  std::optional<size_t> k_splade = 8;
  AdamConfig adam{2e-5};
  size_t steps = 1000;
  uint64_t seed = 0;
  size_t batch_queries = 32;
  size_t negatives_per_query = 8;
  bool normalize_inputs = false;
  size_t log_every = 100;
  // Triples held out for the logged QD-FLOPs / nnz estimates.
  size_t eval_triples = 64;
};

void validate(const IrTrainConfig& cfg);

// One query with its candidates (positive first). Non-owning.
struct DistillExample {
  const TokenEmbeddingSequence* query = nullptr;
  std::vector<const TokenEmbeddingSequence*> candidates;
  std::vector<double> teacher_scores;
};

using DistillBatch = std::vector<DistillExample>;

struct IrLossReport {
  double total = 0.0;
  double kl = 0.0;
  double mse = 0.0;
  double flops_d = 0.0;
  double flops_q = 0.0;
};

IrLossReport ir_loss(const SaeParams& p, const DistillBatch& batch,
                     const IrTrainConfig& cfg,
                     const InputNormalizer* normalizer = nullptr);

// The decoder is not used once the SAE becomes a retrieval head, so only
// encoder gradients exist.
struct EncoderGrads {
  std::vector<double> w_enc;
  std::vector<double> b_enc;
};

// Analytic gradient of ir_loss. Top-k masks are fixed per forward pass and
// max-pooling routes each latent's gradient to its arg-max token (lowest
// index on ties).
EncoderGrads ir_grad(const SaeParams& p, const DistillBatch& batch,
                     const IrTrainConfig& cfg,
                     const InputNormalizer* normalizer = nullptr,
                     IrLossReport* report = nullptr);

// Resolves triples against query/document corpora. Throws NotFoundError for
// unknown ids and keeps at most `max_negatives` negatives per triple.
DistillExample make_example(const Triple& t, const EmbeddingCorpus& queries,
                            const EmbeddingCorpus& docs, size_t max_negatives);

struct FinetuneLogEntry {
  size_t step = 0;
  IrLossReport train;
  double mean_query_nnz = 0.0;
  double mean_doc_nnz = 0.0;
  double qd_flops = 0.0;
};

struct FinetuneReport {
  std::vector<FinetuneLogEntry> log;
};

struct FinetuneResult {
  SaeParams params;
  FinetuneReport report;
};

// ir_grad -> adam over (W_enc, b_enc) per step; the decoder is carried
// through untouched.
FinetuneResult finetune(const SaeParams& init, const EmbeddingCorpus& queries,
                        const EmbeddingCorpus& docs,
                        std::span<const Triple> triples,
                        const IrTrainConfig& cfg,
                        const InputNormalizer* normalizer = nullptr);

}  // namespace saesplade
