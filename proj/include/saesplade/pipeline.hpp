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

#include <optional>
#include <string>
#include <vector>

#include "saesplade/embed.hpp"
#include "saesplade/metrics.hpp"
#include "saesplade/sae.hpp"
#include "saesplade/splade.hpp"

// In-memory train -> encode -> index -> search -> evaluate on the synthetic
// relevance task; also the grid sweep built on it.

namespace saesplade {

struct RetrievalMetrics {
  double mrr_at_10 = 0.0;
  double ndcg_at_10 = 0.0;
  double qd_flops = 0.0;
  double avg_doc_len = 0.0;
  double avg_query_len = 0.0;
  double delta_e2 = 0.0;
};

RetrievalMetrics evaluate_encoder(const SaeParams& p,
                                  std::optional<size_t> k_splade,
                                  const EmbeddingCorpus& queries,
                                  const EmbeddingCorpus& docs,
                                  const Qrels& qrels,
                                  const InputNormalizer* normalizer = nullptr);

struct PipelineConfig {
  RelevanceTaskSpec task;
  SaeTrainConfig sae;
  IrTrainConfig ir;
};

struct PipelineResult {
  RetrievalMetrics before;
  RetrievalMetrics after;
  SaeTrainReport sae_report;
  FinetuneReport finetune_report;
  SaeParams sae_params;
  SaeParams finetuned;
  std::optional<InputNormalizer> normalizer;
};

// The SAE is trained on every document and training-query token.
SaeParams train_task_sae(const RelevanceTask& task, const SaeTrainConfig& cfg,
                         SaeTrainReport* report = nullptr,
                         std::optional<InputNormalizer>* normalizer = nullptr);

PipelineResult run_pipeline(const PipelineConfig& cfg);

struct SweepPoint {
  size_t k_sae = 0;
  std::optional<size_t> k_splade;
  double flops_multiplier = 1.0;
};

struct SweepRow {
  SweepPoint point;
  RetrievalMetrics metrics;
};

// One row per grid point, in grid order. Points sharing k_sae share one
// trained SAE; lambda_flops_d and lambda_flops_q are both scaled by the
// multiplier.
std::vector<SweepRow> run_sweep(const PipelineConfig& base,
                                const std::vector<SweepPoint>& grid);

std::string sweep_csv(const std::vector<SweepRow>& rows);
// Scatter of MRR@10 against QD-FLOPs, one labelled point per row.
std::string sweep_svg(const std::vector<SweepRow>& rows);

}  // namespace saesplade
