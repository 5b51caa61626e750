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

// JSON views of configs and reports, shared by the C API. Config readers
// start from defaults, reject unknown keys and validate types.

#include "json.hpp"
#include "saesplade/analysis.hpp"
#include "saesplade/embed.hpp"
#include "saesplade/index.hpp"
#include "saesplade/metrics.hpp"
#include "saesplade/pipeline.hpp"
#include "saesplade/sae.hpp"
#include "saesplade/splade.hpp"

namespace saesplade::json_io {

using nlohmann::json;

SaeTrainConfig sae_config(const json& j);
json to_json(const SaeTrainConfig& c);

IrTrainConfig ir_config(const json& j);
json to_json(const IrTrainConfig& c);

SyntheticSpec synthetic_spec(const json& j);
json to_json(const SyntheticSpec& s);

RelevanceTaskSpec relevance_spec(const json& j);
json to_json(const RelevanceTaskSpec& s);

ToyEncoderConfig toy_config(const json& j);
json to_json(const ToyEncoderConfig& c);

E2Config e2_config(const json& j);
json to_json(const E2Config& c);

PipelineConfig pipeline_config(const json& j);
json to_json(const PipelineConfig& c);

struct CoocConfig {
  uint32_t min_count = 5;
  double prob_floor = 0.1;
  double confidence = 0.95;
};
CoocConfig cooc_config(const json& j);
json to_json(const CoocConfig& c);

std::vector<SweepPoint> sweep_grid(const json& j);

json to_json(const SaeLossReport& r);
json to_json(const SaeTrainReport& r);
json to_json(const IrLossReport& r);
json to_json(const FinetuneReport& r);
json to_json(const RetrievalMetrics& m);
json to_json(const IndexStats& s);
json to_json(const PairLabel& p);
json to_json(const OverlapStats& s);
json to_json(const SweepRow& r);
// Table sizes only.
json to_json(const CooccurrenceStats& s);

// Parses text as a JSON object; empty text is {}.
json parse_object(const char* text);

}  // namespace saesplade::json_io
