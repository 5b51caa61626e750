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

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace saesplade {

// One distillation example: a query, its positive, hard negatives and the
// teacher's score for each candidate.
struct Triple {
  std::string query_id;
  std::string pos_id;
  std::vector<std::string> neg_ids;
  // Aligned with [pos, neg...].
  std::vector<double> teacher_scores;

  friend bool operator==(const Triple&, const Triple&) = default;
};

// query_id -> doc_id -> relevance grade (>= 0).
using Qrels = std::map<std::string, std::unordered_map<std::string, int>>;

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

// query_id -> ranked list, best first.
using Run = std::map<std::string, std::vector<ScoredDoc>>;

}  // namespace saesplade
