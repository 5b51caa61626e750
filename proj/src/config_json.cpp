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

#include "config_json.hpp"

#include <set>

#include "saesplade/error.hpp"

namespace saesplade::json_io {

namespace {

// Reads fields out of an object and complains about anything left over.
class Reader {
 public:
  Reader(const json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j_.is_object()) throw InvalidArgument(what_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, size_t> || std::is_same_v<T, uint64_t>) {
        if (!it->is_number_unsigned() &&
            !(it->is_number_integer() && it->template get<int64_t>() >= 0)) {
          throw InvalidArgument("");
        }
      }
      if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw InvalidArgument("");
      }
      out = it->template get<T>();
    } catch (const std::exception&) {
      throw InvalidArgument(what_ + ": field '" + key + "' has the wrong type");
    }
  }

  void get_optional_count(const char* key, std::optional<size_t>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    size_t v = 0;
    get(key, v);
    out = v;
  }

  template <typename F>
  void nested(const char* key, F&& f) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it != j_.end()) f(*it);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw InvalidArgument(what_ + ": unknown field '" + it.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string what_;
  std::set<std::string> seen_;
};

AdamConfig adam_config(const json& j, AdamConfig c) {
  Reader r(j, "adam");
  r.get("lr", c.lr);
  r.get("beta1", c.beta1);
  r.get("beta2", c.beta2);
  r.get("eps", c.eps);
  r.finish();
  return c;
}

json to_json(const AdamConfig& c) {
  return {{"lr", c.lr}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"eps", c.eps}};
}

json optional_count(const std::optional<size_t>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json parse_object(const char* text) {
  if (!text || !*text) return json::object();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  return j;
}

SaeTrainConfig sae_config(const json& j) {
  SaeTrainConfig c;
  Reader r(j, "sae config");
  std::string variant = to_string(c.variant);
  r.get("variant", variant);
  c.variant = parse_sae_variant(variant);
  r.get("latents", c.latents);
  r.get("k_sae", c.k_sae);
  r.get("alpha_sp", c.alpha_sp);
  r.get("nested_sizes", c.nested_sizes);
  r.get("hierarchy_ks", c.hierarchy_ks);
  r.nested("adam", [&](const json& a) { c.adam = adam_config(a, c.adam); });
  r.get("steps", c.steps);
  r.get("batch_tokens", c.batch_tokens);
  r.get("seed", c.seed);
  r.get("normalize_inputs", c.normalize_inputs);
  r.get("normalizer_sample", c.normalizer_sample);
  r.get("aux_k", c.aux_k);
  r.get("aux_alpha", c.aux_alpha);
  r.get("aux_dead_steps", c.aux_dead_steps);
  r.get("log_every", c.log_every);
  r.get("eval_tokens", c.eval_tokens);
  r.finish();
  validate(c, c.latents);
  return c;
}

json to_json(const SaeTrainConfig& c) {
  return {{"variant", to_string(c.variant)},
          {"latents", c.latents},
          {"k_sae", c.k_sae},
          {"alpha_sp", c.alpha_sp},
          {"nested_sizes", c.nested_sizes},
          {"hierarchy_ks", c.hierarchy_ks},
          {"adam", to_json(c.adam)},
          {"steps", c.steps},
          {"batch_tokens", c.batch_tokens},
          {"seed", c.seed},
          {"normalize_inputs", c.normalize_inputs},
          {"normalizer_sample", c.normalizer_sample},
          {"aux_k", c.aux_k},
          {"aux_alpha", c.aux_alpha},
          {"aux_dead_steps", c.aux_dead_steps},
          {"log_every", c.log_every},
          {"eval_tokens", c.eval_tokens}};
}

IrTrainConfig ir_config(const json& j) {
  IrTrainConfig c;
  Reader r(j, "finetune config");
  r.get("lambda_kl", c.lambda_kl);
  r.get("lambda_mse", c.lambda_mse);
  r.get("lambda_flops_d", c.lambda_flops_d);
  r.get("lambda_flops_q", c.lambda_flops_q);
  r.get_optional_count("k_splade", c.k_splade);
  r.nested("adam", [&](const json& a) { c.adam = adam_config(a, c.adam); });
  r.get("steps", c.steps);
  r.get("seed", c.seed);
  r.get("batch_queries", c.batch_queries);
  r.get("negatives_per_query", c.negatives_per_query);
  r.get("normalize_inputs", c.normalize_inputs);
  r.get("log_every", c.log_every);
  r.get("eval_triples", c.eval_triples);
  r.finish();
  validate(c);
  return c;
}

json to_json(const IrTrainConfig& c) {
  return {{"lambda_kl", c.lambda_kl},
          {"lambda_mse", c.lambda_mse},
          {"lambda_flops_d", c.lambda_flops_d},
          {"lambda_flops_q", c.lambda_flops_q},
          {"k_splade", optional_count(c.k_splade)},
          {"adam", to_json(c.adam)},
          {"steps", c.steps},
          {"seed", c.seed},
          {"batch_queries", c.batch_queries},
          {"negatives_per_query", c.negatives_per_query},
          {"normalize_inputs", c.normalize_inputs},
          {"log_every", c.log_every},
          {"eval_triples", c.eval_triples}};
}

SyntheticSpec synthetic_spec(const json& j) {
  SyntheticSpec s;
  Reader r(j, "synthetic spec");
  r.get("dim", s.dim);
  r.get("concepts", s.concepts);
  r.get("active_per_token", s.active_per_token);
  r.get("noise_sigma", s.noise_sigma);
  r.get("docs", s.docs);
  r.get("tokens_per_doc", s.tokens_per_doc);
  r.get("seed", s.seed);
  r.finish();
  return s;
}

json to_json(const SyntheticSpec& s) {
  return {{"dim", s.dim},       {"concepts", s.concepts},
          {"active_per_token", s.active_per_token},
          {"noise_sigma", s.noise_sigma},
          {"docs", s.docs},     {"tokens_per_doc", s.tokens_per_doc},
          {"seed", s.seed}};
}

RelevanceTaskSpec relevance_spec(const json& j) {
  RelevanceTaskSpec s;
  Reader r(j, "relevance task spec");
  r.get("dim", s.dim);
  r.get("topics", s.topics);
  r.get("topics_per_doc", s.topics_per_doc);
  r.get("tokens_per_topic", s.tokens_per_topic);
  r.get("query_tokens_per_topic", s.query_tokens_per_topic);
  r.get("docs", s.docs);
  r.get("train_queries", s.train_queries);
  r.get("test_queries", s.test_queries);
  r.get("negatives", s.negatives);
  r.get("query_variant_rate", s.query_variant_rate);
  r.get("noise_sigma", s.noise_sigma);
  r.get("seed", s.seed);
  r.finish();
  return s;
}

json to_json(const RelevanceTaskSpec& s) {
  return {{"dim", s.dim},
          {"topics", s.topics},
          {"topics_per_doc", s.topics_per_doc},
          {"tokens_per_topic", s.tokens_per_topic},
          {"query_tokens_per_topic", s.query_tokens_per_topic},
          {"docs", s.docs},
          {"train_queries", s.train_queries},
          {"test_queries", s.test_queries},
          {"negatives", s.negatives},
          {"query_variant_rate", s.query_variant_rate},
          {"noise_sigma", s.noise_sigma},
          {"seed", s.seed}};
}

ToyEncoderConfig toy_config(const json& j) {
  ToyEncoderConfig c;
  Reader r(j, "toy encoder config");
  r.get("dim", c.dim);
  r.get("window", c.window);
  r.get("seed", c.seed);
  r.finish();
  return c;
}

json to_json(const ToyEncoderConfig& c) {
  return {{"dim", c.dim}, {"window", c.window}, {"seed", c.seed}};
}

E2Config e2_config(const json& j) {
  E2Config c;
  Reader r(j, "e2 config");
  r.get("mu1", c.mu1);
  r.get("mu2", c.mu2);
  r.get("tau", c.tau);
  r.get("beta", c.beta);
  r.finish();
  if (!(c.beta > 0.0)) throw InvalidArgument("e2 config: beta must be > 0");
  return c;
}

json to_json(const E2Config& c) {
  return {{"mu1", c.mu1}, {"mu2", c.mu2}, {"tau", c.tau}, {"beta", c.beta}};
}

PipelineConfig pipeline_config(const json& j) {
  PipelineConfig c;
  Reader r(j, "pipeline config");
  r.nested("task", [&](const json& t) { c.task = relevance_spec(t); });
  r.nested("sae", [&](const json& s) { c.sae = sae_config(s); });
  r.nested("ir", [&](const json& s) { c.ir = ir_config(s); });
  r.finish();
  return c;
}

json to_json(const PipelineConfig& c) {
  return {{"task", to_json(c.task)}, {"sae", to_json(c.sae)}, {"ir", to_json(c.ir)}};
}

std::vector<SweepPoint> sweep_grid(const json& j) {
  if (!j.is_array()) throw InvalidArgument("sweep grid must be a JSON array");
  std::vector<SweepPoint> out;
  for (const auto& item : j) {
    SweepPoint p;
    Reader r(item, "sweep point");
    r.get("k_sae", p.k_sae);
    r.get_optional_count("k_splade", p.k_splade);
    r.get("flops_multiplier", p.flops_multiplier);
    r.finish();
    if (p.k_sae == 0) throw InvalidArgument("sweep point: k_sae must be > 0");
    out.push_back(p);
  }
  return out;
}

CoocConfig cooc_config(const json& j) {
  CoocConfig c;
  Reader r(j, "cooccurrence config");
  size_t min_count = c.min_count;
  r.get("min_count", min_count);
  r.get("prob_floor", c.prob_floor);
  r.get("confidence", c.confidence);
  r.finish();
  if (min_count > UINT32_MAX) throw InvalidArgument("min_count is too large");
  c.min_count = static_cast<uint32_t>(min_count);
  if (!(c.prob_floor >= 0.0 && c.prob_floor <= 1.0)) {
    throw InvalidArgument("prob_floor must be in [0, 1]");
  }
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) {
    throw InvalidArgument("confidence must be in (0, 1)");
  }
  return c;
}

json to_json(const CoocConfig& c) {
  return {{"min_count", c.min_count},
          {"prob_floor", c.prob_floor},
          {"confidence", c.confidence}};
}

json to_json(const CooccurrenceStats& s) {
  return {{"total_docs", s.total_docs},
          {"tokens", s.token_counts.size()},
          {"latents", s.latent_counts.size()},
          {"joint_pairs", s.joint_counts.size()}};
}

json to_json(const SaeLossReport& r) {
  return {{"total", r.total}, {"rsct", r.rsct}, {"sparsity", r.sparsity}, {"aux", r.aux}};
}

json to_json(const SaeTrainReport& r) {
  json log = json::array();
  for (const auto& e : r.log) {
    log.push_back({{"step", e.step},
                   {"train", to_json(e.train)},
                   {"eval_rsct", e.eval_rsct},
                   {"dead_ratio", e.dead_ratio}});
  }
  return {{"log", log},
          {"initial_eval_rsct", r.initial_eval_rsct},
          {"final_eval_rsct", r.final_eval_rsct},
          {"final_dead_ratio", r.final_dead_ratio},
          {"train_tokens", r.train_tokens},
          {"eval_tokens", r.eval_tokens}};
}

json to_json(const IrLossReport& r) {
  return {{"total", r.total}, {"kl", r.kl}, {"mse", r.mse},
          {"flops_d", r.flops_d}, {"flops_q", r.flops_q}};
}

json to_json(const FinetuneReport& r) {
  json log = json::array();
  for (const auto& e : r.log) {
    log.push_back({{"step", e.step},
                   {"train", to_json(e.train)},
                   {"mean_query_nnz", e.mean_query_nnz},
                   {"mean_doc_nnz", e.mean_doc_nnz},
                   {"qd_flops", e.qd_flops}});
  }
  return {{"log", log}};
}

json to_json(const RetrievalMetrics& m) {
  return {{"mrr_at_10", m.mrr_at_10},     {"ndcg_at_10", m.ndcg_at_10},
          {"qd_flops", m.qd_flops},       {"avg_doc_len", m.avg_doc_len},
          {"avg_query_len", m.avg_query_len}, {"delta_e2", m.delta_e2}};
}

json to_json(const IndexStats& s) {
  return {{"avg_doc_len", s.avg_doc_len},
          {"total_postings", s.total_postings},
          {"nonempty_lists", s.nonempty_lists},
          {"num_docs", s.num_docs}};
}

json to_json(const PairLabel& p) {
  return {{"token", p.token},
          {"latent", p.latent},
          {"p_l_given_t", p.p_l_given_t},
          {"p_t_given_l", p.p_t_given_l},
          {"label", to_string(p.label)},
          {"p_value_lt", p.p_value_lt},
          {"p_value_tl", p.p_value_tl}};
}

json to_json(const OverlapStats& s) {
  return {{"mean_overlap", s.mean_overlap}, {"std_overlap", s.std_overlap},
          {"mean_doc_len", s.mean_doc_len}, {"std_doc_len", s.std_doc_len},
          {"documents", s.documents}};
}

json to_json(const SweepRow& r) {
  return {{"k_sae", r.point.k_sae},
          {"k_splade", optional_count(r.point.k_splade)},
          {"flops_multiplier", r.point.flops_multiplier},
          {"metrics", to_json(r.metrics)}};
}

}  // namespace saesplade::json_io
