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


#include "saesplade/saesplade.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <new>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "config_json.hpp"
#include "saesplade/analysis.hpp"
#include "saesplade/embed.hpp"
#include "saesplade/error.hpp"
#include "saesplade/formats.hpp"
#include "saesplade/hash.hpp"
#include "saesplade/index.hpp"
#include "saesplade/metrics.hpp"
#include "saesplade/pipeline.hpp"
#include "saesplade/sae.hpp"
#include "saesplade/splade.hpp"

#ifndef SAESPLADE_VERSION
#define SAESPLADE_VERSION "0.0.0"
#endif

using namespace saesplade;
using json_io::json;

struct ssp_corpus {
  EmbeddingCorpus v;
};
struct ssp_params {
  SaeParams v;
};
struct ssp_normalizer {
  InputNormalizer v;
};
struct ssp_sparse {
  SparseCollection v;
};
struct ssp_index {
  InvertedIndex v;
};
struct ssp_triples {
  std::vector<Triple> v;
};
struct ssp_run {
  Run v;
};
struct ssp_qrels {
  Qrels v;
};

namespace {

thread_local std::string g_last_error;

ssp_status fail(ssp_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs f, turning exceptions into a status and a message.
template <typename F>
ssp_status guard(F&& f) noexcept {
  try {
    f();
    return SSP_OK;
  } catch (const Error& e) {
    return fail(static_cast<ssp_status>(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(SSP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SSP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SSP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SSP_ERR_INTERNAL, "unknown error");
  }
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " is NULL");
  return *p;
}

void need_out(const void* out, const char* what) {
  if (!out) throw InvalidArgument(std::string(what) + " is NULL");
}

std::string need_str(const char* s, const char* what) {
  if (!s) throw InvalidArgument(std::string(what) + " is NULL");
  return s;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void emit(char** out, const json& j) {
  if (out) *out = dup_string(j.dump());
}

template <typename H, typename V>
H* wrap(V&& v) {
  return new H{std::forward<V>(v)};
}

SparseCollection to_collection(const EmbeddingCorpus& c,
                               std::vector<SparseVector> vecs, uint32_t vocab) {
  SparseCollection out;
  out.vocab_size = vocab;
  out.records.reserve(vecs.size());
  for (size_t i = 0; i < vecs.size(); ++i) {
    out.records.push_back({c[i].doc_id(), std::move(vecs[i])});
  }
  return out;
}

uint32_t vocab_of(const SaeParams& p) {
  if (p.latents > UINT32_MAX) throw DimensionError("too many latents");
  return static_cast<uint32_t>(p.latents);
}

std::optional<size_t> mask_k(size_t k) {
  return k == 0 ? std::nullopt : std::optional<size_t>(k);
}

json resolve(const std::string& kind, const json& j) {
  if (kind == "sae") return json_io::to_json(json_io::sae_config(j));
  if (kind == "finetune") return json_io::to_json(json_io::ir_config(j));
  if (kind == "synthetic") return json_io::to_json(json_io::synthetic_spec(j));
  if (kind == "relevance") return json_io::to_json(json_io::relevance_spec(j));
  if (kind == "toy") return json_io::to_json(json_io::toy_config(j));
  if (kind == "e2") return json_io::to_json(json_io::e2_config(j));
  if (kind == "pipeline") return json_io::to_json(json_io::pipeline_config(j));
  if (kind == "cooccurrence") return json_io::to_json(json_io::cooc_config(j));
  throw InvalidArgument("unknown config kind '" + kind + "'");
}

json truth_json(const GroundTruth& t) {
  return {{"atoms", t.atoms}, {"active_sets", t.active_sets}};
}

}  // namespace

extern "C" {

const char* ssp_last_error(void) { return g_last_error.c_str(); }

const char* ssp_version(void) { return SAESPLADE_VERSION; }

const char* ssp_status_name(ssp_status s) {
  switch (s) {
    case SSP_OK: return "ok";
    case SSP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SSP_ERR_DIMENSION: return "dimension";
    case SSP_ERR_FORMAT: return "format";
    case SSP_ERR_IO: return "io";
    case SSP_ERR_EMPTY_INPUT: return "empty_input";
    case SSP_ERR_NOT_FOUND: return "not_found";
    case SSP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void ssp_string_free(char* s) { std::free(s); }

ssp_status ssp_hash_file(const char* path, uint64_t* out) {
  return guard([&] {
    need_out(out, "out");
    *out = fnv1a64(read_file(need_str(path, "path")));
  });
}

uint64_t ssp_hash_string(const char* s) { return fnv1a64(s ? s : ""); }

ssp_status ssp_config_resolve(const char* kind, const char* config_json,
                              char** out_json) {
  return guard([&] {
    need_out(out_json, "out_json");
    emit(out_json, resolve(need_str(kind, "kind"),
                           json_io::parse_object(config_json)));
  });
}

/* ---- embeddings ---- */

ssp_status ssp_corpus_load(const char* path, ssp_corpus** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_corpus>(load_embeddings(need_str(path, "path")));
  });
}

ssp_status ssp_corpus_save(const ssp_corpus* c, const char* path) {
  return guard([&] { save_embeddings(need(c, "corpus").v, need_str(path, "path")); });
}

void ssp_corpus_free(ssp_corpus* c) { delete c; }
size_t ssp_corpus_size(const ssp_corpus* c) { return c ? c->v.size() : 0; }
size_t ssp_corpus_dim(const ssp_corpus* c) { return c ? c->v.dim() : 0; }
size_t ssp_corpus_token_count(const ssp_corpus* c) {
  return c ? c->v.token_count() : 0;
}

ssp_status ssp_corpus_create(size_t dim, ssp_corpus** out) {
  return guard([&] {
    need_out(out, "out");
    if (dim == 0) throw DimensionError("corpus dim must be > 0");
    *out = wrap<ssp_corpus>(EmbeddingCorpus(dim));
  });
}

ssp_status ssp_corpus_add(ssp_corpus* c, const char* doc_id, size_t n_tokens,
                          const double* values, const uint32_t* token_ids) {
  return guard([&] {
    if (!c) throw InvalidArgument("corpus is NULL");
    if (n_tokens > 0 && !values) throw InvalidArgument("values is NULL");
    const size_t dim = c->v.dim();
    std::vector<double> vals(values, values + n_tokens * dim);
    std::optional<std::vector<uint32_t>> ids;
    if (token_ids) ids.emplace(token_ids, token_ids + n_tokens);
    c->v.add(TokenEmbeddingSequence(need_str(doc_id, "doc_id"), dim,
                                    std::move(vals), std::move(ids)));
  });
}

ssp_status ssp_corpus_append(ssp_corpus* dst, const ssp_corpus* src) {
  return guard([&] {
    if (!dst) throw InvalidArgument("dst is NULL");
    const auto& from = need(src, "src").v;
    if (from.dim() != dst->v.dim()) {
      throw DimensionError("corpus dims differ: " + std::to_string(dst->v.dim()) +
                           " vs " + std::to_string(from.dim()));
    }
    // Build aside so a duplicate id leaves dst unchanged.
    EmbeddingCorpus merged = dst->v;
    for (const auto& item : from.items()) merged.add(item);
    dst->v = std::move(merged);
  });
}

ssp_status ssp_toy_embed_file(const char* jsonl_path, const char* config_json,
                              const char* vocab_path, ssp_corpus** out) {
  return guard([&] {
    need_out(out, "out");
    const auto cfg = json_io::toy_config(json_io::parse_object(config_json));
    const auto texts = load_text_corpus(need_str(jsonl_path, "jsonl_path"));
    if (texts.empty()) throw EmptyInputError(std::string(jsonl_path) + ": no documents");
    EmbeddingCorpus corpus(cfg.dim);
    std::map<uint32_t, std::string> vocab;
    for (const auto& [id, text] : texts) {
      corpus.add(toy_encode(id, text, cfg));
      if (vocab_path) {
        for (const auto& t : toy_terms(text)) {
          auto [it, fresh] = vocab.emplace(toy_term_id(t), t);
          if (!fresh && it->second != t && t < it->second) it->second = t;
        }
      }
    }
    if (vocab_path) {
      json v = json::object();
      for (const auto& [id, t] : vocab) v[std::to_string(id)] = t;
      write_file_atomic(vocab_path, v.dump(1) + "\n");
    }
    *out = wrap<ssp_corpus>(std::move(corpus));
  });
}

ssp_status ssp_generate_synthetic(const char* spec_json, ssp_corpus** out,
                                  char** truth) {
  return guard([&] {
    need_out(out, "out");
    auto data = generate_synthetic(json_io::synthetic_spec(json_io::parse_object(spec_json)));
    const json t = truth ? truth_json(data.truth) : json();
    auto* h = wrap<ssp_corpus>(std::move(data.corpus));
    try {
      if (truth) emit(truth, t);
    } catch (...) {
      delete h;
      throw;
    }
    *out = h;
  });
}

ssp_status ssp_generate_relevance_task(const char* spec_json, const char* dir) {
  return guard([&] {
    const std::string d = need_str(dir, "dir") + "/";
    const auto task =
        generate_relevance_task(json_io::relevance_spec(json_io::parse_object(spec_json)));
    save_embeddings(task.docs, d + "docs.emb");
    save_embeddings(task.train_queries, d + "train_queries.emb");
    save_embeddings(task.test_queries, d + "test_queries.emb");
    save_triples(task.train_triples, d + "train.triples.jsonl");
    save_qrels(task.train_qrels, d + "train.qrels");
    save_qrels(task.test_qrels, d + "test.qrels");
  });
}

/* ---- SAE ---- */

ssp_status ssp_params_load(const char* path, ssp_params** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_params>(load_params(need_str(path, "path")));
  });
}

ssp_status ssp_params_save(const ssp_params* p, const char* path) {
  return guard([&] { save_params(need(p, "params").v, need_str(path, "path")); });
}

void ssp_params_free(ssp_params* p) { delete p; }
size_t ssp_params_dim(const ssp_params* p) { return p ? p->v.dim : 0; }
size_t ssp_params_latents(const ssp_params* p) { return p ? p->v.latents : 0; }

ssp_status ssp_sae_train(const ssp_corpus* c, const char* config_json,
                         ssp_params** out, ssp_normalizer** out_norm,
                         char** report_json) {
  return guard([&] {
    need_out(out, "out");
    const auto cfg = json_io::sae_config(json_io::parse_object(config_json));
    auto res = train_sae(need(c, "corpus").v, cfg);
    const json report = report_json ? json_io::to_json(res.report) : json();
    auto params = std::make_unique<ssp_params>(ssp_params{std::move(res.params)});
    std::unique_ptr<ssp_normalizer> norm;
    if (out_norm && res.normalizer) {
      norm = std::make_unique<ssp_normalizer>(ssp_normalizer{*res.normalizer});
    }
    if (report_json) emit(report_json, report);
    *out = params.release();
    if (out_norm) *out_norm = norm.release();
  });
}

ssp_status ssp_sae_atom_recovery(const ssp_params* p, const char* atoms_json,
                                 double threshold, double* out_fraction) {
  return guard([&] {
    need_out(out_fraction, "out_fraction");
    json j;
    try {
      j = json::parse(need_str(atoms_json, "atoms_json"));
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("atoms are not valid JSON: ") + e.what());
    }
    const auto atoms = j.get<std::vector<DenseVector>>();
    *out_fraction = atom_recovery(need(p, "params").v, atoms, threshold);
  });
}

ssp_status ssp_normalizer_load(const char* path, ssp_normalizer** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_normalizer>(load_normalizer(need_str(path, "path")));
  });
}

ssp_status ssp_normalizer_save(const ssp_normalizer* n, const char* path) {
  return guard([&] { save_normalizer(need(n, "normalizer").v, need_str(path, "path")); });
}

void ssp_normalizer_free(ssp_normalizer* n) { delete n; }

/* ---- sparse encoding ---- */

ssp_status ssp_encode(const ssp_params* p, const ssp_corpus* c, size_t k_splade,
                      const ssp_normalizer* norm, ssp_sparse** out) {
  return guard([&] {
    need_out(out, "out");
    const auto& params = need(p, "params").v;
    const auto& corpus = need(c, "corpus").v;
    auto vecs = encode_corpus(params, corpus, mask_k(k_splade),
                              norm ? &norm->v : nullptr);
    *out = wrap<ssp_sparse>(to_collection(corpus, std::move(vecs), vocab_of(params)));
  });
}

ssp_status ssp_sparse_load(const char* path, ssp_sparse** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_sparse>(load_sparse(need_str(path, "path")));
  });
}

ssp_status ssp_sparse_save(const ssp_sparse* s, const char* path) {
  return guard([&] { save_sparse(need(s, "sparse").v, need_str(path, "path")); });
}

void ssp_sparse_free(ssp_sparse* s) { delete s; }
size_t ssp_sparse_size(const ssp_sparse* s) { return s ? s->v.records.size() : 0; }
uint32_t ssp_sparse_vocab(const ssp_sparse* s) { return s ? s->v.vocab_size : 0; }

double ssp_sparse_mean_nnz(const ssp_sparse* s) {
  if (!s || s->v.records.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : s->v.records) total += static_cast<double>(r.vector.nnz());
  return total / static_cast<double>(s->v.records.size());
}

/* ---- fine-tuning ---- */

ssp_status ssp_triples_load(const char* path, ssp_triples** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_triples>(load_triples(need_str(path, "path")));
  });
}

void ssp_triples_free(ssp_triples* t) { delete t; }
size_t ssp_triples_size(const ssp_triples* t) { return t ? t->v.size() : 0; }

ssp_status ssp_finetune(const ssp_params* init, const ssp_corpus* queries,
                        const ssp_corpus* docs, const ssp_triples* triples,
                        const char* config_json, const ssp_normalizer* norm,
                        ssp_params** out, char** report_json) {
  return guard([&] {
    need_out(out, "out");
    const auto cfg = json_io::ir_config(json_io::parse_object(config_json));
    if (cfg.normalize_inputs && !norm) {
      throw InvalidArgument("normalize_inputs is set but no normalizer was given");
    }
    auto res = finetune(need(init, "params").v, need(queries, "queries").v,
                        need(docs, "docs").v, need(triples, "triples").v, cfg,
                        cfg.normalize_inputs ? &norm->v : nullptr);
    const json report = report_json ? json_io::to_json(res.report) : json();
    auto params = std::make_unique<ssp_params>(ssp_params{std::move(res.params)});
    if (report_json) emit(report_json, report);
    *out = params.release();
  });
}

/* ---- index and search ---- */

ssp_status ssp_index_build(const ssp_sparse* docs, ssp_index** out) {
  return guard([&] {
    need_out(out, "out");
    const auto& c = need(docs, "docs").v;
    const auto ids = c.ids();
    const auto vecs = c.vectors();
    *out = wrap<ssp_index>(build_index(ids, vecs, c.vocab_size));
  });
}

ssp_status ssp_index_load(const char* path, ssp_index** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_index>(load_index(need_str(path, "path")));
  });
}

ssp_status ssp_index_save(const ssp_index* ix, const char* path) {
  return guard([&] { save_index(need(ix, "index").v, need_str(path, "path")); });
}

void ssp_index_free(ssp_index* ix) { delete ix; }

ssp_status ssp_index_stats(const ssp_index* ix, char** stats_json) {
  return guard([&] {
    need_out(stats_json, "stats_json");
    const auto& index = need(ix, "index").v;
    json j = json_io::to_json(index.stats());
    j["vocab_size"] = index.vocab_size();
    emit(stats_json, j);
  });
}

ssp_status ssp_search(const ssp_index* ix, const ssp_sparse* queries,
                      size_t cutoff, ssp_run** out) {
  return guard([&] {
    need_out(out, "out");
    const auto& q = need(queries, "queries").v;
    const auto ids = q.ids();
    const auto vecs = q.vectors();
    *out = wrap<ssp_run>(search_all(need(ix, "index").v, ids, vecs, cutoff));
  });
}

/* ---- evaluation ---- */

ssp_status ssp_run_load(const char* path, ssp_run** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_run>(load_run(need_str(path, "path")));
  });
}

ssp_status ssp_run_save(const ssp_run* r, const char* path, const char* tag) {
  return guard([&] {
    save_run(need(r, "run").v, need_str(path, "path"), tag ? tag : "saesplade");
  });
}

void ssp_run_free(ssp_run* r) { delete r; }

ssp_status ssp_qrels_load(const char* path, ssp_qrels** out) {
  return guard([&] {
    need_out(out, "out");
    *out = wrap<ssp_qrels>(load_qrels(need_str(path, "path")));
  });
}

void ssp_qrels_free(ssp_qrels* q) { delete q; }

ssp_status ssp_evaluate(const ssp_run* r, const ssp_qrels* q, size_t k,
                        char** metrics_json) {
  return guard([&] {
    need_out(metrics_json, "metrics_json");
    if (k == 0) throw InvalidArgument("evaluation cutoff must be > 0");
    const auto& run = need(r, "run").v;
    const auto& qrels = need(q, "qrels").v;
    if (qrels.empty()) throw EmptyInputError("qrels are empty");
    emit(metrics_json, {{"mrr_at_k", mrr_at_k(run, qrels, k)},
                        {"ndcg_at_k", ndcg_at_k(run, qrels, k)},
                        {"success_at_5", success_at_k(run, qrels, 5)},
                        {"queries", qrels.size()},
                        {"k", k}});
  });
}

ssp_status ssp_qd_flops(const ssp_sparse* queries, const ssp_sparse* docs,
                        size_t max_docs, uint64_t seed, double* out) {
  return guard([&] {
    need_out(out, "out");
    const auto q = need(queries, "queries").v.vectors();
    const auto d = need(docs, "docs").v.vectors();
    *out = max_docs == 0 || max_docs >= d.size() ? qd_flops(q, d)
                                                 : qd_flops_sampled(q, d, max_docs, seed);
  });
}

ssp_status ssp_e2(double mrr, double qdflops, const char* config_json, double* out) {
  return guard([&] {
    need_out(out, "out");
    *out = e2_score(mrr, qdflops, json_io::e2_config(json_io::parse_object(config_json)));
  });
}

ssp_status ssp_delta_e2(double mrr, double qdflops, double baseline_mrr,
                        double baseline_qdflops, const char* config_json,
                        double* out) {
  return guard([&] {
    need_out(out, "out");
    *out = delta_e2({mrr, qdflops}, {baseline_mrr, baseline_qdflops},
                    json_io::e2_config(json_io::parse_object(config_json)));
  });
}

/* ---- experiments ---- */

ssp_status ssp_pipeline_run(const char* config_json, char** result_json) {
  return guard([&] {
    need_out(result_json, "result_json");
    const auto cfg = json_io::pipeline_config(json_io::parse_object(config_json));
    const auto res = run_pipeline(cfg);
    emit(result_json, {{"config", json_io::to_json(cfg)},
                       {"before", json_io::to_json(res.before)},
                       {"after", json_io::to_json(res.after)},
                       {"sae_report", json_io::to_json(res.sae_report)},
                       {"finetune_report", json_io::to_json(res.finetune_report)}});
  });
}

ssp_status ssp_sweep(const char* config_json, const char* grid_json,
                     char** rows_json, char** csv, char** svg) {
  return guard([&] {
    const auto cfg = json_io::pipeline_config(json_io::parse_object(config_json));
    json g;
    try {
      g = json::parse(need_str(grid_json, "grid_json"));
    } catch (const json::parse_error& e) {
      throw InvalidArgument(std::string("grid is not valid JSON: ") + e.what());
    }
    const auto rows = run_sweep(cfg, json_io::sweep_grid(g));
    json arr = json::array();
    for (const auto& r : rows) arr.push_back(json_io::to_json(r));
    std::string c = sweep_csv(rows);
    std::string s = sweep_svg(rows);
    // Allocate everything before handing anything out.
    char* a = rows_json ? dup_string(arr.dump()) : nullptr;
    char* b = nullptr;
    char* d = nullptr;
    try {
      b = csv ? dup_string(c) : nullptr;
      d = svg ? dup_string(s) : nullptr;
    } catch (...) {
      std::free(a);
      std::free(b);
      throw;
    }
    if (rows_json) *rows_json = a;
    if (csv) *csv = b;
    if (svg) *svg = d;
  });
}

/* ---- analysis ---- */

ssp_status ssp_anisotropy(const ssp_corpus* c, size_t num_pairs, uint64_t seed,
                          double* out) {
  return guard([&] {
    need_out(out, "out");
    const auto tokens = need(c, "corpus").v.flatten_tokens();
    *out = anisotropy(tokens, num_pairs, seed);
  });
}

ssp_status ssp_analyze_cooccurrence(const ssp_corpus* c, const ssp_sparse* s,
                                    const char* config_json, char** result_json) {
  return guard([&] {
    need_out(result_json, "result_json");
    const auto cfg = json_io::cooc_config(json_io::parse_object(config_json));
    const auto& corpus = need(c, "corpus").v;
    const auto& enc = need(s, "sparse").v;
    std::vector<CoocDocument> docs;
    docs.reserve(enc.records.size());
    for (const auto& r : enc.records) {
      const auto* seq = corpus.find(r.doc_id);
      if (!seq) throw NotFoundError("document '" + r.doc_id + "' is not in the corpus");
      if (!seq->token_ids()) {
        throw InvalidArgument("document '" + r.doc_id + "' has no token ids");
      }
      docs.push_back({*seq->token_ids(), r.vector});
    }
    const auto stats = collect_cooccurrence(docs, cfg.min_count);
    const auto pairs = classify_pairs(stats, cfg.prob_floor);
    const auto sig = binomial_filter(stats, pairs, cfg.confidence);
    json jp = json::array();
    for (const auto& p : pairs) jp.push_back(json_io::to_json(p));
    json js = json::array();
    for (const auto& p : sig) js.push_back(json_io::to_json(p));
    emit(result_json, {{"config", json_io::to_json(cfg)},
                       {"stats", json_io::to_json(stats)},
                       {"pairs", jp},
                       {"significant", js}});
  });
}

ssp_status ssp_multilingual_overlap(const ssp_sparse* const* langs, size_t n_langs,
                                    char** result_json) {
  return guard([&] {
    need_out(result_json, "result_json");
    if (n_langs > 0 && !langs) throw InvalidArgument("langs is NULL");
    if (n_langs < 2) throw InvalidArgument("need at least two languages");
    std::vector<std::map<std::string, const SparseVector*>> by_id(n_langs);
    for (size_t l = 0; l < n_langs; ++l) {
      for (const auto& r : need(langs[l], "language").v.records) {
        by_id[l].emplace(r.doc_id, &r.vector);
      }
    }
    std::vector<std::vector<SparseVector>> parallel;
    size_t skipped = 0;
    for (const auto& [id, v0] : by_id[0]) {
      std::vector<SparseVector> row{*v0};
      for (size_t l = 1; l < n_langs; ++l) {
        auto it = by_id[l].find(id);
        if (it == by_id[l].end()) break;
        row.push_back(*it->second);
      }
      if (row.size() == n_langs) {
        parallel.push_back(std::move(row));
      } else {
        ++skipped;
      }
    }
    std::set<std::string> all_ids;
    for (const auto& m : by_id) {
      for (const auto& kv : m) all_ids.insert(kv.first);
    }
    skipped = all_ids.size() - parallel.size();
    json j = json_io::to_json(multilingual_overlap(parallel));
    j["skipped"] = skipped;
    emit(result_json, j);
  });
}

}  // extern "C"
