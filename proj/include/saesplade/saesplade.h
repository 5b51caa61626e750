/*
 * Copyright 2026 The SaeSplade Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SAESPLADE_SAESPLADE_H_
#define SAESPLADE_SAESPLADE_H_

/*
 * C interface to libsaesplade.
 *
 * Every function returns an ssp_status. On failure the out-parameters are
 * untouched and ssp_last_error() describes the problem (per thread, valid
 * until the next failing call on that thread).
 *
 * Handles are opaque and owned by the caller; free each with its _free
 * function (NULL is accepted). Strings returned through char** are
 * NUL-terminated, heap-allocated and released with ssp_string_free.
 *
 * Configs are JSON objects; missing fields take their defaults and unknown
 * fields are an error. NULL or "" means all defaults.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SSP_API __declspec(dllexport)
#else
#define SSP_API __attribute__((visibility("default")))
#endif

typedef enum ssp_status {
  SSP_OK = 0,
  SSP_ERR_INVALID_ARGUMENT = 1,
  SSP_ERR_DIMENSION = 2,
  SSP_ERR_FORMAT = 3,
  SSP_ERR_IO = 4,
  SSP_ERR_EMPTY_INPUT = 5,
  SSP_ERR_NOT_FOUND = 6,
  SSP_ERR_INTERNAL = 99
} ssp_status;

typedef struct ssp_corpus ssp_corpus;         /* token embeddings */
typedef struct ssp_params ssp_params;         /* SAE weights */
typedef struct ssp_normalizer ssp_normalizer; /* input centering/scale */
typedef struct ssp_sparse ssp_sparse;         /* named sparse vectors */
typedef struct ssp_index ssp_index;
typedef struct ssp_triples ssp_triples;
typedef struct ssp_run ssp_run;
typedef struct ssp_qrels ssp_qrels;

SSP_API const char* ssp_last_error(void);
SSP_API const char* ssp_version(void);
SSP_API const char* ssp_status_name(ssp_status s);
SSP_API void ssp_string_free(char* s);

/* FNV-1a 64 of a file's bytes / of a string. */
SSP_API ssp_status ssp_hash_file(const char* path, uint64_t* out);
SSP_API uint64_t ssp_hash_string(const char* s);

/* Fills in defaults and validates. kind: "sae", "finetune", "synthetic",
 * "relevance", "toy", "e2", "pipeline". The result is canonical (sorted
 * keys, no whitespace), so equal configs give equal strings. */
SSP_API ssp_status ssp_config_resolve(const char* kind, const char* config_json,
                                      char** out_json);

/* ---- embeddings ---- */
SSP_API ssp_status ssp_corpus_load(const char* path, ssp_corpus** out);
SSP_API ssp_status ssp_corpus_save(const ssp_corpus* c, const char* path);
SSP_API void ssp_corpus_free(ssp_corpus* c);
SSP_API size_t ssp_corpus_size(const ssp_corpus* c);
SSP_API size_t ssp_corpus_dim(const ssp_corpus* c);
SSP_API size_t ssp_corpus_token_count(const ssp_corpus* c);
SSP_API ssp_status ssp_corpus_create(size_t dim, ssp_corpus** out);
/* values: n_tokens*dim row-major; token_ids may be NULL. */
SSP_API ssp_status ssp_corpus_add(ssp_corpus* c, const char* doc_id,
                                  size_t n_tokens, const double* values,
                                  const uint32_t* token_ids);
/* Appends copies of src's documents to dst (ids must stay unique). */
SSP_API ssp_status ssp_corpus_append(ssp_corpus* dst, const ssp_corpus* src);
/* Embeds line-delimited {"id","text"} with the toy encoder. When vocab_path
 * is non-NULL, writes a JSON {token_id: term} map beside it. */
SSP_API ssp_status ssp_toy_embed_file(const char* jsonl_path,
                                      const char* config_json,
                                      const char* vocab_path, ssp_corpus** out);
/* Dictionary-learning corpus; truth_json receives {"atoms", "active_sets"}. */
SSP_API ssp_status ssp_generate_synthetic(const char* spec_json, ssp_corpus** out,
                                          char** truth_json);
/* Writes docs.emb, train_queries.emb, test_queries.emb, train.triples.jsonl,
 * train.qrels and test.qrels into dir (which must exist). */
SSP_API ssp_status ssp_generate_relevance_task(const char* spec_json,
                                               const char* dir);

/* ---- SAE ---- */
SSP_API ssp_status ssp_params_load(const char* path, ssp_params** out);
SSP_API ssp_status ssp_params_save(const ssp_params* p, const char* path);
SSP_API void ssp_params_free(ssp_params* p);
SSP_API size_t ssp_params_dim(const ssp_params* p);
SSP_API size_t ssp_params_latents(const ssp_params* p);
/* Trains on every token of c. out_norm receives the fitted normalizer when
 * normalize_inputs is set, NULL otherwise; out_norm itself may be NULL. */
SSP_API ssp_status ssp_sae_train(const ssp_corpus* c, const char* config_json,
                                 ssp_params** out, ssp_normalizer** out_norm,
                                 char** report_json);
/* Recovery of known atoms (JSON array of arrays) by greedy matching of
 * decoder columns; counts atoms matched with |cosine| >= threshold. */
SSP_API ssp_status ssp_sae_atom_recovery(const ssp_params* p,
                                         const char* atoms_json,
                                         double threshold, double* out_fraction);

SSP_API ssp_status ssp_normalizer_load(const char* path, ssp_normalizer** out);
SSP_API ssp_status ssp_normalizer_save(const ssp_normalizer* n, const char* path);
SSP_API void ssp_normalizer_free(ssp_normalizer* n);

/* ---- sparse encoding ---- */
/* k_splade = 0 disables the per-token mask. norm may be NULL. */
SSP_API ssp_status ssp_encode(const ssp_params* p, const ssp_corpus* c,
                              size_t k_splade, const ssp_normalizer* norm,
                              ssp_sparse** out);
SSP_API ssp_status ssp_sparse_load(const char* path, ssp_sparse** out);
SSP_API ssp_status ssp_sparse_save(const ssp_sparse* s, const char* path);
SSP_API void ssp_sparse_free(ssp_sparse* s);
SSP_API size_t ssp_sparse_size(const ssp_sparse* s);
SSP_API uint32_t ssp_sparse_vocab(const ssp_sparse* s);
/* Mean nnz per vector. */
SSP_API double ssp_sparse_mean_nnz(const ssp_sparse* s);

/* ---- fine-tuning ---- */
SSP_API ssp_status ssp_triples_load(const char* path, ssp_triples** out);
SSP_API void ssp_triples_free(ssp_triples* t);
SSP_API size_t ssp_triples_size(const ssp_triples* t);
/* norm is required when normalize_inputs is set and ignored otherwise. */
SSP_API ssp_status ssp_finetune(const ssp_params* init, const ssp_corpus* queries,
                                const ssp_corpus* docs, const ssp_triples* triples,
                                const char* config_json, const ssp_normalizer* norm,
                                ssp_params** out, char** report_json);

/* ---- index and search ---- */
SSP_API ssp_status ssp_index_build(const ssp_sparse* docs, ssp_index** out);
SSP_API ssp_status ssp_index_load(const char* path, ssp_index** out);
SSP_API ssp_status ssp_index_save(const ssp_index* ix, const char* path);
SSP_API void ssp_index_free(ssp_index* ix);
SSP_API ssp_status ssp_index_stats(const ssp_index* ix, char** stats_json);
SSP_API ssp_status ssp_search(const ssp_index* ix, const ssp_sparse* queries,
                              size_t cutoff, ssp_run** out);

/* ---- evaluation ---- */
SSP_API ssp_status ssp_run_load(const char* path, ssp_run** out);
SSP_API ssp_status ssp_run_save(const ssp_run* r, const char* path,
                                const char* tag);
SSP_API void ssp_run_free(ssp_run* r);
SSP_API ssp_status ssp_qrels_load(const char* path, ssp_qrels** out);
SSP_API void ssp_qrels_free(ssp_qrels* q);
/* {"mrr_at_k","ndcg_at_k","success_at_5","queries","k"} */
SSP_API ssp_status ssp_evaluate(const ssp_run* r, const ssp_qrels* q, size_t k,
                                char** metrics_json);
/* max_docs = 0 uses every document. */
SSP_API ssp_status ssp_qd_flops(const ssp_sparse* queries, const ssp_sparse* docs,
                                size_t max_docs, uint64_t seed, double* out);
SSP_API ssp_status ssp_e2(double mrr, double qdflops, const char* config_json,
                          double* out);
/* 100 * (E2(model) - E2(baseline)). */
SSP_API ssp_status ssp_delta_e2(double mrr, double qdflops, double baseline_mrr,
                                double baseline_qdflops, const char* config_json,
                                double* out);

/* ---- experiments ---- */
/* Synthetic relevance task end to end; result carries metrics before and
 * after fine-tuning plus both training reports. */
SSP_API ssp_status ssp_pipeline_run(const char* config_json, char** result_json);
/* grid_json: [{"k_sae", "k_splade" (null = no mask), "flops_multiplier"}].
 * Any of the out pointers may be NULL. */
SSP_API ssp_status ssp_sweep(const char* config_json, const char* grid_json,
                             char** rows_json, char** csv, char** svg);

/* ---- analysis ---- */
/* Mean cosine over num_pairs random pairs of the corpus's token vectors. */
SSP_API ssp_status ssp_anisotropy(const ssp_corpus* c, size_t num_pairs,
                                  uint64_t seed, double* out);
/* Token ids come from c, encodings from s, matched by document id.
 * config: {"min_count": 5, "prob_floor": 0.1, "confidence": 0.95}.
 * Result: {"stats", "pairs" (after the floor), "significant" (after the
 * binomial filter)}. */
SSP_API ssp_status ssp_analyze_cooccurrence(const ssp_corpus* c,
                                            const ssp_sparse* s,
                                            const char* config_json,
                                            char** result_json);
/* One encoding set per language, documents matched by id; ids missing from
 * any language are skipped. */
SSP_API ssp_status ssp_multilingual_overlap(const ssp_sparse* const* langs,
                                            size_t n_langs, char** result_json);

#ifdef __cplusplus
}
#endif

#endif  /* SAESPLADE_SAESPLADE_H_ */
