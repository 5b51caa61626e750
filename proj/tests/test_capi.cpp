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


// Exercises the shared library through its C header only.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"
#include "saesplade/saesplade.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ssp_capi_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static inline int counter = 0;
};

std::string take(char* s) {
  std::string out = s ? s : "";
  ssp_string_free(s);
  return out;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Two docs over a 4-d space, one token each with known ids.
ssp_corpus* tiny_corpus() {
  ssp_corpus* c = nullptr;
  REQUIRE(ssp_corpus_create(4, &c) == SSP_OK);
  const double a[] = {1, 0, 0, 0, 0, 1, 0, 0};
  const uint32_t ids_a[] = {7, 8};
  REQUIRE(ssp_corpus_add(c, "a", 2, a, ids_a) == SSP_OK);
  const double b[] = {0, 0, 1, 0};
  REQUIRE(ssp_corpus_add(c, "b", 1, b, nullptr) == SSP_OK);
  return c;
}

}  // namespace

TEST_CASE("status names, version and errors") {
  CHECK(std::string(ssp_version()).size() > 0);
  CHECK(std::string(ssp_status_name(SSP_ERR_FORMAT)) == "format");
  ssp_corpus* c = nullptr;
  CHECK(ssp_corpus_load("/nonexistent/file.emb", &c) == SSP_ERR_IO);
  CHECK(c == nullptr);
  CHECK(std::string(ssp_last_error()).find("/nonexistent/file.emb") != std::string::npos);
  CHECK(ssp_corpus_load(nullptr, &c) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_corpus_load("x", nullptr) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_corpus_create(0, &c) == SSP_ERR_DIMENSION);
  // Free functions accept NULL.
  ssp_corpus_free(nullptr);
  ssp_index_free(nullptr);
  ssp_string_free(nullptr);
}

TEST_CASE("config resolution is canonical and strict") {
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(ssp_config_resolve("sae", "{\"k_sae\": 4}", &a) == SSP_OK);
  REQUIRE(ssp_config_resolve("sae", "{\"k_sae\":4,\"variant\":\"topk\"}", &b) == SSP_OK);
  const std::string sa = take(a), sb = take(b);
  CHECK(sa == sb);
  CHECK(json::parse(sa)["k_sae"] == 4);
  CHECK(json::parse(sa)["adam"]["lr"].get<double>() > 0);

  char* c = nullptr;
  REQUIRE(ssp_config_resolve("sae", nullptr, &c) == SSP_OK);
  CHECK(take(c) != sa);

  char* bad = nullptr;
  CHECK(ssp_config_resolve("sae", "{\"k_sea\": 4}", &bad) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ssp_last_error()).find("k_sea") != std::string::npos);
  CHECK(ssp_config_resolve("sae", "{\"k_sae\": -1}", &bad) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_config_resolve("sae", "{\"k_sae\": 2.5}", &bad) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_config_resolve("sae", "[1]", &bad) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_config_resolve("sae", "{", &bad) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_config_resolve("nope", "{}", &bad) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_config_resolve("e2", "{\"beta\": 0}", &bad) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);

  for (const char* kind : {"finetune", "synthetic", "relevance", "toy", "e2", "pipeline",
                           "cooccurrence"}) {
    char* out = nullptr;
    CHECK_MESSAGE(ssp_config_resolve(kind, "", &out) == SSP_OK, kind);
    const std::string first = take(out);
    // Resolving a resolved config is a fixed point.
    REQUIRE(ssp_config_resolve(kind, first.c_str(), &out) == SSP_OK);
    CHECK(take(out) == first);
  }

  char* ir = nullptr;
  REQUIRE(ssp_config_resolve("finetune", "{\"k_splade\": null}", &ir) == SSP_OK);
  CHECK(json::parse(take(ir))["k_splade"].is_null());
}

TEST_CASE("corpus building, append and round trip") {
  TempDir dir;
  ssp_corpus* c = tiny_corpus();
  CHECK(ssp_corpus_size(c) == 2);
  CHECK(ssp_corpus_dim(c) == 4);
  CHECK(ssp_corpus_token_count(c) == 3);
  const double v[] = {1, 0, 0, 0};
  CHECK(ssp_corpus_add(c, "a", 1, v, nullptr) == SSP_ERR_INVALID_ARGUMENT);  // duplicate
  CHECK(ssp_corpus_add(c, "z", 0, v, nullptr) == SSP_ERR_EMPTY_INPUT);

  REQUIRE(ssp_corpus_save(c, (dir / "c.emb").c_str()) == SSP_OK);
  ssp_corpus* back = nullptr;
  REQUIRE(ssp_corpus_load((dir / "c.emb").c_str(), &back) == SSP_OK);
  CHECK(ssp_corpus_token_count(back) == 3);

  // Appending a corpus to itself collides on every id and leaves it intact.
  CHECK(ssp_corpus_append(back, c) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_corpus_size(back) == 2);

  ssp_corpus* other = nullptr;
  REQUIRE(ssp_corpus_create(4, &other) == SSP_OK);
  REQUIRE(ssp_corpus_add(other, "q", 1, v, nullptr) == SSP_OK);
  REQUIRE(ssp_corpus_append(back, other) == SSP_OK);
  CHECK(ssp_corpus_size(back) == 3);
  ssp_corpus* wide = nullptr;
  REQUIRE(ssp_corpus_create(5, &wide) == SSP_OK);
  CHECK(ssp_corpus_append(back, wide) == SSP_ERR_DIMENSION);

  write(dir / "bad.emb", "SAEEMB99garbage");
  ssp_corpus* bad = nullptr;
  CHECK(ssp_corpus_load((dir / "bad.emb").c_str(), &bad) == SSP_ERR_FORMAT);
  ssp_corpus_free(wide);
  ssp_corpus_free(other);
  ssp_corpus_free(back);
  ssp_corpus_free(c);
}

TEST_CASE("toy embedding writes a vocabulary sidecar") {
  TempDir dir;
  write(dir / "t.jsonl",
        "{\"id\": \"d1\", \"text\": \"Sparse retrieval\"}\n"
        "{\"id\": \"d2\", \"text\": \"dense RETRIEVAL\"}\n");
  ssp_corpus* c = nullptr;
  REQUIRE(ssp_toy_embed_file((dir / "t.jsonl").c_str(), "{\"dim\": 8}",
                             (dir / "v.json").c_str(), &c) == SSP_OK);
  CHECK(ssp_corpus_size(c) == 2);
  CHECK(ssp_corpus_dim(c) == 8);
  std::ifstream in(dir / "v.json");
  const json vocab = json::parse(in);
  CHECK(vocab.size() == 3);
  std::vector<std::string> terms;
  for (const auto& t : vocab) terms.push_back(t.get<std::string>());
  std::sort(terms.begin(), terms.end());
  CHECK(terms == std::vector<std::string>{"dense", "retrieval", "sparse"});
  ssp_corpus_free(c);
  CHECK(ssp_toy_embed_file((dir / "t.jsonl").c_str(), "{\"dim\": 0}", nullptr, &c) ==
        SSP_ERR_DIMENSION);
}

TEST_CASE("synthetic training recovers the dictionary") {
  ssp_corpus* c = nullptr;
  char* truth = nullptr;
  REQUIRE(ssp_generate_synthetic(
              "{\"dim\": 16, \"concepts\": 16, \"docs\": 100, \"tokens_per_doc\": 100, "
              "\"seed\": 1}",
              &c, &truth) == SSP_OK);
  const json t = json::parse(take(truth));
  CHECK(t["atoms"].size() == 16);
  CHECK(t["active_sets"].size() == 10000);

  ssp_params* p = nullptr;
  ssp_normalizer* norm = nullptr;
  char* report = nullptr;
  REQUIRE(ssp_sae_train(c,
                        "{\"latents\": 16, \"k_sae\": 1, \"steps\": 2000, \"adam\": {\"lr\": "
                        "0.003}, \"aux_k\": 2, \"aux_alpha\": 3, \"seed\": 1, \"log_every\": 0}",
                        &p, &norm, &report) == SSP_OK);
  CHECK(norm == nullptr);  // not requested by the config
  CHECK(ssp_params_dim(p) == 16);
  CHECK(ssp_params_latents(p) == 16);
  const json r = json::parse(take(report));
  CHECK(r["final_eval_rsct"].get<double>() < 1e-2 * r["initial_eval_rsct"].get<double>());

  double frac = 0.0;
  REQUIRE(ssp_sae_atom_recovery(p, t["atoms"].dump().c_str(), 0.9, &frac) == SSP_OK);
  CHECK(frac >= 0.9);
  CHECK(ssp_sae_atom_recovery(p, "[[1, 0]]", 0.9, &frac) == SSP_ERR_DIMENSION);
  CHECK(ssp_sae_atom_recovery(p, "not json", 0.9, &frac) == SSP_ERR_INVALID_ARGUMENT);

  // Normalized training hands back a normalizer.
  ssp_params* p2 = nullptr;
  REQUIRE(ssp_sae_train(c, "{\"latents\": 16, \"k_sae\": 1, \"steps\": 5, \"normalize_inputs\": true}",
                        &p2, &norm, nullptr) == SSP_OK);
  CHECK(norm != nullptr);
  ssp_sparse* s = nullptr;
  REQUIRE(ssp_encode(p2, c, 0, norm, &s) == SSP_OK);
  CHECK(ssp_sparse_size(s) == 100);
  ssp_sparse_free(s);
  ssp_normalizer_free(norm);
  ssp_params_free(p2);

  CHECK(ssp_sae_train(c, "{\"latents\": 16, \"variant\": \"topq\"}", &p2, nullptr, nullptr) ==
        SSP_ERR_INVALID_ARGUMENT);
  ssp_params_free(p);
  ssp_corpus_free(c);
}

TEST_CASE("encode, index, search and evaluate") {
  TempDir dir;
  ssp_corpus* c = nullptr;
  REQUIRE(ssp_generate_synthetic("{\"dim\": 8, \"concepts\": 8, \"docs\": 20, \"seed\": 3}", &c,
                                 nullptr) == SSP_OK);
  ssp_params* p = nullptr;
  REQUIRE(ssp_sae_train(c, "{\"latents\": 12, \"k_sae\": 2, \"steps\": 50, \"seed\": 3}", &p,
                        nullptr, nullptr) == SSP_OK);
  REQUIRE(ssp_params_save(p, (dir / "p.prm").c_str()) == SSP_OK);
  ssp_params* p_back = nullptr;
  REQUIRE(ssp_params_load((dir / "p.prm").c_str(), &p_back) == SSP_OK);

  ssp_sparse* s = nullptr;
  REQUIRE(ssp_encode(p_back, c, 3, nullptr, &s) == SSP_OK);
  CHECK(ssp_sparse_size(s) == 20);
  CHECK(ssp_sparse_vocab(s) == 12);
  CHECK(ssp_sparse_mean_nnz(s) > 0.0);
  REQUIRE(ssp_sparse_save(s, (dir / "s.spv").c_str()) == SSP_OK);
  ssp_sparse* s_back = nullptr;
  REQUIRE(ssp_sparse_load((dir / "s.spv").c_str(), &s_back) == SSP_OK);

  ssp_index* ix = nullptr;
  REQUIRE(ssp_index_build(s_back, &ix) == SSP_OK);
  char* stats = nullptr;
  REQUIRE(ssp_index_stats(ix, &stats) == SSP_OK);
  const json st = json::parse(take(stats));
  CHECK(st["num_docs"] == 20);
  CHECK(st["vocab_size"] == 12);
  REQUIRE(ssp_index_save(ix, (dir / "i.idx").c_str()) == SSP_OK);
  ssp_index* ix_back = nullptr;
  REQUIRE(ssp_index_load((dir / "i.idx").c_str(), &ix_back) == SSP_OK);

  // Searching the documents against themselves: each finds itself first.
  ssp_run* run = nullptr;
  REQUIRE(ssp_search(ix_back, s_back, 5, &run) == SSP_OK);
  REQUIRE(ssp_run_save(run, (dir / "r.trec").c_str(), "t") == SSP_OK);

  double flops = 0.0;
  REQUIRE(ssp_qd_flops(s, s, 0, 0, &flops) == SSP_OK);
  double sampled = 0.0;
  REQUIRE(ssp_qd_flops(s, s, 20, 9, &sampled) == SSP_OK);
  CHECK(sampled == doctest::Approx(flops));
  CHECK(flops > 0.0);

  // Mismatched vocabularies are rejected when searching.
  ssp_params* wide = nullptr;
  REQUIRE(ssp_sae_train(c, "{\"latents\": 16, \"k_sae\": 2, \"steps\": 1}", &wide, nullptr,
                        nullptr) == SSP_OK);
  ssp_sparse* sw = nullptr;
  REQUIRE(ssp_encode(wide, c, 0, nullptr, &sw) == SSP_OK);
  ssp_run* r2 = nullptr;
  CHECK(ssp_search(ix_back, sw, 5, &r2) == SSP_ERR_DIMENSION);

  ssp_sparse_free(sw);
  ssp_params_free(wide);
  ssp_run_free(run);
  ssp_index_free(ix_back);
  ssp_index_free(ix);
  ssp_sparse_free(s_back);
  ssp_sparse_free(s);
  ssp_params_free(p_back);
  ssp_params_free(p);
  ssp_corpus_free(c);
}

TEST_CASE("evaluate a hand-written run") {
  TempDir dir;
  // q1: relevant doc at rank 2 -> RR 1/2. q2: relevant at rank 1 -> RR 1.
  write(dir / "run.trec",
        "q1 Q0 d3 1 9.0 x\nq1 Q0 d1 2 8.0 x\nq2 Q0 d2 1 5.0 x\nq2 Q0 d9 2 1.0 x\n");
  write(dir / "qrels", "q1 0 d1 1\nq2 0 d2 1\n");
  ssp_run* r = nullptr;
  ssp_qrels* q = nullptr;
  REQUIRE(ssp_run_load((dir / "run.trec").c_str(), &r) == SSP_OK);
  REQUIRE(ssp_qrels_load((dir / "qrels").c_str(), &q) == SSP_OK);
  char* m = nullptr;
  REQUIRE(ssp_evaluate(r, q, 10, &m) == SSP_OK);
  const json j = json::parse(take(m));
  CHECK(j["mrr_at_k"].get<double>() == doctest::Approx(0.75));
  CHECK(j["success_at_5"].get<double>() == doctest::Approx(1.0));
  CHECK(j["queries"] == 2);
  // nDCG: q1 = 1/log2(3), q2 = 1.
  CHECK(j["ndcg_at_k"].get<double>() == doctest::Approx((1.0 / std::log2(3.0) + 1.0) / 2));
  REQUIRE(ssp_evaluate(r, q, 1, &m) == SSP_OK);
  CHECK(json::parse(take(m))["mrr_at_k"].get<double>() == doctest::Approx(0.5));
  CHECK(ssp_evaluate(r, q, 0, &m) == SSP_ERR_INVALID_ARGUMENT);

  write(dir / "bad.trec", "q1 Q0 d1\n");
  ssp_run* bad = nullptr;
  CHECK(ssp_run_load((dir / "bad.trec").c_str(), &bad) == SSP_ERR_FORMAT);
  ssp_qrels_free(q);
  ssp_run_free(r);
}

TEST_CASE("E2 through the C API") {
  double v = 0.0;
  REQUIRE(ssp_delta_e2(0.387, 1.40, 0.183, 0.13, nullptr, &v) == SSP_OK);
  CHECK(v == doctest::Approx(19.127).epsilon(1e-4));
  double e = 0.0, e0 = 0.0;
  REQUIRE(ssp_e2(0.387, 1.40, "", &e) == SSP_OK);
  REQUIRE(ssp_e2(0.183, 0.13, "", &e0) == SSP_OK);
  CHECK(100 * (e - e0) == doctest::Approx(v));
  CHECK(ssp_e2(0.3, 1.0, "{\"beta\": -1}", &e) == SSP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fine-tuning checks its inputs") {
  TempDir dir;
  REQUIRE(ssp_generate_relevance_task(
              "{\"docs\": 30, \"train_queries\": 20, \"test_queries\": 10, \"topics\": 12, "
              "\"dim\": 16, \"seed\": 2}",
              dir.path.c_str()) == SSP_OK);
  ssp_corpus *docs = nullptr, *queries = nullptr;
  REQUIRE(ssp_corpus_load((dir / "docs.emb").c_str(), &docs) == SSP_OK);
  REQUIRE(ssp_corpus_load((dir / "train_queries.emb").c_str(), &queries) == SSP_OK);
  ssp_triples* t = nullptr;
  REQUIRE(ssp_triples_load((dir / "train.triples.jsonl").c_str(), &t) == SSP_OK);
  CHECK(ssp_triples_size(t) == 20);
  ssp_params* p = nullptr;
  REQUIRE(ssp_sae_train(docs, "{\"latents\": 16, \"k_sae\": 1, \"steps\": 20}", &p, nullptr,
                        nullptr) == SSP_OK);
  ssp_params* out = nullptr;
  char* report = nullptr;
  REQUIRE(ssp_finetune(p, queries, docs, t, "{\"steps\": 5, \"log_every\": 1}", nullptr, &out,
                       &report) == SSP_OK);
  CHECK(json::parse(take(report))["log"].size() >= 5);
  CHECK(ssp_params_latents(out) == 16);
  ssp_params_free(out);
  out = nullptr;
  CHECK(ssp_finetune(p, queries, docs, t, "{\"normalize_inputs\": true}", nullptr, &out,
                     nullptr) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(out == nullptr);
  // Swapping queries and docs leaves every triple pointing at unknown ids.
  CHECK(ssp_finetune(p, docs, queries, t, "{\"steps\": 1}", nullptr, &out, nullptr) != SSP_OK);
  ssp_params_free(p);
  ssp_triples_free(t);
  ssp_corpus_free(queries);
  ssp_corpus_free(docs);
}

TEST_CASE("analysis entry points") {
  ssp_corpus* c = tiny_corpus();
  double a = 0.0;
  REQUIRE(ssp_anisotropy(c, 100, 0, &a) == SSP_OK);
  CHECK(a == doctest::Approx(0.0));  // three orthogonal tokens
  CHECK(ssp_anisotropy(c, 0, 0, &a) == SSP_ERR_INVALID_ARGUMENT);

  // Co-occurrence needs token ids on every document ("b" has none).
  ssp_params* p = nullptr;
  REQUIRE(ssp_sae_train(c, "{\"latents\": 4, \"k_sae\": 1, \"steps\": 1, \"batch_tokens\": 3}",
                        &p, nullptr, nullptr) == SSP_OK);
  ssp_sparse* s = nullptr;
  REQUIRE(ssp_encode(p, c, 0, nullptr, &s) == SSP_OK);
  char* res = nullptr;
  CHECK(ssp_analyze_cooccurrence(c, s, "{\"min_count\": 1}", &res) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ssp_last_error()).find("token ids") != std::string::npos);

  // Synthetic corpora carry token ids.
  ssp_corpus* syn = nullptr;
  REQUIRE(ssp_generate_synthetic("{\"dim\": 8, \"concepts\": 4, \"docs\": 40, \"seed\": 5}", &syn,
                                 nullptr) == SSP_OK);
  ssp_params* ps = nullptr;
  REQUIRE(ssp_sae_train(syn, "{\"latents\": 4, \"k_sae\": 1, \"steps\": 200, \"seed\": 5}", &ps,
                        nullptr, nullptr) == SSP_OK);
  ssp_sparse* ss = nullptr;
  REQUIRE(ssp_encode(ps, syn, 0, nullptr, &ss) == SSP_OK);
  REQUIRE(ssp_analyze_cooccurrence(syn, ss, "", &res) == SSP_OK);
  const json r = json::parse(take(res));
  CHECK(r["stats"]["total_docs"] == 40);
  CHECK(r["significant"].size() <= r["pairs"].size());
  CHECK(ssp_analyze_cooccurrence(syn, ss, "{\"confidence\": 1.5}", &res) ==
        SSP_ERR_INVALID_ARGUMENT);
  // Encodings of documents missing from the corpus.
  CHECK(ssp_analyze_cooccurrence(c, ss, "", &res) == SSP_ERR_NOT_FOUND);

  const ssp_sparse* langs[] = {ss, ss};
  REQUIRE(ssp_multilingual_overlap(langs, 2, &res) == SSP_OK);
  const json m = json::parse(take(res));
  CHECK(m["documents"] == 40);
  CHECK(m["mean_overlap"].get<double>() == doctest::Approx(m["mean_doc_len"].get<double>()));
  CHECK(m["skipped"] == 0);
  const ssp_sparse* mixed[] = {ss, s};  // no shared ids
  CHECK(ssp_multilingual_overlap(mixed, 2, &res) == SSP_ERR_EMPTY_INPUT);
  CHECK(ssp_multilingual_overlap(langs, 1, &res) == SSP_ERR_INVALID_ARGUMENT);

  ssp_sparse_free(ss);
  ssp_params_free(ps);
  ssp_corpus_free(syn);
  ssp_sparse_free(s);
  ssp_params_free(p);
  ssp_corpus_free(c);
}

TEST_CASE("sweep returns rows, CSV and SVG") {
  const char* cfg =
      "{\"task\": {\"docs\": 30, \"train_queries\": 20, \"test_queries\": 10, \"topics\": 12, "
      "\"dim\": 16, \"seed\": 4}, \"sae\": {\"latents\": 16, \"k_sae\": 1, \"steps\": 30}, "
      "\"ir\": {\"steps\": 3}}";
  char *rows = nullptr, *csv = nullptr, *svg = nullptr;
  REQUIRE(ssp_sweep(cfg, "[{\"k_sae\": 1, \"k_splade\": 4}, {\"k_sae\": 1, \"k_splade\": 4}]",
                    &rows, &csv, &svg) == SSP_OK);
  const json r = json::parse(take(rows));
  REQUIRE(r.size() == 2);
  CHECK(r[0] == r[1]);
  const std::string c = take(csv);
  CHECK(c.rfind("k_sae,k_splade,flops_multiplier,", 0) == 0);
  CHECK(std::count(c.begin(), c.end(), '\n') == 3);
  CHECK(take(svg).find("<svg") != std::string::npos);
  CHECK(ssp_sweep(cfg, "[]", &rows, nullptr, nullptr) == SSP_ERR_INVALID_ARGUMENT);
  CHECK(ssp_sweep(cfg, "[{\"k_sae\": 0}]", &rows, nullptr, nullptr) == SSP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("file hashing") {
  TempDir dir;
  write(dir / "h", "abc");
  uint64_t h = 0;
  REQUIRE(ssp_hash_file((dir / "h").c_str(), &h) == SSP_OK);
  CHECK(h == ssp_hash_string("abc"));
  CHECK(ssp_hash_string("") == 0xcbf29ce484222325ULL);  // FNV-1a offset basis
  CHECK(ssp_hash_file((dir / "missing").c_str(), &h) == SSP_ERR_IO);
}
