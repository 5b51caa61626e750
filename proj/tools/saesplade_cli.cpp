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


// saesplade command-line front end. Talks to the library only through the
// C API in saesplade/saesplade.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "saesplade/saesplade.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// A failed library call; carries the status for the exit code.
struct Failure : std::runtime_error {
  Failure(ssp_status s, const std::string& what)
      : std::runtime_error(what), status(s) {}
  ssp_status status;
};

void check(ssp_status s) {
  if (s != SSP_OK) {
    throw Failure(s, std::string(ssp_status_name(s)) + ": " + ssp_last_error());
  }
}

void usage_error(const std::string& msg) {
  throw Failure(SSP_ERR_INVALID_ARGUMENT, "invalid_argument: " + msg);
}

// Owning wrappers for handles and returned strings.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Corpus = Handle<ssp_corpus, ssp_corpus_free>;
using Params = Handle<ssp_params, ssp_params_free>;
using Normalizer = Handle<ssp_normalizer, ssp_normalizer_free>;
using Sparse = Handle<ssp_sparse, ssp_sparse_free>;
using Index = Handle<ssp_index, ssp_index_free>;
using Triples = Handle<ssp_triples, ssp_triples_free>;
using RunH = Handle<ssp_run, ssp_run_free>;
using QrelsH = Handle<ssp_qrels, ssp_qrels_free>;

struct CString {
  char* p = nullptr;
  ~CString() { ssp_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
  json parse() const { return json::parse(str()); }
};

std::string resolve(const std::string& kind, const json& cfg) {
  CString s;
  check(ssp_config_resolve(kind.c_str(), cfg.dump().c_str(), s.out()));
  return s.str();
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure(SSP_ERR_IO, "io: cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Failure(SSP_ERR_IO, "io: write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Failure(SSP_ERR_IO, "io: cannot rename onto " + path + ": " + ec.message());
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(SSP_ERR_IO, "io: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Failure(SSP_ERR_FORMAT, "format: " + path + ": " + e.what());
  }
}

// Deep-merges `over` into `base` (objects only; everything else replaces).
void merge(json& base, const json& over) {
  if (!base.is_object() || !over.is_object()) {
    base = over;
    return;
  }
  for (auto it = over.begin(); it != over.end(); ++it) merge(base[it.key()], it.value());
}

// Collects flags that were actually given (on the command line or in the
// config file) into a JSON config, keyed by JSON pointer.
class Binder {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& flags, const std::string& ptr,
                   const std::string& help) {
    auto v = std::make_shared<T>();
    CLI::Option* o = app->add_option(flags, *v, help);
    setters_.push_back([o, v, ptr](json& j) {
      if (o->count() > 0) j[json::json_pointer(ptr)] = *v;
    });
    return o;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flags, const std::string& ptr,
                    const std::string& help) {
    auto v = std::make_shared<bool>(false);
    CLI::Option* o = app->add_flag(flags, *v, help);
    setters_.push_back([o, v, ptr](json& j) {
      if (o->count() > 0) j[json::json_pointer(ptr)] = *v;
    });
    return o;
  }

  void custom(std::function<void(json&)> f) { setters_.push_back(std::move(f)); }

  json apply(json base) const {
    json over = json::object();
    for (const auto& s : setters_) s(over);
    merge(base, over);
    return base;
  }

 private:
  std::vector<std::function<void(json&)>> setters_;
};

// Provenance record written next to a command's outputs.
struct Manifest {
  Manifest(std::string cmd, json cfg) : command(std::move(cmd)), config(std::move(cfg)) {}

  std::string command;
  json config;  // canonical, path-free
  std::optional<uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void write(const std::string& path) const {
    json in = json::array();
    for (const auto& p : inputs) {
      uint64_t h = 0;
      check(ssp_hash_file(p.c_str(), &h));
      in.push_back({{"path", p},
                    {"fnv1a64", hex64(h)},
                    {"bytes", static_cast<uint64_t>(fs::file_size(p))}});
    }
    const json hashed = {{"command", command}, {"config", config}};
    json m = {{"command", command},
              {"library_version", ssp_version()},
              {"config", config},
              {"config_hash", hex64(ssp_hash_string(hashed.dump().c_str()))},
              {"seed", seed ? json(*seed) : json(nullptr)},
              {"inputs", in},
              {"outputs", outputs}};
    write_text(path, m.dump(2) + "\n");
  }
};

// Everything a subcommand needs after parsing.
struct Command {
  CLI::App* app = nullptr;
  Binder binder;
  std::string config_json;  // optional JSON config file of this command's kind
  std::string manifest;
  std::function<void(Command&)> run;
};

void add_common(Command& c) {
  c.app->add_option("--config-json", c.config_json,
                    "JSON config file; explicit flags override its values")
      ->check(CLI::ExistingFile);
  c.app->add_option("--manifest", c.manifest,
                    "manifest path (default: next to the main output)");
}

json file_config(const Command& c) {
  return c.config_json.empty() ? json::object() : read_json_file(c.config_json);
}

std::string manifest_path(const Command& c, const std::string& main_output) {
  if (!c.manifest.empty()) return c.manifest;
  if (!main_output.empty()) return main_output + ".manifest.json";
  return c.app->get_name() + ".manifest.json";
}

std::optional<uint64_t> seed_of(const json& cfg, const char* ptr = "/seed") {
  const json::json_pointer p(ptr);
  if (cfg.contains(p) && cfg.at(p).is_number_unsigned()) return cfg.at(p).get<uint64_t>();
  return std::nullopt;
}

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

// ---------------------------------------------------------------- commands

struct GenSynth {
  std::string task = "dictionary";
  std::string out, truth, out_dir;
};

void setup_gen_synth(Command& c, GenSynth& o) {
  auto* a = c.app;
  a->add_option("--task", o.task, "dictionary | relevance")
      ->check(CLI::IsMember({"dictionary", "relevance"}));
  a->add_option("--out", o.out, "dictionary: output SAEEMB01 corpus");
  a->add_option("--truth", o.truth, "dictionary: ground-truth JSON (default <out>.truth.json)");
  a->add_option("--out-dir", o.out_dir, "relevance: output directory");
  auto& b = c.binder;
  b.add<size_t>(a, "--dim", "/dim", "embedding dimension");
  b.add<size_t>(a, "--concepts", "/concepts", "dictionary: number of atoms");
  b.add<size_t>(a, "--active", "/active_per_token", "dictionary: atoms per token");
  b.add<double>(a, "--noise", "/noise_sigma", "Gaussian noise sigma");
  b.add<size_t>(a, "--docs", "/docs", "number of documents");
  b.add<size_t>(a, "--tokens-per-doc", "/tokens_per_doc", "dictionary: tokens per document");
  b.add<size_t>(a, "--topics", "/topics", "relevance: number of topics");
  b.add<size_t>(a, "--topics-per-doc", "/topics_per_doc", "relevance");
  b.add<size_t>(a, "--tokens-per-topic", "/tokens_per_topic", "relevance");
  b.add<size_t>(a, "--query-tokens-per-topic", "/query_tokens_per_topic", "relevance");
  b.add<size_t>(a, "--train-queries", "/train_queries", "relevance");
  b.add<size_t>(a, "--test-queries", "/test_queries", "relevance");
  b.add<size_t>(a, "--negatives", "/negatives", "relevance: negatives per triple");
  b.add<double>(a, "--variant-rate", "/query_variant_rate", "relevance");
  b.add<uint64_t>(a, "--seed", "/seed", "generator seed");
  add_common(c);
  c.run = [&o](Command& c) {
    const bool dict = o.task == "dictionary";
    const std::string kind = dict ? "synthetic" : "relevance";
    const std::string cfg = resolve(kind, c.binder.apply(file_config(c)));
    Manifest m{c.app->get_name(), json::parse(cfg)};
    m.config["task"] = o.task;
    m.seed = seed_of(m.config);
    std::string main;
    if (dict) {
      if (o.out.empty()) usage_error("--out is required for --task dictionary");
      const std::string truth = o.truth.empty() ? o.out + ".truth.json" : o.truth;
      Corpus corpus;
      CString t;
      check(ssp_generate_synthetic(cfg.c_str(), corpus.out(), t.out()));
      check(ssp_corpus_save(corpus.get(), o.out.c_str()));
      write_text(truth, t.str() + "\n");
      m.outputs = {o.out, truth};
      main = o.out;
      std::cout << "wrote " << ssp_corpus_size(corpus.get()) << " docs, "
                << ssp_corpus_token_count(corpus.get()) << " tokens to " << o.out << "\n";
    } else {
      if (o.out_dir.empty()) usage_error("--out-dir is required for --task relevance");
      fs::create_directories(o.out_dir);
      check(ssp_generate_relevance_task(cfg.c_str(), o.out_dir.c_str()));
      for (const char* f : {"docs.emb", "train_queries.emb", "test_queries.emb",
                            "train.triples.jsonl", "train.qrels", "test.qrels"}) {
        m.outputs.push_back((fs::path(o.out_dir) / f).string());
      }
      main = (fs::path(o.out_dir) / "task").string();
      std::cout << "wrote relevance task to " << o.out_dir << "\n";
    }
    m.write(manifest_path(c, main));
  };
}

struct ToyEmbed {
  std::string input, out, vocab;
};

void setup_toy_embed(Command& c, ToyEmbed& o) {
  auto* a = c.app;
  a->add_option("--input", o.input, "line-delimited JSON {id, text}")
      ->required()->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "output SAEEMB01 file")->required();
  a->add_option("--vocab", o.vocab, "token-id -> term JSON (default <out>.vocab.json)");
  c.binder.add<size_t>(a, "--dim", "/dim", "embedding dimension");
  c.binder.add<size_t>(a, "--window", "/window", "context window radius");
  c.binder.add<uint64_t>(a, "--seed", "/seed", "term hashing seed");
  add_common(c);
  c.run = [&o](Command& c) {
    const std::string cfg = resolve("toy", c.binder.apply(file_config(c)));
    const std::string vocab = o.vocab.empty() ? o.out + ".vocab.json" : o.vocab;
    Corpus corpus;
    check(ssp_toy_embed_file(o.input.c_str(), cfg.c_str(), vocab.c_str(), corpus.out()));
    check(ssp_corpus_save(corpus.get(), o.out.c_str()));
    Manifest m{c.app->get_name(), json::parse(cfg)};
    m.seed = seed_of(m.config);
    m.inputs = {o.input};
    m.outputs = {o.out, vocab};
    m.write(manifest_path(c, o.out));
    std::cout << "embedded " << ssp_corpus_size(corpus.get()) << " docs ("
              << ssp_corpus_token_count(corpus.get()) << " tokens)\n";
  };
}

Corpus load_corpora(const std::vector<std::string>& paths) {
  Corpus all;
  for (const auto& p : paths) {
    Corpus c;
    check(ssp_corpus_load(p.c_str(), c.out()));
    if (!all.get()) {
      all = std::move(c);
    } else {
      check(ssp_corpus_append(all.p, c.get()));
    }
  }
  return all;
}

struct SaeTrain {
  std::vector<std::string> inputs;
  std::string out, report, normalizer_out;
};

void setup_sae_train(Command& c, SaeTrain& o) {
  auto* a = c.app;
  a->add_option("--input", o.inputs, "SAEEMB01 corpora (concatenated in order)")
      ->required()->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "output SAEPRM01 parameters")->required();
  a->add_option("--report", o.report, "training report JSON (default <out>.report.json)");
  a->add_option("--normalizer-out", o.normalizer_out,
                "fitted normalizer JSON when --normalize (default <out>.norm.json)");
  auto& b = c.binder;
  b.add<std::string>(a, "--variant", "/variant", "topk | hierarchical_topk | matryoshka_topk | l1");
  b.add<size_t>(a, "--latents", "/latents", "dictionary size M");
  b.add<size_t>(a, "--k", "/k_sae", "per-token top-k during training");
  b.add<double>(a, "--alpha-sp", "/alpha_sp", "sparsity penalty weight");
  b.add<std::vector<size_t>>(a, "--nested-sizes", "/nested_sizes", "matryoshka prefix sizes");
  b.add<std::vector<size_t>>(a, "--hierarchy-ks", "/hierarchy_ks", "hierarchical k levels");
  b.add<double>(a, "--lr", "/adam/lr", "Adam learning rate");
  b.add<size_t>(a, "--steps", "/steps", "optimizer steps");
  b.add<size_t>(a, "--batch", "/batch_tokens", "tokens per batch");
  b.add<uint64_t>(a, "--seed", "/seed", "training seed");
  b.flag(a, "--normalize", "/normalize_inputs", "center and scale inputs");
  b.add<size_t>(a, "--normalizer-sample", "/normalizer_sample", "tokens used to fit the normalizer");
  b.add<size_t>(a, "--aux-k", "/aux_k", "dead-latent auxiliary k (0 = off)");
  b.add<double>(a, "--aux-alpha", "/aux_alpha", "auxiliary loss weight");
  b.add<size_t>(a, "--aux-dead-steps", "/aux_dead_steps", "steps without firing before a latent is dead");
  b.add<size_t>(a, "--log-every", "/log_every", "log interval (0 = final only)");
  b.add<size_t>(a, "--eval-tokens", "/eval_tokens", "held-in tokens for eval metrics");
  add_common(c);
  c.run = [&o](Command& c) {
    const std::string cfg = resolve("sae", c.binder.apply(file_config(c)));
    const json jc = json::parse(cfg);
    Corpus corpus = load_corpora(o.inputs);
    Params params;
    Normalizer norm;
    CString report;
    check(ssp_sae_train(corpus.get(), cfg.c_str(), params.out(), norm.out(), report.out()));
    check(ssp_params_save(params.get(), o.out.c_str()));
    const std::string rpath = o.report.empty() ? o.out + ".report.json" : o.report;
    write_text(rpath, report.parse().dump(2) + "\n");
    Manifest m{c.app->get_name(), jc};
    m.seed = seed_of(jc);
    m.inputs = o.inputs;
    m.outputs = {o.out, rpath};
    if (norm.get()) {
      const std::string npath = o.normalizer_out.empty() ? o.out + ".norm.json" : o.normalizer_out;
      check(ssp_normalizer_save(norm.get(), npath.c_str()));
      m.outputs.push_back(npath);
    }
    m.write(manifest_path(c, o.out));
    const json r = report.parse();
    std::cout << "rsct " << r["initial_eval_rsct"].get<double>() << " -> "
              << r["final_eval_rsct"].get<double>() << ", dead ratio "
              << r["final_dead_ratio"].get<double>() << "\n";
  };
}

struct Encode {
  std::string params, input, out, normalizer;
  size_t k_splade = 0;
};

void setup_encode(Command& c, Encode& o) {
  auto* a = c.app;
  a->add_option("--params", o.params, "SAEPRM01 parameters")->required()->check(CLI::ExistingFile);
  a->add_option("--input", o.input, "SAEEMB01 corpus")->required()->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "output SAESPV01 encodings")->required();
  a->add_option("--normalizer", o.normalizer, "normalizer JSON from sae-train --normalize")
      ->check(CLI::ExistingFile);
  a->add_option("--k-splade", o.k_splade, "per-token top-k mask (0 = none)");
  add_common(c);
  c.run = [&o](Command& c) {
    Params p;
    check(ssp_params_load(o.params.c_str(), p.out()));
    Corpus corpus;
    check(ssp_corpus_load(o.input.c_str(), corpus.out()));
    Normalizer norm;
    if (!o.normalizer.empty()) check(ssp_normalizer_load(o.normalizer.c_str(), norm.out()));
    Sparse s;
    check(ssp_encode(p.get(), corpus.get(), o.k_splade, norm.get(), s.out()));
    check(ssp_sparse_save(s.get(), o.out.c_str()));
    Manifest m{c.app->get_name(),
               {{"k_splade", o.k_splade}, {"normalized", !o.normalizer.empty()}}};
    m.inputs = {o.params, o.input};
    if (!o.normalizer.empty()) m.inputs.push_back(o.normalizer);
    m.outputs = {o.out};
    m.write(manifest_path(c, o.out));
    std::cout << "encoded " << ssp_sparse_size(s.get()) << " texts, mean nnz "
              << ssp_sparse_mean_nnz(s.get()) << "\n";
  };
}

struct Finetune {
  std::string params, queries, docs, triples, out, report, normalizer;
};

void setup_finetune(Command& c, Finetune& o) {
  auto* a = c.app;
  a->add_option("--params", o.params, "initial SAEPRM01 parameters")->required()->check(CLI::ExistingFile);
  a->add_option("--queries", o.queries, "SAEEMB01 training queries")->required()->check(CLI::ExistingFile);
  a->add_option("--docs", o.docs, "SAEEMB01 documents")->required()->check(CLI::ExistingFile);
  a->add_option("--triples", o.triples, "distillation triples JSONL")->required()->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "output SAEPRM01 parameters")->required();
  a->add_option("--report", o.report, "report JSON (default <out>.report.json)");
  a->add_option("--normalizer", o.normalizer, "normalizer JSON; implies normalized inputs")
      ->check(CLI::ExistingFile);
  auto& b = c.binder;
  b.add<size_t>(a, "--k-splade", "/k_splade", "per-token top-k mask");
  auto* no_mask = a->add_flag("--no-mask", "disable the per-token mask");
  b.custom([no_mask](json& j) {
    if (no_mask->count() > 0) j["k_splade"] = nullptr;
  });
  b.add<double>(a, "--lambda-kl", "/lambda_kl", "KL weight");
  b.add<double>(a, "--lambda-mse", "/lambda_mse", "MarginMSE weight");
  b.add<double>(a, "--lambda-flops-d", "/lambda_flops_d", "document FLOPS weight");
  b.add<double>(a, "--lambda-flops-q", "/lambda_flops_q", "query FLOPS weight");
  b.add<double>(a, "--lr", "/adam/lr", "Adam learning rate");
  b.add<size_t>(a, "--steps", "/steps", "optimizer steps");
  b.add<uint64_t>(a, "--seed", "/seed", "sampling seed");
  b.add<size_t>(a, "--batch-queries", "/batch_queries", "queries per batch");
  b.add<size_t>(a, "--negatives", "/negatives_per_query", "negatives used per query");
  b.add<size_t>(a, "--log-every", "/log_every", "log interval (0 = final only)");
  b.add<size_t>(a, "--eval-triples", "/eval_triples", "triples for logged estimates");
  add_common(c);
  c.run = [&o](Command& c) {
    json over = c.binder.apply(file_config(c));
    if (!o.normalizer.empty()) over["normalize_inputs"] = true;
    const std::string cfg = resolve("finetune", over);
    Params init;
    check(ssp_params_load(o.params.c_str(), init.out()));
    Corpus q, d;
    check(ssp_corpus_load(o.queries.c_str(), q.out()));
    check(ssp_corpus_load(o.docs.c_str(), d.out()));
    Triples t;
    check(ssp_triples_load(o.triples.c_str(), t.out()));
    Normalizer norm;
    if (!o.normalizer.empty()) check(ssp_normalizer_load(o.normalizer.c_str(), norm.out()));
    Params out;
    CString report;
    check(ssp_finetune(init.get(), q.get(), d.get(), t.get(), cfg.c_str(), norm.get(),
                       out.out(), report.out()));
    check(ssp_params_save(out.get(), o.out.c_str()));
    const std::string rpath = o.report.empty() ? o.out + ".report.json" : o.report;
    write_text(rpath, report.parse().dump(2) + "\n");
    Manifest m{c.app->get_name(), json::parse(cfg)};
    m.seed = seed_of(m.config);
    m.inputs = {o.params, o.queries, o.docs, o.triples};
    if (!o.normalizer.empty()) m.inputs.push_back(o.normalizer);
    m.outputs = {o.out, rpath};
    m.write(manifest_path(c, o.out));
    const json log = report.parse()["log"];
    if (!log.empty()) {
      const json& last = log.back();
      std::cout << "step " << last["step"] << ": loss " << last["train"]["total"]
                << ", qd_flops " << last["qd_flops"] << "\n";
    }
  };
}

struct IndexCmd {
  std::string input, out;
};

void setup_index(Command& c, IndexCmd& o) {
  auto* a = c.app;
  a->add_option("--input", o.input, "SAESPV01 document encodings")->required()->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "output SAEIDX01 index")->required();
  add_common(c);
  c.run = [&o](Command& c) {
    Sparse s;
    check(ssp_sparse_load(o.input.c_str(), s.out()));
    Index ix;
    check(ssp_index_build(s.get(), ix.out()));
    check(ssp_index_save(ix.get(), o.out.c_str()));
    CString stats;
    check(ssp_index_stats(ix.get(), stats.out()));
    Manifest m{c.app->get_name(), json::object()};
    m.inputs = {o.input};
    m.outputs = {o.out};
    m.write(manifest_path(c, o.out));
    std::cout << stats.parse().dump(2) << "\n";
  };
}

struct Search {
  std::string index, queries, out, tag = "saesplade";
  size_t cutoff = 100;
};

void setup_search(Command& c, Search& o) {
  auto* a = c.app;
  a->add_option("--index", o.index, "SAEIDX01 index")->required()->check(CLI::ExistingFile);
  a->add_option("--queries", o.queries, "SAESPV01 query encodings")->required()->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "output TREC run")->required();
  a->add_option("--cutoff", o.cutoff, "results per query")->check(CLI::PositiveNumber);
  a->add_option("--tag", o.tag, "run tag");
  add_common(c);
  c.run = [&o](Command& c) {
    Index ix;
    check(ssp_index_load(o.index.c_str(), ix.out()));
    Sparse q;
    check(ssp_sparse_load(o.queries.c_str(), q.out()));
    RunH run;
    check(ssp_search(ix.get(), q.get(), o.cutoff, run.out()));
    check(ssp_run_save(run.get(), o.out.c_str(), o.tag.c_str()));
    Manifest m{c.app->get_name(), {{"cutoff", o.cutoff}, {"tag", o.tag}}};
    m.inputs = {o.index, o.queries};
    m.outputs = {o.out};
    m.write(manifest_path(c, o.out));
    std::cout << "searched " << ssp_sparse_size(q.get()) << " queries\n";
  };
}

struct Evaluate {
  std::string run, qrels, out;
  size_t k = 10;
};

void setup_evaluate(Command& c, Evaluate& o) {
  auto* a = c.app;
  a->add_option("--run", o.run, "TREC run file")->required()->check(CLI::ExistingFile);
  a->add_option("--qrels", o.qrels, "TREC qrels file")->required()->check(CLI::ExistingFile);
  a->add_option("--k", o.k, "cutoff for MRR and nDCG")->check(CLI::PositiveNumber);
  a->add_option("--out", o.out, "metrics JSON");
  add_common(c);
  c.run = [&o](Command& c) {
    RunH run;
    check(ssp_run_load(o.run.c_str(), run.out()));
    QrelsH qrels;
    check(ssp_qrels_load(o.qrels.c_str(), qrels.out()));
    CString metrics;
    check(ssp_evaluate(run.get(), qrels.get(), o.k, metrics.out()));
    const std::string text = metrics.parse().dump(2) + "\n";
    if (!o.out.empty()) write_text(o.out, text);
    Manifest m{c.app->get_name(), {{"k", o.k}}};
    m.inputs = {o.run, o.qrels};
    if (!o.out.empty()) m.outputs = {o.out};
    m.write(manifest_path(c, o.out));
    std::cout << text;
  };
}

struct QdFlops {
  std::string queries, docs;
  size_t max_docs = 0;
  uint64_t seed = 0;
};

void setup_qdflops(Command& c, QdFlops& o) {
  auto* a = c.app;
  a->add_option("--queries", o.queries, "SAESPV01 query encodings")->required()->check(CLI::ExistingFile);
  a->add_option("--docs", o.docs, "SAESPV01 document encodings")->required()->check(CLI::ExistingFile);
  a->add_option("--max-docs", o.max_docs, "sample this many documents (0 = all)");
  a->add_option("--seed", o.seed, "sampling seed");
  add_common(c);
  c.run = [&o](Command& c) {
    Sparse q, d;
    check(ssp_sparse_load(o.queries.c_str(), q.out()));
    check(ssp_sparse_load(o.docs.c_str(), d.out()));
    double v = 0.0;
    check(ssp_qd_flops(q.get(), d.get(), o.max_docs, o.seed, &v));
    Manifest m{c.app->get_name(), {{"max_docs", o.max_docs}, {"seed", o.seed}}};
    m.seed = o.seed;
    m.inputs = {o.queries, o.docs};
    m.write(manifest_path(c, ""));
    std::cout << fmt(v, 6) << "\n";
  };
}

struct E2 {
  double mrr = 0.0, qdflops = 0.0;
  double baseline_mrr = 0.183, baseline_qdflops = 0.13;
  bool raw = false;
  int precision = 1;
};

void setup_e2(Command& c, E2& o) {
  auto* a = c.app;
  a->add_option("--mrr", o.mrr, "model MRR@10")->required();
  a->add_option("--qdflops", o.qdflops, "model QD-FLOPs")->required();
  a->add_option("--baseline-mrr", o.baseline_mrr, "baseline MRR@10 (BM25 by default)");
  a->add_option("--baseline-qdflops", o.baseline_qdflops, "baseline QD-FLOPs (BM25 by default)");
  a->add_flag("--raw", o.raw, "print E2 itself instead of 100 * (E2 - E2_baseline)");
  a->add_option("--precision", o.precision, "decimal places")->check(CLI::Range(0, 17));
  auto& b = c.binder;
  b.add<double>(a, "--mu1", "/mu1", "cost slope below tau");
  b.add<double>(a, "--mu2", "/mu2", "cost slope above tau");
  b.add<double>(a, "--tau", "/tau", "cost threshold");
  b.add<double>(a, "--beta", "/beta", "softplus sharpness");
  add_common(c);
  c.run = [&o](Command& c) {
    const std::string cfg = resolve("e2", c.binder.apply(file_config(c)));
    double v = 0.0;
    if (o.raw) {
      check(ssp_e2(o.mrr, o.qdflops, cfg.c_str(), &v));
    } else {
      check(ssp_delta_e2(o.mrr, o.qdflops, o.baseline_mrr, o.baseline_qdflops,
                         cfg.c_str(), &v));
    }
    json jc = json::parse(cfg);
    jc["mrr"] = o.mrr;
    jc["qdflops"] = o.qdflops;
    if (!o.raw) {
      jc["baseline_mrr"] = o.baseline_mrr;
      jc["baseline_qdflops"] = o.baseline_qdflops;
    }
    Manifest m{c.app->get_name(), jc};
    m.write(manifest_path(c, ""));
    std::cout << fmt(v, o.precision) << "\n";
  };
}

// "none" (or 0) means no mask.
std::optional<size_t> parse_mask(const std::string& s) {
  if (s == "none" || s == "0") return std::nullopt;
  size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-') usage_error("bad --k-splade value '" + s + "'");
  return static_cast<size_t>(v);
}

struct Sweep {
  std::string grid, csv, svg, out;
  std::vector<size_t> k_sae;
  std::vector<std::string> k_splade;
  std::vector<double> multipliers;
};

void setup_sweep(Command& c, Sweep& o) {
  auto* a = c.app;
  a->add_option("--grid", o.grid, "grid JSON [{k_sae, k_splade, flops_multiplier}]")
      ->check(CLI::ExistingFile);
  a->add_option("--k-sae", o.k_sae, "grid axis: SAE training k");
  a->add_option("--k-splade", o.k_splade, "grid axis: encoding k ('none' = no mask)");
  a->add_option("--flops-mult", o.multipliers, "grid axis: FLOPS weight multiplier");
  a->add_option("--csv", o.csv, "output CSV")->required();
  a->add_option("--svg", o.svg, "optional SVG scatter of MRR vs QD-FLOPs");
  a->add_option("--out", o.out, "rows as JSON");
  auto& b = c.binder;
  auto* seed = a->add_option("--seed", "seed for task, SAE and fine-tuning");
  b.custom([seed](json& j) {
    if (seed->count() == 0) return;
    const uint64_t s = seed->as<uint64_t>();
    j["task"]["seed"] = s;
    j["sae"]["seed"] = s;
    j["ir"]["seed"] = s;
  });
  b.add<size_t>(a, "--latents", "/sae/latents", "dictionary size M");
  b.add<size_t>(a, "--sae-steps", "/sae/steps", "SAE training steps");
  b.add<size_t>(a, "--ir-steps", "/ir/steps", "fine-tuning steps");
  b.add<double>(a, "--sae-lr", "/sae/adam/lr", "SAE learning rate");
  b.add<double>(a, "--ir-lr", "/ir/adam/lr", "fine-tuning learning rate");
  add_common(c);
  c.run = [&o](Command& c) {
    const std::string cfg = resolve("pipeline", c.binder.apply(file_config(c)));
    json grid = json::array();
    if (!o.grid.empty()) {
      if (!o.k_sae.empty() || !o.k_splade.empty() || !o.multipliers.empty()) {
        usage_error("--grid cannot be combined with --k-sae/--k-splade/--flops-mult");
      }
      grid = read_json_file(o.grid);
    } else {
      const json jc = json::parse(cfg);
      std::vector<size_t> ks = o.k_sae;
      if (ks.empty()) ks = {jc["sae"]["k_sae"].get<size_t>()};
      std::vector<json> masks;
      for (const auto& s : o.k_splade) {
        const auto m = parse_mask(s);
        masks.push_back(m ? json(*m) : json(nullptr));
      }
      if (masks.empty()) masks.push_back(jc["ir"]["k_splade"]);
      std::vector<double> mults = o.multipliers;
      if (mults.empty()) mults = {1.0};
      for (size_t k : ks) {
        for (const auto& m : masks) {
          for (double f : mults) grid.push_back({{"k_sae", k}, {"k_splade", m}, {"flops_multiplier", f}});
        }
      }
    }
    CString rows, csv, svg;
    check(ssp_sweep(cfg.c_str(), grid.dump().c_str(), rows.out(), csv.out(),
                    o.svg.empty() ? nullptr : svg.out()));
    write_text(o.csv, csv.str());
    Manifest m{c.app->get_name(), {{"pipeline", json::parse(cfg)}, {"grid", grid}}};
    m.seed = seed_of(m.config, "/pipeline/task/seed");
    m.outputs = {o.csv};
    if (!o.svg.empty()) {
      write_text(o.svg, svg.str());
      m.outputs.push_back(o.svg);
    }
    if (!o.out.empty()) {
      write_text(o.out, rows.parse().dump(2) + "\n");
      m.outputs.push_back(o.out);
    }
    m.write(manifest_path(c, o.csv));
    std::cout << csv.str();
  };
}

struct Anisotropy {
  std::string input, out;
  size_t pairs = 10000;
  uint64_t seed = 0;
};

void setup_anisotropy(Command& c, Anisotropy& o) {
  auto* a = c.app;
  a->add_option("--input", o.input, "SAEEMB01 token embeddings")->required()->check(CLI::ExistingFile);
  a->add_option("--pairs", o.pairs, "random token pairs")->check(CLI::PositiveNumber);
  a->add_option("--seed", o.seed, "sampling seed");
  a->add_option("--out", o.out, "result JSON");
  add_common(c);
  c.run = [&o](Command& c) {
    Corpus corpus;
    check(ssp_corpus_load(o.input.c_str(), corpus.out()));
    double v = 0.0;
    check(ssp_anisotropy(corpus.get(), o.pairs, o.seed, &v));
    if (!o.out.empty()) {
      write_text(o.out, json{{"anisotropy", v}, {"pairs", o.pairs}, {"seed", o.seed}}.dump(2) + "\n");
    }
    Manifest m{c.app->get_name(), {{"pairs", o.pairs}, {"seed", o.seed}}};
    m.seed = o.seed;
    m.inputs = {o.input};
    if (!o.out.empty()) m.outputs = {o.out};
    m.write(manifest_path(c, o.out));
    std::cout << fmt(v, 6) << "\n";
  };
}

struct Cooc {
  std::string corpus, encodings, vocab, out;
  size_t max_tokens = 12;
};

std::string term_name(const json& vocab, uint32_t id) {
  const auto key = std::to_string(id);
  if (vocab.is_object() && vocab.contains(key)) return vocab[key].get<std::string>();
  return "#" + key;
}

void setup_cooc(Command& c, Cooc& o) {
  auto* a = c.app;
  a->add_option("--corpus", o.corpus, "SAEEMB01 corpus with token ids")->required()->check(CLI::ExistingFile);
  a->add_option("--encodings", o.encodings, "SAESPV01 encodings of the same documents")
      ->required()->check(CLI::ExistingFile);
  a->add_option("--vocab", o.vocab, "token-id -> term JSON from toy-embed")->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "result JSON");
  a->add_option("--max-tokens", o.max_tokens, "tokens listed per latent in the table");
  auto& b = c.binder;
  b.add<size_t>(a, "--min-count", "/min_count", "minimum document count");
  b.add<double>(a, "--floor", "/prob_floor", "conditional probability floor");
  b.add<double>(a, "--confidence", "/confidence", "binomial test confidence");
  add_common(c);
  c.run = [&o](Command& c) {
    const std::string cfg = resolve("cooccurrence", c.binder.apply(file_config(c)));
    Corpus corpus;
    check(ssp_corpus_load(o.corpus.c_str(), corpus.out()));
    Sparse enc;
    check(ssp_sparse_load(o.encodings.c_str(), enc.out()));
    CString result;
    check(ssp_analyze_cooccurrence(corpus.get(), enc.get(), cfg.c_str(), result.out()));
    const json r = result.parse();
    const json vocab = o.vocab.empty() ? json::object() : read_json_file(o.vocab);
    if (!o.out.empty()) write_text(o.out, r.dump(2) + "\n");
    Manifest m{c.app->get_name(), json::parse(cfg)};
    m.inputs = {o.corpus, o.encodings};
    if (!o.vocab.empty()) m.inputs.push_back(o.vocab);
    if (!o.out.empty()) m.outputs = {o.out};
    m.write(manifest_path(c, o.out));

    // Human-readable view: significant tokens per latent, strongest first.
    std::map<uint32_t, std::vector<const json*>> by_latent;
    for (const auto& p : r["significant"]) by_latent[p["latent"].get<uint32_t>()].push_back(&p);
    const auto& st = r["stats"];
    std::cout << st["total_docs"] << " docs, " << r["pairs"].size() << " pairs above floor, "
              << r["significant"].size() << " significant\n";
    std::cout << "latent\tlabel\ttokens (P(l|t), P(t|l))\n";
    for (auto& [latent, pairs] : by_latent) {
      std::stable_sort(pairs.begin(), pairs.end(), [](const json* x, const json* y) {
        return (*x)["p_t_given_l"].get<double>() > (*y)["p_t_given_l"].get<double>();
      });
      std::map<std::string, int> labels;
      for (const auto* p : pairs) ++labels[(*p)["label"].get<std::string>()];
      std::string label;
      int best = -1;
      for (const auto& [l, n] : labels) {
        if (n > best) best = n, label = l;
      }
      std::cout << latent << "\t" << label << "\t";
      for (size_t i = 0; i < pairs.size() && i < o.max_tokens; ++i) {
        const json& p = *pairs[i];
        std::cout << (i ? ", " : "") << term_name(vocab, p["token"].get<uint32_t>()) << " ("
                  << fmt(p["p_l_given_t"].get<double>(), 2) << ", "
                  << fmt(p["p_t_given_l"].get<double>(), 2) << ")";
      }
      if (pairs.size() > o.max_tokens) std::cout << ", ...";
      std::cout << "\n";
    }
  };
}

struct Multilingual {
  std::vector<std::string> inputs;
  std::string out;
};

void setup_multilingual(Command& c, Multilingual& o) {
  auto* a = c.app;
  a->add_option("--input", o.inputs, "SAESPV01 encodings, one file per language")
      ->required()->check(CLI::ExistingFile);
  a->add_option("--out", o.out, "result JSON");
  add_common(c);
  c.run = [&o](Command& c) {
    std::vector<Sparse> langs(o.inputs.size());
    std::vector<const ssp_sparse*> ptrs;
    for (size_t i = 0; i < o.inputs.size(); ++i) {
      check(ssp_sparse_load(o.inputs[i].c_str(), langs[i].out()));
      ptrs.push_back(langs[i].get());
    }
    CString result;
    check(ssp_multilingual_overlap(ptrs.data(), ptrs.size(), result.out()));
    const std::string text = result.parse().dump(2) + "\n";
    if (!o.out.empty()) write_text(o.out, text);
    Manifest m{c.app->get_name(), {{"languages", o.inputs.size()}}};
    m.inputs = o.inputs;
    if (!o.out.empty()) m.outputs = {o.out};
    m.write(manifest_path(c, o.out));
    std::cout << text;
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"saesplade: sparse-autoencoder learned sparse retrieval toolkit"};
  app.set_version_flag("--version", std::string(ssp_version()));
  app.set_config("--config", "", "TOML/INI config file; options go in [<subcommand>] sections");
  app.require_subcommand(1, 1);
  app.fallthrough(false);

  GenSynth gen_synth;
  ToyEmbed toy_embed;
  SaeTrain sae_train;
  Encode encode;
  Finetune finetune;
  IndexCmd index;
  Search search;
  Evaluate evaluate;
  QdFlops qdflops;
  E2 e2;
  Sweep sweep;
  Anisotropy anisotropy;
  Cooc cooc;
  Multilingual multilingual;

  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](const char* name, const char* help, auto setup, auto& opts) {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    setup(*c, opts);
    commands.push_back(std::move(c));
  };
  add("gen-synth", "generate a synthetic dictionary corpus or relevance task", setup_gen_synth, gen_synth);
  add("toy-embed", "embed a JSONL text corpus with the contextual toy encoder", setup_toy_embed, toy_embed);
  add("sae-train", "train a sparse autoencoder on token embeddings", setup_sae_train, sae_train);
  add("encode", "encode texts into sparse latent vectors", setup_encode, encode);
  add("finetune", "fine-tune the encoder with distillation and FLOPS losses", setup_finetune, finetune);
  add("index", "build an inverted index from document encodings", setup_index, index);
  add("search", "exact top-k retrieval for encoded queries", setup_search, search);
  add("evaluate", "MRR@k, nDCG@k and success@5 of a run", setup_evaluate, evaluate);
  add("qdflops", "expected query-document shared support", setup_qdflops, qdflops);
  add("e2", "efficiency-effectiveness score (delta to a baseline by default)", setup_e2, e2);
  add("sweep", "grid over k_sae, k_splade and FLOPS weight on the synthetic task", setup_sweep, sweep);
  add("analyze-anisotropy", "mean cosine of random token-embedding pairs", setup_anisotropy, anisotropy);
  add("analyze-cooc", "token-latent co-occurrence labels and significance", setup_cooc, cooc);
  add("analyze-multilingual", "latent overlap across translations", setup_multilingual, multilingual);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "saesplade: error: " << e.what() << "\n";
    return 64;
  }

  for (auto& c : commands) {
    if (!c->app->parsed()) continue;
    try {
      c->run(*c);
      return 0;
    } catch (const Failure& f) {
      std::cerr << "saesplade " << c->app->get_name() << ": " << f.what() << "\n";
      return static_cast<int>(f.status);
    } catch (const std::exception& e) {
      std::cerr << "saesplade " << c->app->get_name() << ": internal: " << e.what() << "\n";
      return static_cast<int>(SSP_ERR_INTERNAL);
    }
  }
  return 0;
}
