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


// Drives the saesplade executable as a subprocess.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"

#ifndef SAESPLADE_CLI
#error "SAESPLADE_CLI must name the CLI binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int status = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() /
          ("ssp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  static inline int counter = 0;

  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name, std::ios::binary) << text;
  }
  std::string read(const std::string& name) const { return slurp(dir / name); }
  json read_json(const std::string& name) const { return json::parse(read(name)); }

  // Runs the CLI with `args` inside the sandbox directory.
  Result run(const std::string& args) const {
    const std::string cmd = "cd '" + dir.string() + "' && '" SAESPLADE_CLI "' " + args +
                            " >stdout.txt 2>stderr.txt";
    Result r;
    const int raw = std::system(cmd.c_str());
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read("stdout.txt");
    r.err = read("stderr.txt");
    return r;
  }
};

size_t lines(const std::string& s) {
  size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("e2 prints the delta to the BM25 baseline") {
  Sandbox s;
  auto r = s.run("e2 --mrr 0.387 --qdflops 1.40 --baseline-mrr 0.183 --baseline-qdflops 0.13");
  CHECK(r.status == 0);
  CHECK(r.out == "19.1\n");
  r = s.run("e2 --mrr 0.387 --qdflops 1.40 --precision 3");
  CHECK(r.out == "19.127\n");
  const json m = s.read_json("e2.manifest.json");
  CHECK(m["command"] == "e2");
  CHECK(m["config"]["beta"] == 2.0);
  CHECK(m["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("evaluate a hand-written two-query run") {
  Sandbox s;
  s.write("run.trec", "q1 Q0 d3 1 9.0 t\nq1 Q0 d1 2 8.0 t\nq2 Q0 d2 1 5.0 t\n");
  s.write("qrels.txt", "q1 0 d1 1\nq2 0 d2 1\nq2 0 d7 0\n");
  const auto r = s.run("evaluate --run run.trec --qrels qrels.txt --out m.json");
  REQUIRE(r.status == 0);
  const json j = s.read_json("m.json");
  CHECK(j["mrr_at_k"].get<double>() == doctest::Approx(0.75));
  CHECK(j["queries"] == 2);
  const json m = s.read_json("m.json.manifest.json");
  REQUIRE(m["inputs"].size() == 2);
  CHECK(m["inputs"][0]["path"] == "run.trec");
  CHECK(m["inputs"][0]["bytes"] == s.read("run.trec").size());
}

TEST_CASE("sae-train smoke run on the synthetic quickstart") {
  Sandbox s;
  REQUIRE(s.run("gen-synth --out syn.emb --seed 1").status == 0);
  CHECK(fs::exists(s.path("syn.emb.truth.json")));
  const auto r = s.run("sae-train --input syn.emb --out sae.prm --latents 8 --k 1 --steps 50 --seed 1");
  REQUIRE(r.status == 0);
  CHECK(s.read("sae.prm").rfind("SAEPRM01", 0) == 0);
  const json rep = s.read_json("sae.prm.report.json");
  CHECK(rep.contains("final_eval_rsct"));
  const json m = s.read_json("sae.prm.manifest.json");
  CHECK(m["seed"] == 1);
  CHECK(m["config"]["latents"] == 8);
  CHECK(m["inputs"][0]["path"] == "syn.emb");

  // Same config and seed: identical bytes.
  REQUIRE(s.run("sae-train --input syn.emb --out again.prm --latents 8 --k 1 --steps 50 --seed 1")
              .status == 0);
  CHECK(s.read("sae.prm") == s.read("again.prm"));
}

TEST_CASE("manifest config hash tracks semantic config only") {
  Sandbox s;
  REQUIRE(s.run("gen-synth --out syn.emb --seed 2").status == 0);
  auto hash = [&](const std::string& flags, const std::string& out) {
    const auto r = s.run("sae-train --input syn.emb --out " + out +
                         " --latents 8 --steps 3 --log-every 0 " + flags);
    REQUIRE_MESSAGE(r.status == 0, r.err);
    return s.read_json(out + ".manifest.json")["config_hash"].get<std::string>();
  };
  const auto base = hash("", "a.prm");
  CHECK(hash("", "b.prm") == base);                   // output path is not config
  CHECK(hash("--k 8", "c.prm") == base);              // explicit default
  CHECK(hash("--lr 0.001", "d.prm") == base);         // default Adam lr
  CHECK(hash("--k 4", "e.prm") != base);
  CHECK(hash("--seed 9", "f.prm") != base);
  CHECK(hash("--lr 0.002", "g.prm") != base);
  CHECK(hash("--aux-k 2", "h.prm") != base);
}

TEST_CASE("config file sections with flag overrides") {
  Sandbox s;
  REQUIRE(s.run("gen-synth --out syn.emb --seed 3").status == 0);
  s.write("exp.toml",
          "[sae-train]\nlatents = 12\nk = 2\nsteps = 4\nseed = 5\n");
  auto r = s.run("--config exp.toml sae-train --input syn.emb --out a.prm --k 3");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  json m = s.read_json("a.prm.manifest.json");
  CHECK(m["config"]["latents"] == 12);
  CHECK(m["config"]["k_sae"] == 3);  // flag wins
  CHECK(m["seed"] == 5);

  s.write("sae.json", "{\"latents\": 10, \"steps\": 4, \"adam\": {\"lr\": 0.01}}");
  r = s.run("sae-train --input syn.emb --out b.prm --config-json sae.json --latents 11");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  m = s.read_json("b.prm.manifest.json");
  CHECK(m["config"]["latents"] == 11);
  CHECK(m["config"]["adam"]["lr"] == 0.01);

  s.write("typo.json", "{\"latens\": 10}");
  r = s.run("sae-train --input syn.emb --out c.prm --config-json typo.json");
  CHECK(r.status == 1);
  CHECK(r.err.find("latens") != std::string::npos);
}

TEST_CASE("errors give one line and a nonzero exit") {
  Sandbox s;
  auto r = s.run("sae-train --input syn.emb --out x.prm --bogus");
  CHECK(r.status != 0);
  CHECK(lines(r.err) == 1);
  r = s.run("encode --params missing.prm --input missing.emb --out x.spv");
  CHECK(r.status != 0);
  CHECK(lines(r.err) == 1);
  r = s.run("frobnicate");
  CHECK(r.status != 0);
  CHECK(lines(r.err) == 1);
  s.write("bad.emb", "SAEEMB01\x01");
  r = s.run("analyze-anisotropy --input bad.emb");
  CHECK(r.status == 3);  // format
  CHECK(lines(r.err) == 1);
  CHECK(r.err.find("format") != std::string::npos);
  r = s.run("gen-synth --out x.emb --topics 4");  // relevance-only field
  CHECK(r.status == 1);
  CHECK(lines(r.err) == 1);
  r = s.run("");
  CHECK(r.status != 0);
}

TEST_CASE("text pipeline with analyses") {
  Sandbox s;
  std::string jsonl;
  const char* texts[] = {"the cat sat on the mat", "a dog sat on the log",
                         "the cat chased the dog", "sparse retrieval with latents",
                         "dense retrieval with vectors", "the mat and the log"};
  for (int i = 0; i < 6; ++i) {
    jsonl += "{\"id\": \"d" + std::to_string(i) + "\", \"text\": \"" + texts[i] + "\"}\n";
  }
  s.write("docs.jsonl", jsonl);
  REQUIRE(s.run("toy-embed --input docs.jsonl --out docs.emb --dim 16 --window 1").status == 0);
  CHECK(s.read_json("docs.emb.vocab.json").size() == 16);
  REQUIRE(s.run("sae-train --input docs.emb --out sae.prm --latents 24 --k 2 --steps 100 "
                "--batch 16 --normalize")
              .status == 0);
  REQUIRE(fs::exists(s.path("sae.prm.norm.json")));
  REQUIRE(s.run("encode --params sae.prm --input docs.emb --out docs.spv --k-splade 2 "
                "--normalizer sae.prm.norm.json")
              .status == 0);
  auto r = s.run("index --input docs.spv --out docs.idx");
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["num_docs"] == 6);
  REQUIRE(s.run("search --index docs.idx --queries docs.spv --out run.trec --cutoff 3").status == 0);
  s.write("self.qrels", "d0 0 d0 1\nd1 0 d1 1\nd2 0 d2 1\nd3 0 d3 1\nd4 0 d4 1\nd5 0 d5 1\n");
  r = s.run("evaluate --run run.trec --qrels self.qrels");
  REQUIRE(r.status == 0);
  // A document is its own best match unless it ties with an earlier one.
  CHECK(json::parse(r.out)["mrr_at_k"].get<double>() > 0.5);

  r = s.run("qdflops --queries docs.spv --docs docs.spv");
  REQUIRE(r.status == 0);
  CHECK(std::stod(r.out) > 0.0);

  r = s.run("analyze-anisotropy --input docs.emb --pairs 200 --seed 1 --out aniso.json");
  REQUIRE(r.status == 0);
  const double a = s.read_json("aniso.json")["anisotropy"].get<double>();
  CHECK(a > -1.0);
  CHECK(a < 1.0);

  r = s.run("analyze-cooc --corpus docs.emb --encodings docs.spv --vocab docs.emb.vocab.json "
            "--min-count 1 --confidence 0.5 --out cooc.json");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const json c = s.read_json("cooc.json");
  CHECK(c["stats"]["total_docs"] == 6);
  CHECK(r.out.find("latent\tlabel") != std::string::npos);
  // Terms, not raw ids, appear in the table when a vocabulary is given.
  if (!c["significant"].empty()) CHECK(r.out.find('#') == std::string::npos);

  r = s.run("analyze-multilingual --input docs.spv --input docs.spv");
  REQUIRE(r.status == 0);
  const json m = json::parse(r.out);
  CHECK(m["documents"] == 6);
  CHECK(m["mean_overlap"].get<double>() == doctest::Approx(m["mean_doc_len"].get<double>()));
}

TEST_CASE("relevance task, fine-tuning and a small sweep") {
  Sandbox s;
  const std::string task =
      "gen-synth --task relevance --out-dir task --docs 40 --train-queries 30 "
      "--test-queries 10 --topics 12 --dim 16 --seed 4";
  REQUIRE(s.run(task).status == 0);
  for (const char* f : {"docs.emb", "train_queries.emb", "test_queries.emb",
                        "train.triples.jsonl", "train.qrels", "test.qrels"}) {
    CHECK(fs::exists(s.dir / "task" / f));
  }
  REQUIRE(s.run("sae-train --input task/docs.emb --input task/train_queries.emb --out sae.prm "
                "--latents 24 --k 1 --steps 100 --seed 4")
              .status == 0);
  auto r = s.run("finetune --params sae.prm --queries task/train_queries.emb --docs task/docs.emb "
                 "--triples task/train.triples.jsonl --out ft.prm --steps 10 --seed 4 --no-mask");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(s.read_json("ft.prm.manifest.json")["config"]["k_splade"].is_null());

  r = s.run("sweep --csv sweep.csv --svg sweep.svg --out rows.json --k-sae 1 --k-splade 2 "
            "--k-splade none --seed 4 --latents 16 --sae-steps 20 --ir-steps 2 "
            "--config-json pipe.json");
  CHECK(r.status != 0);  // pipe.json does not exist yet
  s.write("pipe.json",
          "{\"task\": {\"docs\": 40, \"train_queries\": 30, \"test_queries\": 10, \"topics\": 12, "
          "\"dim\": 16}}");
  r = s.run("sweep --csv sweep.csv --svg sweep.svg --out rows.json --k-sae 1 --k-splade 2 "
            "--k-splade none --seed 4 --latents 16 --sae-steps 20 --ir-steps 2 "
            "--config-json pipe.json");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const std::string csv = s.read("sweep.csv");
  CHECK(lines(csv) == 3);
  CHECK(csv.find(",none,") == std::string::npos);
  const json rows = s.read_json("rows.json");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1]["k_splade"].is_null());
  CHECK(s.read("sweep.svg").find("<svg") != std::string::npos);
  CHECK(s.read_json("sweep.csv.manifest.json")["seed"] == 4);

  s.write("grid.json", "[{\"k_sae\": 1, \"k_splade\": 2, \"flops_multiplier\": 4}]");
  r = s.run("sweep --csv g.csv --grid grid.json --seed 4 --latents 16 --sae-steps 20 "
            "--ir-steps 2 --config-json pipe.json");
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(lines(s.read("g.csv")) == 2);
  r = s.run("sweep --csv g.csv --grid grid.json --k-sae 2 --config-json pipe.json");
  CHECK(r.status != 0);
}
