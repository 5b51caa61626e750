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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "doctest.h"
#include "saesplade/error.hpp"
#include "saesplade/formats.hpp"
#include "support.hpp"

using namespace saesplade;
namespace fs = std::filesystem;

namespace {

void put_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f32(std::string& s, float f) {
  uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32(s, v);
}

std::string emb_header(uint32_t d) {
  std::string s = "SAEEMB01";
  put_u32(s, d);
  return s;
}

fs::path tmp_dir() {
  auto p = fs::temp_directory_path() / ("saesplade_fmt_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("formats") {
TEST_CASE("embedding decoding examples") {
  std::string one = emb_header(4);
  put_u32(one, 1);
  one += "x";
  put_u32(one, 2);
  one.push_back(0);
  for (int i = 0; i < 8; ++i) put_f32(one, 0.5f * i);
  const auto c = decode_embeddings(one);
  CHECK(c.size() == 1);
  CHECK(c[0].size() == 2);
  CHECK(c[0].token(1)[3] == 3.5);

  const auto empty = decode_embeddings(emb_header(8));
  CHECK(empty.empty());
  CHECK(empty.dim() == 8);

  std::string bad = emb_header(4);
  put_u32(bad, 1);
  bad += "x";
  put_u32(bad, 1);
  bad.push_back(0);
  for (int i = 0; i < 3; ++i) put_f32(bad, 1.0f);
  CHECK_THROWS_AS(decode_embeddings(bad), FormatError);
  try {
    decode_embeddings(bad);
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_embeddings("SAEXXX01aaaa"), FormatError);
}

TEST_CASE("streaming reader matches the bulk decoder") {
  const auto dir = tmp_dir();
  SyntheticSpec spec{6, 4, 1, 0.1, 7, 3, 2};
  auto data = generate_synthetic(spec);
  const auto path = (dir / "s.emb").string();
  save_embeddings(data.corpus, path);
  EmbeddingReader r(path);
  CHECK(r.dim() == 6);
  size_t n = 0;
  while (auto seq = r.next()) {
    CHECK(seq->doc_id() == load_embeddings(path)[n].doc_id());
    ++n;
  }
  CHECK(n == 7);
  CHECK_THROWS_AS(load_embeddings((dir / "nope").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("binary formats round-trip byte-exactly") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    // Params: values already representable in single precision.
    SaeParams p(1 + rng() % 4, 1 + rng() % 5);
    for (auto b : p.blocks()) {
      for (auto& x : b) x = static_cast<float>(testing::uniform_vec(rng, 1)[0]);
    }
    const auto bytes = encode_params(p);
    CHECK(decode_params(bytes) == p);
    CHECK(encode_params(decode_params(bytes)) == bytes);

    SparseCollection sc{16, {}};
    for (int i = 0; i < 3; ++i) {
      std::vector<SparseEntry> e;
      for (uint32_t j = 0; j < 16; ++j) {
        if (rng() % 4 == 0) e.push_back({j, static_cast<float>(0.1 + (rng() % 100) / 10.0)});
      }
      sc.records.push_back({"doc" + std::to_string(i), SparseVector::from_entries(16, e)});
    }
    const auto sb = encode_sparse(sc);
    CHECK(decode_sparse(sb) == sc);
    CHECK(encode_sparse(decode_sparse(sb)) == sb);

    const auto ix = build_index(sc.ids(), sc.vectors(), 16);
    const auto ib = encode_index(ix);
    CHECK(decode_index(ib) == ix);
    CHECK(encode_index(decode_index(ib)) == ib);
  }
}

TEST_CASE("text formats") {
  const auto dir = tmp_dir();
  std::vector<Triple> triples{{"q1", "d1", {"d2", "d3"}, {3.0, 1.0, 0.5}}};
  save_triples(triples, (dir / "t.jsonl").string());
  const auto back = load_triples((dir / "t.jsonl").string());
  REQUIRE(back.size() == 1);
  CHECK(back[0].neg_ids == triples[0].neg_ids);
  CHECK(back[0].teacher_scores == triples[0].teacher_scores);

  Run run{{"q1", {{"d1", 2.0}, {"d2", 1.0}}}};
  save_run(run, (dir / "r.trec").string());
  const auto rb = load_run((dir / "r.trec").string());
  CHECK(rb.at("q1").size() == 2);
  CHECK(rb.at("q1")[0].doc_id == "d1");

  Qrels qr{{"q1", {{"d1", 1}, {"d9", 0}}}};
  save_qrels(qr, (dir / "q.trec").string());
  CHECK(load_qrels((dir / "q.trec").string()) == qr);

  {
    std::ofstream f(dir / "bad.jsonl");
    f << "{\"query_id\": \"q\", \"pos_id\": 3}\n";
  }
  CHECK_THROWS_AS(load_triples((dir / "bad.jsonl").string()), FormatError);

  InputNormalizer n{{0.25, -1.5}, 2.0};
  save_normalizer(n, (dir / "n.json").string());
  CHECK(load_normalizer((dir / "n.json").string()) == n);
  fs::remove_all(dir);
}
}
