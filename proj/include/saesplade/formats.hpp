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

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "saesplade/core.hpp"
#include "saesplade/embed.hpp"
#include "saesplade/index.hpp"
#include "saesplade/retrieval_types.hpp"
#include "saesplade/sae.hpp"

// On-disk formats. Binary formats are little-endian with u32 lengths and
// IEEE-754 single-precision reals:
//
//   SAEEMB01  u32 d; records { u32 id_len, id, u32 N, u8 has_ids,
//             [N x u32 token_id], N*d x f32 }
//   SAEPRM01  u32 d, u32 M, W_enc (M x d row-major), b_enc, W_dec (d x M
//             column-major), b_dec
//   SAESPV01  u32 M; records { u32 id_len, id, u32 nnz, nnz x (u32, f32) }
//   SAEIDX01  u32 M, u32 num_docs, doc table { u32 id_len, id, u32 nnz },
//             M posting lists { u32 count, count x (u32 ordinal, f32) }
//
// Readers throw FormatError with the byte offset of the offending field.
// Writers go through a temporary file and a rename.

namespace saesplade {

inline constexpr char kEmbeddingMagic[] = "SAEEMB01";
inline constexpr char kParamsMagic[] = "SAEPRM01";
inline constexpr char kSparseMagic[] = "SAESPV01";
inline constexpr char kIndexMagic[] = "SAEIDX01";

// Writes `bytes` to path.tmp and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

// Streaming SAEEMB01 reader: one record in memory at a time.
class EmbeddingReader {
 public:
  explicit EmbeddingReader(const std::string& path);

  size_t dim() const noexcept { return dim_; }
  // nullopt at a clean end of file.
  std::optional<TokenEmbeddingSequence> next();

 private:
  std::ifstream in_;
  std::string path_;
  size_t dim_ = 0;
  uint64_t offset_ = 0;
};

EmbeddingCorpus load_embeddings(const std::string& path);
std::string encode_embeddings(const EmbeddingCorpus& corpus);
void save_embeddings(const EmbeddingCorpus& corpus, const std::string& path);
EmbeddingCorpus decode_embeddings(const std::string& bytes);

std::string encode_params(const SaeParams& p);
SaeParams decode_params(const std::string& bytes);
SaeParams load_params(const std::string& path);
void save_params(const SaeParams& p, const std::string& path);

struct SparseRecord {
  std::string doc_id;
  SparseVector vector;

  friend bool operator==(const SparseRecord&, const SparseRecord&) = default;
};

struct SparseCollection {
  uint32_t vocab_size = 0;
  std::vector<SparseRecord> records;

  std::vector<std::string> ids() const;
  std::vector<SparseVector> vectors() const;
  friend bool operator==(const SparseCollection&,
                         const SparseCollection&) = default;
};

std::string encode_sparse(const SparseCollection& c);
SparseCollection decode_sparse(const std::string& bytes);
SparseCollection load_sparse(const std::string& path);
void save_sparse(const SparseCollection& c, const std::string& path);

std::string encode_index(const InvertedIndex& ix);
InvertedIndex decode_index(const std::string& bytes);
InvertedIndex load_index(const std::string& path);
void save_index(const InvertedIndex& ix, const std::string& path);

// Line-delimited JSON {"query_id","pos_id","neg_ids","teacher_scores"}.
std::vector<Triple> load_triples(const std::string& path);
void save_triples(std::span<const Triple> triples, const std::string& path);

// Line-delimited JSON {"id","text"}.
std::vector<std::pair<std::string, std::string>> load_text_corpus(
    const std::string& path);

// TREC: "qid Q0 docid rank score tag" and "qid 0 docid grade".
Run load_run(const std::string& path);
void save_run(const Run& run, const std::string& path,
              const std::string& tag = "saesplade");
Qrels load_qrels(const std::string& path);
void save_qrels(const Qrels& qrels, const std::string& path);

InputNormalizer load_normalizer(const std::string& path);
void save_normalizer(const InputNormalizer& n, const std::string& path);

}  // namespace saesplade
