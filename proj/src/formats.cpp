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

#include "saesplade/formats.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace saesplade {

namespace {

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, double v) {
  put_u32(out, std::bit_cast<uint32_t>(static_cast<float>(v)));
}

void put_str(std::string& out, const std::string& s) {
  if (s.size() > UINT32_MAX) throw InvalidArgument("string too long to encode");
  put_u32(out, static_cast<uint32_t>(s.size()));
  out += s;
}

uint32_t checked_u32(size_t n, const char* what) {
  if (n > UINT32_MAX) throw InvalidArgument(std::string(what) + " exceeds u32");
  return static_cast<uint32_t>(n);
}

// Bounds-checked little-endian cursor over an in-memory file.
class Cursor {
 public:
  Cursor(const std::string& bytes, const char* format, uint64_t base = 0)
      : bytes_(bytes), format_(format), base_(base) {}

  uint64_t offset() const noexcept { return pos_; }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

  void expect_magic(const char* magic) {
    need(8, "magic");
    if (std::memcmp(bytes_.data(), magic, 8) != 0) {
      fail(0, "bad magic (expected " + std::string(magic, 8) + ")");
    }
    pos_ = 8;
  }

  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<uint8_t>(bytes_[pos_++]);
  }

  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

  std::string str(const char* what) {
    const uint64_t at = pos_;
    const uint32_t n = u32(what);
    if (bytes_.size() - pos_ < n) fail(at, std::string("truncated ") + what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void need(uint64_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      fail(pos_, std::string("truncated ") + what + " (need " +
                     std::to_string(n) + " bytes, have " +
                     std::to_string(bytes_.size() - pos_) + ")");
    }
  }

  [[noreturn]] void fail(uint64_t at, const std::string& msg) const {
    throw FormatError(std::string(format_) + " at byte offset " +
                      std::to_string(base_ + at) + ": " + msg);
  }

 private:
  const std::string& bytes_;
  const char* format_;
  uint64_t base_;
  uint64_t pos_ = 0;
};

std::string read_exact(std::ifstream& in, size_t n) {
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  s.resize(static_cast<size_t>(in.gcount()));
  return s;
}

void encode_embedding_record(std::string& out, const TokenEmbeddingSequence& s) {
  put_str(out, s.doc_id());
  put_u32(out, checked_u32(s.size(), "token count"));
  out.push_back(s.token_ids() ? '\1' : '\0');
  if (s.token_ids()) {
    for (uint32_t id : *s.token_ids()) put_u32(out, id);
  }
  for (double v : s.values()) put_f32(out, v);
}

// Parses one record starting at `c`; the record must be complete.
TokenEmbeddingSequence decode_embedding_record(Cursor& c, size_t dim) {
  const uint64_t start = c.offset();
  std::string id = c.str("doc_id");
  const uint32_t n = c.u32("token count");
  if (n == 0) c.fail(start, "record '" + id + "' has zero tokens");
  const uint8_t flag = c.u8("token-id flag");
  if (flag > 1) c.fail(c.offset() - 1, "token-id flag must be 0 or 1");
  std::optional<std::vector<uint32_t>> ids;
  if (flag == 1) {
    c.need(static_cast<uint64_t>(n) * 4, "token ids");
    ids.emplace(n);
    for (auto& t : *ids) t = c.u32("token id");
  }
  const uint64_t floats = static_cast<uint64_t>(n) * dim;
  const uint64_t at = c.offset();
  try {
    c.need(floats * 4, "embedding values");
  } catch (const FormatError&) {
    c.fail(at, "record '" + id + "' declares " + std::to_string(n) +
                   " tokens of d=" + std::to_string(dim) +
                   " but the file ends before " + std::to_string(floats) +
                   " floats");
  }
  std::vector<double> values(floats);
  for (auto& v : values) v = c.f32("embedding value");
  return TokenEmbeddingSequence(std::move(id), dim, std::move(values),
                                std::move(ids));
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename '" + tmp + "' -> '" + path + "': " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EmbeddingReader::EmbeddingReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw IoError("cannot open '" + path + "'");
  std::string header = read_exact(in_, 12);
  Cursor c(header, "SAEEMB01");
  c.expect_magic(kEmbeddingMagic);
  dim_ = c.u32("dimension");
  if (dim_ == 0) c.fail(8, "dimension must be > 0");
  offset_ = 12;
}

std::optional<TokenEmbeddingSequence> EmbeddingReader::next() {
  // Pull exactly one record's bytes; short reads surface as truncation
  // errors from the decoder.
  std::string buf = read_exact(in_, 4);
  if (buf.empty()) return std::nullopt;
  if (buf.size() == 4) {
    const uint32_t id_len = Cursor(buf, "SAEEMB01", offset_).u32("doc_id length");
    buf += read_exact(in_, id_len + 5ull);
    if (buf.size() == 9ull + id_len) {
      Cursor head(buf, "SAEEMB01", offset_);
      head.str("doc_id");
      const uint64_t n = head.u32("token count");
      const uint8_t flag = head.u8("token-id flag");
      buf += read_exact(in_, (flag == 1 ? 4 * n : 0) + 4 * n * dim_);
    }
  }
  Cursor c(buf, "SAEEMB01", offset_);
  auto seq = decode_embedding_record(c, dim_);
  offset_ += buf.size();
  return seq;
}

EmbeddingCorpus load_embeddings(const std::string& path) {
  EmbeddingReader reader(path);
  EmbeddingCorpus corpus(reader.dim());
  while (auto seq = reader.next()) corpus.add(std::move(*seq));
  return corpus;
}

std::string encode_embeddings(const EmbeddingCorpus& corpus) {
  if (corpus.dim() == 0) throw InvalidArgument("cannot encode a corpus with d=0");
  std::string out(kEmbeddingMagic, 8);
  put_u32(out, checked_u32(corpus.dim(), "dimension"));
  for (const auto& item : corpus.items()) encode_embedding_record(out, item);
  return out;
}

EmbeddingCorpus decode_embeddings(const std::string& bytes) {
  Cursor c(bytes, "SAEEMB01");
  c.expect_magic(kEmbeddingMagic);
  const uint32_t d = c.u32("dimension");
  if (d == 0) c.fail(8, "dimension must be > 0");
  EmbeddingCorpus corpus(d);
  while (!c.at_end()) corpus.add(decode_embedding_record(c, d));
  return corpus;
}

void save_embeddings(const EmbeddingCorpus& corpus, const std::string& path) {
  write_file_atomic(path, encode_embeddings(corpus));
}

std::string encode_params(const SaeParams& p) {
  std::string out(kParamsMagic, 8);
  put_u32(out, checked_u32(p.dim, "d"));
  put_u32(out, checked_u32(p.latents, "M"));
  for (double v : p.w_enc) put_f32(out, v);
  for (double v : p.b_enc) put_f32(out, v);
  for (double v : p.w_dec) put_f32(out, v);
  for (double v : p.b_dec) put_f32(out, v);
  return out;
}

SaeParams decode_params(const std::string& bytes) {
  Cursor c(bytes, "SAEPRM01");
  c.expect_magic(kParamsMagic);
  const uint32_t d = c.u32("d");
  const uint32_t m = c.u32("M");
  if (d == 0 || m == 0) c.fail(8, "d and M must be positive");
  const uint64_t count = 2ull * d * m + m + d;
  c.need(count * 4, "parameter values");
  SaeParams p(d, m);
  for (auto* block : {&p.w_enc, &p.b_enc, &p.w_dec, &p.b_dec}) {
    for (auto& v : *block) v = c.f32("parameter");
  }
  if (!c.at_end()) c.fail(c.offset(), "trailing bytes after parameters");
  return p;
}

SaeParams load_params(const std::string& path) { return decode_params(read_file(path)); }

void save_params(const SaeParams& p, const std::string& path) {
  write_file_atomic(path, encode_params(p));
}

std::vector<std::string> SparseCollection::ids() const {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.doc_id);
  return out;
}

std::vector<SparseVector> SparseCollection::vectors() const {
  std::vector<SparseVector> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.vector);
  return out;
}

std::string encode_sparse(const SparseCollection& c) {
  std::string out(kSparseMagic, 8);
  put_u32(out, c.vocab_size);
  for (const auto& r : c.records) {
    if (r.vector.vocab_size() != c.vocab_size) {
      throw DimensionError("sparse record '" + r.doc_id + "' vocabulary mismatch");
    }
    put_str(out, r.doc_id);
    put_u32(out, checked_u32(r.vector.nnz(), "nnz"));
    for (const auto& e : r.vector.entries()) {
      put_u32(out, e.id);
      put_f32(out, static_cast<double>(stored_weight(e.weight)));
    }
  }
  return out;
}

SparseCollection decode_sparse(const std::string& bytes) {
  Cursor c(bytes, "SAESPV01");
  c.expect_magic(kSparseMagic);
  SparseCollection out;
  out.vocab_size = c.u32("vocabulary size");
  while (!c.at_end()) {
    const uint64_t start = c.offset();
    SparseRecord r;
    r.doc_id = c.str("doc_id");
    const uint32_t nnz = c.u32("nnz");
    c.need(8ull * nnz, "entries");
    std::vector<SparseEntry> entries(nnz);
    for (auto& e : entries) {
      e.id = c.u32("latent id");
      e.weight = c.f32("weight");
    }
    try {
      r.vector = SparseVector::from_entries(out.vocab_size, std::move(entries));
    } catch (const Error& e) {
      c.fail(start, "record '" + r.doc_id + "': " + e.what());
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

SparseCollection load_sparse(const std::string& path) {
  return decode_sparse(read_file(path));
}

void save_sparse(const SparseCollection& c, const std::string& path) {
  write_file_atomic(path, encode_sparse(c));
}

std::string encode_index(const InvertedIndex& ix) {
  std::string out(kIndexMagic, 8);
  put_u32(out, ix.vocab_size());
  put_u32(out, checked_u32(ix.num_docs(), "doc count"));
  for (uint32_t i = 0; i < ix.num_docs(); ++i) {
    put_str(out, ix.doc_id(i));
    put_u32(out, ix.doc_nnz(i));
  }
  for (uint32_t t = 0; t < ix.vocab_size(); ++t) {
    auto list = ix.postings(t);
    put_u32(out, checked_u32(list.size(), "posting count"));
    for (const auto& p : list) {
      put_u32(out, p.doc);
      put_u32(out, std::bit_cast<uint32_t>(p.weight));
    }
  }
  return out;
}

InvertedIndex decode_index(const std::string& bytes) {
  Cursor c(bytes, "SAEIDX01");
  c.expect_magic(kIndexMagic);
  const uint32_t m = c.u32("vocabulary size");
  const uint32_t n = c.u32("doc count");
  std::vector<std::string> ids;
  std::vector<uint32_t> nnz;
  for (uint32_t i = 0; i < n; ++i) {
    ids.push_back(c.str("doc_id"));
    nnz.push_back(c.u32("doc nnz"));
  }
  c.need(4ull * m, "posting list headers");
  std::vector<std::vector<Posting>> postings(m);
  for (uint32_t t = 0; t < m; ++t) {
    const uint32_t count = c.u32("posting count");
    c.need(8ull * count, "postings");
    postings[t].resize(count);
    for (auto& p : postings[t]) {
      p.doc = c.u32("ordinal");
      p.weight = c.f32("weight");
    }
  }
  if (!c.at_end()) c.fail(c.offset(), "trailing bytes after posting lists");
  try {
    return InvertedIndex::from_parts(m, std::move(ids), std::move(nnz),
                                     std::move(postings));
  } catch (const FormatError& e) {
    throw FormatError(std::string("SAEIDX01: ") + e.what());
  }
}

InvertedIndex load_index(const std::string& path) { return decode_index(read_file(path)); }

void save_index(const InvertedIndex& ix, const std::string& path) {
  write_file_atomic(path, encode_index(ix));
}

namespace {

template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(line, lineno);
  }
}

}  // namespace

std::vector<Triple> load_triples(const std::string& path) {
  std::vector<Triple> out;
  for_each_line(path, [&](const std::string& line, size_t lineno) {
    try {
      const auto j = nlohmann::json::parse(line);
      Triple t;
      t.query_id = j.at("query_id").get<std::string>();
      t.pos_id = j.at("pos_id").get<std::string>();
      t.neg_ids = j.at("neg_ids").get<std::vector<std::string>>();
      t.teacher_scores = j.at("teacher_scores").get<std::vector<double>>();
      if (t.teacher_scores.size() != t.neg_ids.size() + 1) {
        throw FormatError("teacher_scores must have 1 + len(neg_ids) entries");
      }
      out.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return out;
}

void save_triples(std::span<const Triple> triples, const std::string& path) {
  std::string out;
  for (const auto& t : triples) {
    nlohmann::json j = {{"query_id", t.query_id},
                        {"pos_id", t.pos_id},
                        {"neg_ids", t.neg_ids},
                        {"teacher_scores", t.teacher_scores}};
    out += j.dump() + "\n";
  }
  write_file_atomic(path, out);
}

std::vector<std::pair<std::string, std::string>> load_text_corpus(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_line(path, [&](const std::string& line, size_t lineno) {
    try {
      const auto j = nlohmann::json::parse(line);
      out.emplace_back(j.at("id").get<std::string>(), j.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return out;
}

Run load_run(const std::string& path) {
  Run run;
  std::map<std::string, std::vector<std::pair<long, ScoredDoc>>> rows;
  for_each_line(path, [&](const std::string& line, size_t lineno) {
    std::istringstream ss(line);
    std::string qid, q0, doc, tag;
    long rank = 0;
    double score = 0.0;
    if (!(ss >> qid >> q0 >> doc >> rank >> score)) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": expected 'qid Q0 docid rank score tag'");
    }
    rows[qid].push_back({rank, {doc, score}});
  });
  for (auto& [qid, list] : rows) {
    std::stable_sort(list.begin(), list.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& ranked = run[qid];
    std::unordered_map<std::string, bool> seen;
    for (auto& [rank, sd] : list) {
      if (seen[sd.doc_id]) {
        throw FormatError(path + ": duplicate doc '" + sd.doc_id +
                          "' for query '" + qid + "'");
      }
      seen[sd.doc_id] = true;
      ranked.push_back(std::move(sd));
    }
  }
  return run;
}

void save_run(const Run& run, const std::string& path, const std::string& tag) {
  std::ostringstream ss;
  ss << std::setprecision(9);
  for (const auto& [qid, ranked] : run) {
    for (size_t i = 0; i < ranked.size(); ++i) {
      ss << qid << " Q0 " << ranked[i].doc_id << ' ' << (i + 1) << ' '
         << ranked[i].score << ' ' << tag << '\n';
    }
  }
  write_file_atomic(path, ss.str());
}

Qrels load_qrels(const std::string& path) {
  Qrels qrels;
  for_each_line(path, [&](const std::string& line, size_t lineno) {
    std::istringstream ss(line);
    std::string qid, iter, doc;
    int grade = 0;
    if (!(ss >> qid >> iter >> doc >> grade)) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": expected 'qid 0 docid grade'");
    }
    if (grade < 0) {
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": negative relevance grade");
    }
    qrels[qid][doc] = grade;
  });
  return qrels;
}

void save_qrels(const Qrels& qrels, const std::string& path) {
  std::ostringstream ss;
  for (const auto& [qid, docs] : qrels) {
    std::vector<std::pair<std::string, int>> sorted(docs.begin(), docs.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [doc, g] : sorted) ss << qid << " 0 " << doc << ' ' << g << '\n';
  }
  write_file_atomic(path, ss.str());
}

InputNormalizer load_normalizer(const std::string& path) {
  try {
    const auto j = nlohmann::json::parse(read_file(path));
    InputNormalizer n{j.at("mean").get<std::vector<double>>(),
                      j.at("sigma").get<double>()};
    if (!(n.sigma > 0.0)) throw FormatError(path + ": sigma must be > 0");
    return n;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void save_normalizer(const InputNormalizer& n, const std::string& path) {
  nlohmann::json j = {{"mean", n.mean}, {"sigma", n.sigma}};
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace saesplade
