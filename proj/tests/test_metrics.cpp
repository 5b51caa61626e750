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

#include <cmath>
#include <random>

#include "doctest.h"
#include "saesplade/error.hpp"
#include "saesplade/metrics.hpp"

using namespace saesplade;

namespace {

Run ranked(const std::string& q, std::vector<std::string> docs) {
  Run r;
  double s = static_cast<double>(docs.size());
  for (auto& d : docs) r[q].push_back({d, s--});
  return r;
}

SparseVector support(uint32_t m, std::vector<uint32_t> ids) {
  std::vector<SparseEntry> e;
  for (auto i : ids) e.push_back({i, 1.0});
  return SparseVector::from_entries(m, std::move(e));
}

}  // namespace

TEST_SUITE("metrics") {
TEST_CASE("mrr examples") {
  Qrels qr{{"q", {{"r", 1}}}};
  CHECK(mrr_at_k(ranked("q", {"r", "a"}), qr) == 1.0);
  CHECK(mrr_at_k(ranked("q", {"a", "b", "r"}), qr) == doctest::Approx(1.0 / 3));
  std::vector<std::string> eleven(10, "");
  for (int i = 0; i < 10; ++i) eleven[i] = "x" + std::to_string(i);
  eleven.push_back("r");
  CHECK(mrr_at_k(ranked("q", eleven), qr, 10) == 0.0);
  CHECK_THROWS_AS(mrr_at_k(Run{}, qr), EmptyInputError);
  CHECK_THROWS_AS(mrr_at_k(ranked("other", {"r"}), qr), NotFoundError);
}

TEST_CASE("ndcg examples") {
  Qrels qr{{"q", {{"r", 1}}}};
  CHECK(ndcg_at_k(ranked("q", {"r"}), qr) == 1.0);
  CHECK(ndcg_at_k(ranked("q", {"a", "r"}), qr) == doctest::Approx(1.0 / std::log2(3.0)));
  Qrels graded{{"q", {{"a", 3}, {"b", 2}, {"c", 1}}}};
  CHECK(ndcg_at_k(ranked("q", {"a", "b", "c", "z"}), graded) == doctest::Approx(1.0));
  CHECK(ndcg_at_k(ranked("q", {"c", "b", "a"}), graded) < 1.0);
}

TEST_CASE("success examples") {
  Qrels qr{{"q", {{"r", 1}}}};
  CHECK(success_at_k(ranked("q", {"a", "b", "c", "d", "r"}), qr, 5) == 1.0);
  CHECK(success_at_k(ranked("q", {"a", "b", "c", "d", "e", "r"}), qr, 5) == 0.0);
  CHECK_THROWS_AS(success_at_k(Run{}, qr), EmptyInputError);
}

TEST_CASE("qd_flops examples") {
  std::vector<SparseVector> q{support(5, {1, 2})};
  std::vector<SparseVector> d{support(5, {2, 3}), support(5, {4})};
  CHECK(qd_flops_pairwise(q, d) == 0.5);
  CHECK(qd_flops(q, d) == doctest::Approx(0.5));
  std::vector<SparseVector> dis{support(5, {0})};
  CHECK(qd_flops(q, dis) == 0.0);
  std::vector<SparseVector> same{support(5, {0, 1, 2}), support(5, {0, 1, 2})};
  CHECK(qd_flops(same, same) == doctest::Approx(3.0));
  CHECK(qd_flops_sampled(q, d, 100, 1) == doctest::Approx(0.5));
}

TEST_CASE("qd_flops identity on random instances") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const uint32_t m = 1 + rng() % 20;
    auto draw = [&](size_t n) {
      std::vector<SparseVector> out;
      for (size_t i = 0; i < n; ++i) {
        std::vector<uint32_t> ids;
        for (uint32_t j = 0; j < m; ++j) {
          if (rng() % 3 == 0) ids.push_back(j);
        }
        out.push_back(support(m, ids));
      }
      return out;
    };
    auto q = draw(1 + rng() % 8), d = draw(1 + rng() % 8);
    CHECK(std::abs(qd_flops(q, d) - qd_flops_pairwise(q, d)) < 1e-9);
  }
}

TEST_CASE("e2 examples and limits") {
  CHECK(e2_score(1.0, 0.0) == doctest::Approx(0.999998).epsilon(1e-6));
  CHECK(e2_score(0.0, 0.0) == doctest::Approx(-2.04e-6).epsilon(0.01));
  CHECK(std::abs(e2_score(0.387, 1.40) - 0.37297) < 1e-4);
  CHECK(std::abs(delta_e2({0.387, 1.40}) - 19.1) < 0.1);
  CHECK(std::abs(delta_e2({0.376, 0.67}) - 18.8) < 0.1);
  CHECK(delta_e2(kBm25MsMarco) == 0.0);
  auto slope = [](double q) {
    const double h = 1e-5;
    return (e2_score(0.3, q + h) - e2_score(0.3, q - h)) / (2 * h);
  };
  CHECK(slope(0.1) == doctest::Approx(-0.01).epsilon(0.01));
  CHECK(slope(50.0) == doctest::Approx(-0.10).epsilon(0.01));
  CHECK(e2_score(0.3, 1.0) > e2_score(0.3, 1.1));
  CHECK(e2_score(0.31, 1.0) > e2_score(0.3, 1.0));
  CHECK(softplus(1000.0, 2.0) == doctest::Approx(1000.0));
  CHECK(softplus(-1000.0, 2.0) >= 0.0);
}
}
