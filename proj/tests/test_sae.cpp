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
#include "saesplade/optim.hpp"
#include "saesplade/sae.hpp"
#include "support.hpp"

using namespace saesplade;

namespace {

SaeParams hand_params() {
  SaeParams p(2, 3);
  p.w_enc = {1, 0, 0, 1, 1, 1};
  return p;
}

SaeTrainConfig variant_cfg(SaeVariant v, size_t m) {
  SaeTrainConfig cfg;
  cfg.variant = v;
  cfg.latents = m;
  cfg.k_sae = 2;
  cfg.alpha_sp = v == SaeVariant::kL1 ? 0.3 : 0.0;
  cfg.nested_sizes = {m / 2, m};
  cfg.hierarchy_ks = {1, 3};
  return cfg;
}

}  // namespace

TEST_SUITE("sae") {
TEST_CASE("encode hand instance") {
  const auto p = hand_params();
  CHECK(sae_encode(p, DenseVector{2, -1}, 2) == DenseVector{2, 0, 1});
  CHECK(sae_encode(p, DenseVector{2, -1}, 1) == DenseVector{2, 0, 0});
  CHECK(sae_encode(p, DenseVector{0, 0}, 3) == DenseVector{0, 0, 0});
  CHECK_THROWS_AS(sae_encode(p, DenseVector{1, 2, 3}, 1), DimensionError);
}

TEST_CASE("decode examples") {
  SaeParams p(2, 2);
  p.w_dec = {1, 0, 0.5, 2};
  p.b_dec = {0.1, -0.2};
  CHECK(sae_decode(p, DenseVector{0, 0}) == p.b_dec);
  SaeParams q(2, 1);
  q.w_dec = {1, 0};
  CHECK(sae_decode(q, DenseVector{3}) == DenseVector{3, 0});
  const auto two = sae_decode(p, DenseVector{2, 3});
  CHECK(two[0] == doctest::Approx(0.1 + 2 * 1 + 3 * 0.5));
  CHECK(two[1] == doctest::Approx(-0.2 + 0 + 3 * 2));
}

TEST_CASE("loss examples") {
  // Identity-like SAE reconstructs inputs in its positive orthant exactly.
  SaeParams p(2, 2);
  p.w_enc = {1, 0, 0, 1};
  p.w_dec = {1, 0, 0, 1};
  SaeTrainConfig cfg;
  cfg.latents = 2;
  cfg.k_sae = 2;
  std::vector<DenseVector> batch{{1, 2}, {0.5, 0.25}};
  CHECK(sae_loss(p, batch, cfg).rsct == 0.0);

  auto h = hand_params();
  SaeTrainConfig l1;
  l1.variant = SaeVariant::kL1;
  l1.latents = 3;
  l1.alpha_sp = 0.5;
  std::vector<DenseVector> one{{2, -1}};  // z = [2, 0, 1]
  const auto rep = sae_loss(h, one, l1);
  CHECK(rep.sparsity == doctest::Approx(3.0));
  CHECK(rep.total - rep.rsct == doctest::Approx(3.0 * 0.5));
  CHECK_THROWS_AS(sae_loss(h, std::vector<DenseVector>{}, l1), EmptyInputError);
}

TEST_CASE("config validation") {
  SaeTrainConfig cfg = variant_cfg(SaeVariant::kMatryoshkaTopK, 6);
  CHECK_NOTHROW(validate(cfg, 6));
  cfg.nested_sizes = {4, 3, 6};
  CHECK_THROWS_AS(validate(cfg, 6), InvalidArgument);
  cfg.nested_sizes = {3, 5};
  CHECK_THROWS_AS(validate(cfg, 6), InvalidArgument);
  cfg = variant_cfg(SaeVariant::kHierarchicalTopK, 6);
  cfg.hierarchy_ks = {};
  CHECK_THROWS_AS(validate(cfg, 6), InvalidArgument);
  CHECK_THROWS_AS(parse_sae_variant("relu"), InvalidArgument);
  CHECK(parse_sae_variant(to_string(SaeVariant::kMatryoshkaTopK)) ==
        SaeVariant::kMatryoshkaTopK);
}

TEST_CASE("adam closed-form first step") {
  std::vector<double> x{0.0}, g{1.0};
  AdamState st(std::vector<size_t>{1});
  std::vector<std::span<double>> ps{x};
  std::vector<std::span<const double>> gs{g};
  st.update(ps, gs, AdamConfig{0.1, 0.9, 0.999, 1e-8});
  CHECK(x[0] == doctest::Approx(-0.1).epsilon(1e-6));

  std::vector<double> y{1.5}, zero{0.0};
  AdamState st2(std::vector<size_t>{1});
  std::vector<std::span<double>> ps2{y};
  std::vector<std::span<const double>> gs2{zero};
  st2.update(ps2, gs2, AdamConfig{});
  CHECK(y[0] == 1.5);
}

TEST_CASE("decoder renormalization") {
  SaeParams p(2, 2);
  p.w_dec = {3, 4, 0, 0};
  renormalize_decoder(p);
  CHECK(p.w_dec[0] == doctest::Approx(0.6));
  CHECK(p.w_dec[1] == doctest::Approx(0.8));
  CHECK(p.w_dec[2] == 0.0);
}

TEST_CASE("input normalizer") {
  const std::vector<DenseVector> same{{1, 2}, {1, 2}};
  CHECK_THROWS_AS(fit_normalizer(same), InvalidArgument);
  const auto n = fit_normalizer(std::vector<DenseVector>{{1, 0}, {-1, 0}});
  CHECK(n.mean == DenseVector{0, 0});
  CHECK(n.sigma == doctest::Approx(1.0));
}

TEST_CASE("dead latent ratio") {
  SaeParams p(2, 3);
  CHECK(dead_latent_ratio(p, std::vector<DenseVector>{{1, 1}}, 1) == 1.0);
  SaeParams q(2, 2);
  q.w_enc = {1, 0, -1, 0};
  CHECK(dead_latent_ratio(q, std::vector<DenseVector>{{1, 0}, {2, 1}}, 2) == 0.5);
}

TEST_CASE("init ties encoder to decoder with unit columns") {
  const auto p = sae_init(5, 7, 11);
  CHECK(p.w_enc == p.w_dec);
  for (size_t j = 0; j < 7; ++j) CHECK(l2_norm(p.dec_col(j)) == doctest::Approx(1.0));
  CHECK(std::all_of(p.b_enc.begin(), p.b_enc.end(), [](double x) { return x == 0; }));
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(2024);
  const SaeVariant variants[] = {SaeVariant::kTopK, SaeVariant::kHierarchicalTopK,
                                 SaeVariant::kMatryoshkaTopK, SaeVariant::kL1};
  for (auto v : variants) {
    size_t checked = 0;
    for (int trial = 0; trial < 40 && checked < 10; ++trial) {
      const size_t d = 2 + rng() % 3, m = 4 + rng() % 3;
      auto p = testing::random_params(rng, d, m);
      std::vector<DenseVector> batch;
      for (int b = 0; b < 3; ++b) batch.push_back(testing::uniform_vec(rng, d));
      auto cfg = variant_cfg(v, m);
      std::vector<uint8_t> dead(m, 0);
      if (v != SaeVariant::kL1) {
        cfg.aux_k = 1;
        cfg.aux_alpha = 0.7;
        dead[rng() % m] = 1;
        dead[rng() % m] = 1;
      }
      if (testing::sae_margin(p, batch) < 1e-6) continue;
      const auto g = sae_grad(p, batch, cfg, dead);
      auto f = [&] { return sae_loss(p, batch, cfg, dead).total; };
      auto blocks_g = g.blocks();
      std::vector<std::vector<double>*> blocks_p{&p.w_enc, &p.b_enc, &p.w_dec, &p.b_dec};
      for (size_t b = 0; b < 4; ++b) {
        const auto num = testing::numeric_grad(*blocks_p[b], f, 1e-7);
        CHECK(testing::max_rel_error(blocks_g[b], num) < 1e-4);
      }
      ++checked;
    }
    CHECK(checked == 10);
  }
}

TEST_CASE("training: steps=0 and determinism") {
  SyntheticSpec spec{8, 6, 1, 0.01, 20, 10, 3};
  auto data = generate_synthetic(spec);
  SaeTrainConfig cfg;
  cfg.latents = 6;
  cfg.k_sae = 1;
  cfg.steps = 0;
  cfg.seed = 4;
  const auto r0 = train_sae(data.corpus, cfg);
  CHECK(r0.params == sae_init(8, 6, 4));
  cfg.steps = 50;
  cfg.batch_tokens = 32;
  cfg.aux_k = 1;
  const auto a = train_sae(data.corpus, cfg);
  const auto b = train_sae(data.corpus, cfg);
  CHECK(a.params == b.params);
  CHECK(a.report.final_eval_rsct < a.report.initial_eval_rsct);
  for (size_t j = 0; j < 6; ++j) {
    CHECK(l2_norm(a.params.dec_col(j)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("noise-free single-atom corpus is learned to low error") {
  SyntheticSpec spec{16, 16, 1, 0.0, 100, 100, 1};
  auto data = generate_synthetic(spec);
  SaeTrainConfig cfg;
  cfg.latents = 16;
  cfg.k_sae = 1;
  cfg.steps = 4000;
  cfg.batch_tokens = 128;
  cfg.adam.lr = 3e-3;
  cfg.aux_k = 2;
  cfg.aux_alpha = 3.0;
  cfg.seed = 1;
  const auto r = train_sae(data.corpus, cfg);
  CHECK(r.report.final_eval_rsct < 1e-2 * r.report.initial_eval_rsct);
}
}
