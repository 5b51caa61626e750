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

// Helpers shared by the unit tests and the acceptance runner: random small
// instances, central finite differences and boundary margins.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "saesplade/core.hpp"
#include "saesplade/sae.hpp"
#include "saesplade/splade.hpp"

namespace saesplade::testing {

inline std::vector<double> uniform_vec(std::mt19937_64& rng, size_t n,
                                       double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline SaeParams random_params(std::mt19937_64& rng, size_t d, size_t m) {
  SaeParams p(d, m);
  p.w_enc = uniform_vec(rng, d * m);
  p.b_enc = uniform_vec(rng, m, -0.3, 0.3);
  p.w_dec = uniform_vec(rng, d * m);
  p.b_dec = uniform_vec(rng, d, -0.3, 0.3);
  return p;
}

// Smallest gap between any two distinct values of `v` (and of v vs 0);
// every top-k or relu decision is stable under perturbations below it.
inline double value_margin(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  s.push_back(0.0);
  std::sort(s.begin(), s.end());
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < s.size(); ++i) m = std::min(m, s[i] - s[i - 1]);
  return m;
}

// Max over coordinates of |a - n| / max(|a|, |n|, floor).
inline double max_rel_error(std::span<const double> analytic,
                            std::span<const double> numeric,
                            double floor = 1e-3) {
  double worst = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    const double den =
        std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / den);
  }
  return worst;
}

// Central differences of f with respect to every entry of `x`, in place.
inline std::vector<double> numeric_grad(std::vector<double>& x,
                                        const std::function<double()>& f,
                                        double eps) {
  std::vector<double> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = f();
    x[i] = saved - eps;
    const double down = f();
    x[i] = saved;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

// Margin of every pre-activation of every token (covers relu, top-k and the
// dead-latent ranking).
inline double sae_margin(const SaeParams& p, std::span<const DenseVector> batch) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& h : batch) m = std::min(m, value_margin(sae_pre_activation(p, h)));
  return m;
}

// Margin for one text under an SPLADE encoder: per-token pre-activations
// (mask decisions) and, per latent, the gaps between token activations
// (arg-max decisions).
inline double text_margin(const SaeParams& p, const TokenEmbeddingSequence& seq,
                          std::optional<size_t> k,
                          const InputNormalizer* norm) {
  double m = std::numeric_limits<double>::infinity();
  std::vector<DenseVector> acts;
  for (size_t i = 0; i < seq.size(); ++i) {
    DenseVector h = norm ? norm->apply(seq.token(i))
                         : DenseVector(seq.token(i).begin(), seq.token(i).end());
    m = std::min(m, value_margin(sae_pre_activation(p, h)));
    acts.push_back(sae_encode(p, h, k));
  }
  for (size_t j = 0; j < p.latents; ++j) {
    std::vector<double> col;
    for (const auto& a : acts) {
      if (a[j] > 0.0) col.push_back(a[j]);
    }
    if (col.size() > 1) {
      std::sort(col.begin(), col.end());
      for (size_t i = 1; i < col.size(); ++i) m = std::min(m, col[i] - col[i - 1]);
    }
  }
  return m;
}

inline TokenEmbeddingSequence random_text(std::mt19937_64& rng,
                                          const std::string& id, size_t d,
                                          size_t n) {
  return TokenEmbeddingSequence(id, d, uniform_vec(rng, d * n));
}

}  // namespace saesplade::testing
