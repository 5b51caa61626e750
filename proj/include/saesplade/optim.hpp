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

#include <cstddef>
#include <span>
#include <vector>

namespace saesplade {

// Plain Adam (AdamW with zero weight decay).
struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers for a fixed list of parameter blocks.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(std::span<const size_t> block_sizes);

  size_t step() const noexcept { return step_; }

  // One bias-corrected update. Block shapes must match construction.
  void update(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads,
              const AdamConfig& cfg);

 private:
  size_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace saesplade
