// Copyright 2026 The tsslbp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TSSLBP_OPTIMIZER_HPP_
#define TSSLBP_OPTIMIZER_HPP_

#include <string>
#include <vector>

#include "tsslbp/network.hpp"

namespace tsslbp {

enum class OptimKind { kSgd, kAdam };

struct OptimConfig {
  OptimKind kind = OptimKind::kAdam;
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr_decay = 1.0;  // per-epoch multiplicative decay
};

// Adam first/second moments per layer (weights and, when enabled, bias),
// plus the shared step counter.
class Optimizer {
 public:
  Optimizer(const OptimConfig& cfg, const NetworkSpec& net);

  // Applies one update in place. Gradients must be finite; a non-finite
  // entry aborts with the offending layer named.
  void Step(const GradientSet& grads, NetworkSpec* net);

  int64_t step_count() const { return step_count_; }
  const OptimConfig& config() const { return cfg_; }

  // Current step size; the training loop applies the per-epoch decay here.
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  OptimConfig cfg_;
  int64_t step_count_ = 0;
  std::vector<std::vector<double>> m_, v_;
  std::vector<std::vector<double>> m_bias_, v_bias_;
};

}  // namespace tsslbp

#endif  // TSSLBP_OPTIMIZER_HPP_
