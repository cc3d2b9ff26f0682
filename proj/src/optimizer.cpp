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

#include "tsslbp/optimizer.hpp"

#include <cmath>

namespace tsslbp {

Optimizer::Optimizer(const OptimConfig& cfg, const NetworkSpec& net)
    : cfg_(cfg) {
  m_.resize(net.layers.size());
  v_.resize(net.layers.size());
  m_bias_.resize(net.layers.size());
  v_bias_.resize(net.layers.size());
  for (size_t l = 0; l < net.layers.size(); ++l) {
    m_[l].assign(net.layers[l].WeightCount(), 0.0);
    v_[l].assign(net.layers[l].WeightCount(), 0.0);
    m_bias_[l].assign(net.layers[l].bias.size(), 0.0);
    v_bias_[l].assign(net.layers[l].bias.size(), 0.0);
  }
}

namespace {

void CheckFinite(const std::vector<double>& g, size_t layer) {
  for (double x : g) {
    TSSLBP_REQUIRE(std::isfinite(x), "non-finite gradient in layer " +
                                         std::to_string(layer));
  }
}

template <typename Param>
void ApplyAdam(const std::vector<double>& g, double lr_t, double beta1,
               double beta2, double eps, std::vector<double>* m,
               std::vector<double>* v, Param* w) {
  for (size_t i = 0; i < g.size(); ++i) {
    (*m)[i] = beta1 * (*m)[i] + (1.0 - beta1) * g[i];
    (*v)[i] = beta2 * (*v)[i] + (1.0 - beta2) * g[i] * g[i];
    const double upd = lr_t * (*m)[i] / (std::sqrt((*v)[i]) + eps);
    (*w)[i] = static_cast<float>(double((*w)[i]) - upd);
  }
}

template <typename Param>
void ApplySgd(const std::vector<double>& g, double lr, Param* w) {
  for (size_t i = 0; i < g.size(); ++i) {
    (*w)[i] = static_cast<float>(double((*w)[i]) - lr * g[i]);
  }
}

}  // namespace

void Optimizer::Step(const GradientSet& grads, NetworkSpec* net) {
  TSSLBP_CHECK(grads.by_layer.size() == net->layers.size());
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  // Bias-corrected step size.
  const double lr_t = cfg_.lr * std::sqrt(1.0 - std::pow(cfg_.beta2, t)) /
                      (1.0 - std::pow(cfg_.beta1, t));
  for (size_t l = 0; l < net->layers.size(); ++l) {
    auto& layer = net->layers[l];
    if (layer.WeightCount() == 0) continue;
    CheckFinite(grads.by_layer[l], l);
    if (cfg_.kind == OptimKind::kAdam) {
      ApplyAdam(grads.by_layer[l], lr_t, cfg_.beta1, cfg_.beta2, cfg_.eps,
                &m_[l], &v_[l], &layer.weights);
    } else {
      ApplySgd(grads.by_layer[l], cfg_.lr, &layer.weights);
    }
    if (!layer.bias.empty() && !grads.bias_by_layer[l].empty()) {
      CheckFinite(grads.bias_by_layer[l], l);
      if (cfg_.kind == OptimKind::kAdam) {
        ApplyAdam(grads.bias_by_layer[l], lr_t, cfg_.beta1, cfg_.beta2,
                  cfg_.eps, &m_bias_[l], &v_bias_[l], &layer.bias);
      } else {
        ApplySgd(grads.bias_by_layer[l], cfg_.lr, &layer.bias);
      }
    }
  }
}

}  // namespace tsslbp
