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

#include "tsslbp/network.hpp"

namespace tsslbp {

void GradientSet::Resize(const NetworkSpec& net) {
  by_layer.assign(net.layers.size(), {});
  bias_by_layer.assign(net.layers.size(), {});
  for (size_t l = 0; l < net.layers.size(); ++l) {
    by_layer[l].assign(net.layers[l].WeightCount(), 0.0);
    if (!net.layers[l].bias.empty()) {
      bias_by_layer[l].assign(net.layers[l].bias.size(), 0.0);
    }
  }
}

void GradientSet::Add(const GradientSet& other) {
  TSSLBP_CHECK(by_layer.size() == other.by_layer.size());
  for (size_t l = 0; l < by_layer.size(); ++l) {
    TSSLBP_CHECK(by_layer[l].size() == other.by_layer[l].size());
    for (size_t i = 0; i < by_layer[l].size(); ++i) {
      by_layer[l][i] += other.by_layer[l][i];
    }
    for (size_t i = 0; i < bias_by_layer[l].size(); ++i) {
      bias_by_layer[l][i] += other.bias_by_layer[l][i];
    }
  }
}

void GradientSet::Scale(double s) {
  for (auto& g : by_layer) {
    for (auto& v : g) v *= s;
  }
  for (auto& g : bias_by_layer) {
    for (auto& v : g) v *= s;
  }
}

ForwardRecord ForwardNetwork(const StepGrid& input_psc,
                             const NetworkSpec& net) {
  net.Validate();
  TSSLBP_REQUIRE(input_psc.n_units == net.InputCount(),
                 "input series width does not match first layer");
  TSSLBP_REQUIRE(input_psc.n_steps == net.n_steps,
                 "input series length does not match n_steps");

  ForwardRecord rec;
  rec.psc_in.reserve(net.layers.size());
  rec.traces.resize(net.layers.size());

  StepGrid cur = input_psc;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const auto& p = net.layers[l];
    rec.psc_in.push_back(cur);
    if (p.kind == LayerKind::kAvgPool) {
      cur = MapSeries(p, cur);
    } else {
      StepGrid i_net = MapSeries(p, cur);
      rec.traces[l] = SimulateDynamics(i_net, net.neuron);
      cur = rec.traces[l]->a;
    }
  }
  rec.output_psc = cur;
  return rec;
}

void BackwardNetwork(const ForwardRecord& rec, const StepGrid& target_psc,
                     const NetworkSpec& net, const BackpropConfig& bp,
                     GradientSet* grads) {
  TSSLBP_CHECK_MSG(rec.psc_in.size() == net.layers.size(),
                   "forward record does not match network");
  TSSLBP_CHECK(grads->by_layer.size() == net.layers.size());

  int l = static_cast<int>(net.layers.size()) - 1;
  TSSLBP_CHECK(rec.traces[l].has_value());
  PhiTable phi = BuildPhi(*rec.traces[l], net.neuron, bp);
  DeltaTrace delta = DeltaOutput(rec.output_psc, target_psc, phi);

  while (true) {
    const auto& p = net.layers[l];
    // dL/dW for this layer from its input PSC and delta.
    for (int t = 0; t < delta.delta.n_steps; ++t) {
      LinearWeightGrad(p, rec.psc_in[l].step(t), delta.delta.step(t),
                       &grads->by_layer[l]);
    }
    if (!grads->bias_by_layer[l].empty()) {
      const int n_out = p.out_shape.Count();
      const bool conv = p.kind == LayerKind::kConv2d;
      const int plane = p.out_shape.h * p.out_shape.w;
      for (int t = 0; t < delta.delta.n_steps; ++t) {
        const double* d = delta.delta.step(t);
        for (int i = 0; i < n_out; ++i) {
          grads->bias_by_layer[l][conv ? i / plane : i] += d[i];
        }
      }
    }
    // Map the error through this layer's adjoint and any pooling layers
    // down to the next spiking layer.
    StepGrid back = AdjointSeries(p, delta.delta);
    int j = l - 1;
    while (j >= 0 && !net.layers[j].Spiking()) {
      back = AdjointSeries(net.layers[j], back);
      --j;
    }
    if (j < 0) break;
    TSSLBP_CHECK(rec.traces[j].has_value());
    phi = BuildPhi(*rec.traces[j], net.neuron, bp);
    delta = DeltaFromBackCurrent(back, phi);
    l = j;
  }
}

}  // namespace tsslbp
