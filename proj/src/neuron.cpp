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

#include "tsslbp/neuron.hpp"

namespace tsslbp {

void SpikeRecord::RebuildFiringSteps() {
  for (auto& fs : firing_steps) fs.clear();
  for (int t = 0; t < n_steps; ++t) {
    for (int i = 0; i < n_neurons; ++i) {
      if (raster[static_cast<size_t>(t) * n_neurons + i]) {
        firing_steps[i].push_back(t);
      }
    }
  }
}

LayerTrace SimulateDynamics(const StepGrid& i_net, const NeuronConfig& cfg) {
  cfg.Validate();
  const int n = i_net.n_units;
  const int steps = i_net.n_steps;
  TSSLBP_REQUIRE(steps >= 1, "need at least one simulation step");

  LayerTrace trace(n, steps);
  trace.i_net = i_net;

  for (int t = 0; t < steps; ++t) {
    const double* cur = i_net.step(t);
    for (int i = 0; i < n; ++i) {
      const double u_prev = t > 0 ? trace.u.at(t - 1, i) : 0.0;
      const double fired_prev = t > 0 && trace.spikes.Fired(i, t - 1) ? 1.0
                                                                      : 0.0;
      const double u = StepMembrane(u_prev, cur[i], fired_prev, cfg);
      trace.u.at(t, i) = u;
      const bool fired = Fire(u, cfg);
      if (fired) trace.spikes.SetFired(i, t);
      const double a_prev = t > 0 ? trace.a.at(t - 1, i) : 0.0;
      trace.a.at(t, i) = StepPsc(a_prev, fired ? 1.0 : 0.0, cfg);
    }
  }
  return trace;
}

LayerTrace SimulateLayer(const StepGrid& incoming_psc,
                         const std::vector<float>& weights, int n_post,
                         const NeuronConfig& cfg) {
  const int n_pre = incoming_psc.n_units;
  TSSLBP_REQUIRE(static_cast<size_t>(n_post) * n_pre == weights.size(),
                 "weight matrix shape does not match pre/post counts");
  StepGrid i_net(incoming_psc.n_steps, n_post);
  for (int t = 0; t < incoming_psc.n_steps; ++t) {
    const double* in = incoming_psc.step(t);
    double* out = i_net.step(t);
    for (int i = 0; i < n_post; ++i) {
      const float* row = weights.data() + static_cast<size_t>(i) * n_pre;
      double acc = 0.0;
      for (int j = 0; j < n_pre; ++j) acc += row[j] * in[j];
      out[i] = acc;
    }
  }
  return SimulateDynamics(i_net, cfg);
}

}  // namespace tsslbp
