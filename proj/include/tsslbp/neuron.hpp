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

#ifndef TSSLBP_NEURON_HPP_
#define TSSLBP_NEURON_HPP_

#include <cstdint>
#include <vector>

#include "tsslbp/common.hpp"

namespace tsslbp {

// Leaky integrate-and-fire neuron constants. dt is fixed at one time unit;
// tau_m and tau_s are expressed in steps so the leak factors 1 - 1/tau lie
// strictly inside (0, 1).
struct NeuronConfig {
  double tau_m = 5.0;
  double tau_s = 3.0;
  double v_th = 1.0;
  double dt = 1.0;

  void Validate() const {
    TSSLBP_REQUIRE(tau_m > 1.0, "tau_m must be > 1");
    TSSLBP_REQUIRE(tau_s > 1.0, "tau_s must be > 1");
    TSSLBP_REQUIRE(v_th > 0.0, "v_th must be > 0");
    TSSLBP_REQUIRE(dt == 1.0, "dt is fixed at 1 time unit");
  }

  double LeakM() const { return 1.0 - 1.0 / tau_m; }
  double LeakS() const { return 1.0 - 1.0 / tau_s; }
};

// Binary firing raster for one layer plus, per neuron, the ordered list of
// step indices at which it fired.
struct SpikeRecord {
  int n_neurons = 0;
  int n_steps = 0;
  std::vector<uint8_t> raster;  // [t * n_neurons + i], values 0/1
  std::vector<std::vector<int>> firing_steps;  // per neuron, ascending

  SpikeRecord() = default;
  SpikeRecord(int neurons, int steps)
      : n_neurons(neurons), n_steps(steps),
        raster(static_cast<size_t>(neurons) * steps, 0),
        firing_steps(neurons) {}

  bool Fired(int i, int t) const {
    return raster[static_cast<size_t>(t) * n_neurons + i] != 0;
  }
  void SetFired(int i, int t) {
    raster[static_cast<size_t>(t) * n_neurons + i] = 1;
    firing_steps[i].push_back(t);
  }
  // Rebuilds firing_steps from the raster (used after bulk raster edits).
  void RebuildFiringSteps();
};

// Full state history of one simulated layer: membrane potential u, the
// layer's own unweighted PSC a, and the net weighted input current. All
// three are [n_steps x n_neurons].
struct LayerTrace {
  StepGrid u;
  StepGrid a;
  StepGrid i_net;
  SpikeRecord spikes;

  LayerTrace() = default;
  LayerTrace(int neurons, int steps)
      : u(steps, neurons), a(steps, neurons), i_net(steps, neurons),
        spikes(neurons, steps) {}
};

// One Euler step of the first-order synaptic model. The 1/tau_s input gain
// is absorbed into the weights so a unit spike adds exactly 1 to the PSC.
inline double StepPsc(double a_prev, double spike, const NeuronConfig& cfg) {
  return cfg.LeakS() * a_prev + spike;
}

// One Euler step of the membrane potential with reset-by-subtraction: a
// spike at the previous step removes v_th from the carried-over potential
// and the deficit decays under the same membrane leak.
inline double StepMembrane(double u_prev, double i_net, double fired_prev,
                           const NeuronConfig& cfg) {
  return cfg.LeakM() * (u_prev - cfg.v_th * fired_prev) + i_net;
}

// Threshold crossing; equality fires.
inline bool Fire(double u, const NeuronConfig& cfg) { return u >= cfg.v_th; }

// Runs the LIF dynamics for a layer given its per-step net input current.
// i_net is [n_steps x n_neurons]; the returned trace records u, a, i_net
// and the spike raster for every step.
LayerTrace SimulateDynamics(const StepGrid& i_net, const NeuronConfig& cfg);

// Dense convenience wrapper: i_net[t] = W * incoming_psc[t] with W given
// row-major [n_post x n_pre], then SimulateDynamics.
LayerTrace SimulateLayer(const StepGrid& incoming_psc,
                         const std::vector<float>& weights, int n_post,
                         const NeuronConfig& cfg);

}  // namespace tsslbp

#endif  // TSSLBP_NEURON_HPP_
