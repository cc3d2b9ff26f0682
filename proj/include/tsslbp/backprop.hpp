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

#ifndef TSSLBP_BACKPROP_HPP_
#define TSSLBP_BACKPROP_HPP_

#include <vector>

#include "tsslbp/common.hpp"
#include "tsslbp/neuron.hpp"

namespace tsslbp {

// Knobs of the backward pass that the neuron model itself does not fix.
struct BackpropConfig {
  // Lower clamp on du/dt at a firing step; bounds the 1/slope factor for
  // grazing threshold crossings. Default 0.1 * v_th / tau_m.
  double eps_slope = -1.0;  // negative = use default
  // Surrogate sensitivity injected on the diagonal for neurons that never
  // fire in the window. 0 disables (the faithful algorithm).
  double dead_neuron_kappa = 0.0;

  double EffectiveEpsSlope(const NeuronConfig& cfg) const {
    return eps_slope >= 0.0 ? eps_slope : 0.1 * cfg.v_th / cfg.tau_m;
  }
};

// Per-neuron sensitivity of the neuron's own PSC at step t_k to its
// membrane potential at step t_m. Stored dense and lower-triangular in
// time; entries with t_k < t_m or without a spike at t_m are zero.
struct PhiTable {
  int n_neurons = 0;
  int n_steps = 0;
  std::vector<double> values;  // [i][t_k][t_m]

  PhiTable() = default;
  PhiTable(int neurons, int steps)
      : n_neurons(neurons), n_steps(steps),
        values(static_cast<size_t>(neurons) * steps * steps, 0.0) {}

  double& At(int i, int t_k, int t_m) {
    return values[(static_cast<size_t>(i) * n_steps + t_k) * n_steps + t_m];
  }
  double At(int i, int t_k, int t_m) const {
    return values[(static_cast<size_t>(i) * n_steps + t_k) * n_steps + t_m];
  }
};

// Backpropagated error per neuron per step.
struct DeltaTrace {
  StepGrid delta;

  DeltaTrace() = default;
  DeltaTrace(int neurons, int steps) : delta(steps, neurons) {}
};

// Slope of the continuous membrane equation at a firing step,
// (-u + i_net) / tau_m, clamped from below at eps_slope. The neuron must
// actually have fired at t_m.
double DuDtAtSpike(const LayerTrace& trace, int neuron, int t_m,
                   const NeuronConfig& cfg, const BackpropConfig& bp);

// Derivative of the synaptic kernel value at t_k with respect to the spike
// onset t_m: (1/tau_s) * exp(-(t_k - t_m)/tau_s). Requires t_m <= t_k.
double DpscDtm(int t_k, int t_m, const NeuronConfig& cfg);

// Derivative of the decaying reset contribution at t_p with respect to the
// reset onset t_m: -(v_th/tau_m) * exp(-(t_p - t_m)/tau_m).
double DresetDtm(int t_p, int t_m, const NeuronConfig& cfg);

// Builds the full phi table for a layer from its forward trace. Fills, for
// each firing step t_m and each t_k >= t_m, the inter-neuron term plus the
// reset-mediated intra-neuron chain through the next firing step.
PhiTable BuildPhi(const LayerTrace& trace, const NeuronConfig& cfg,
                  const BackpropConfig& bp);

// Output-layer delta: delta[t_m] = sum_{k>=m} (out - target)[t_k] *
// phi(t_k, t_m), per neuron. out_psc/target_psc are the kernel-filtered
// actual and desired trains.
DeltaTrace DeltaOutput(const StepGrid& out_psc, const StepGrid& target_psc,
                       const PhiTable& phi);

// Hidden-layer delta for a dense next layer: back_current[t] =
// W^T delta_next[t], then delta[t_m] = sum_{k>=m} phi(t_k,t_m) *
// back_current[t_k]. next_weights is row-major [n_next x n_this].
DeltaTrace DeltaHidden(const std::vector<float>& next_weights, int n_next,
                       const DeltaTrace& next_delta, const PhiTable& phi);

// Same contraction with the adjoint product already applied; used when the
// downstream linear map is a convolution or pooling chain.
DeltaTrace DeltaFromBackCurrent(const StepGrid& back_current,
                                const PhiTable& phi);

// Accumulates grad += sum_m delta[t_m] (outer) pre_psc[t_m] into a
// row-major [n_post x n_pre] buffer.
void AccumulateWeightGrad(const StepGrid& pre_psc, const DeltaTrace& delta,
                          std::vector<double>* grad);

}  // namespace tsslbp

#endif  // TSSLBP_BACKPROP_HPP_
