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

#ifndef TSSLBP_NETWORK_HPP_
#define TSSLBP_NETWORK_HPP_

#include <optional>
#include <vector>

#include "tsslbp/backprop.hpp"
#include "tsslbp/layers.hpp"
#include "tsslbp/neuron.hpp"

namespace tsslbp {

// Everything the backward pass needs from one forward run. psc_in[l] is
// the PSC series feeding layer l; trace[l] is populated only for spiking
// layers (pooling is a pure linear map with no state).
struct ForwardRecord {
  std::vector<StepGrid> psc_in;
  std::vector<std::optional<LayerTrace>> traces;
  StepGrid output_psc;  // PSC series of the final layer
};

// Per-layer weight gradients; pooling layers hold empty entries.
struct GradientSet {
  std::vector<std::vector<double>> by_layer;
  std::vector<std::vector<double>> bias_by_layer;

  void Resize(const NetworkSpec& net);
  void Add(const GradientSet& other);
  void Scale(double s);
};

// Runs the network on an input PSC series [n_steps x input_count].
ForwardRecord ForwardNetwork(const StepGrid& input_psc,
                             const NetworkSpec& net);

// Full TSSL backward pass; target_psc is the kernel-filtered desired train
// for the output layer. Accumulates into *grads (must be pre-sized).
void BackwardNetwork(const ForwardRecord& rec, const StepGrid& target_psc,
                     const NetworkSpec& net, const BackpropConfig& bp,
                     GradientSet* grads);

}  // namespace tsslbp

#endif  // TSSLBP_NETWORK_HPP_
