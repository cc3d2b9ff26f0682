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

#ifndef TSSLBP_CONFIG_HPP_
#define TSSLBP_CONFIG_HPP_

#include <string>

#include "tsslbp/backprop.hpp"
#include "tsslbp/layers.hpp"
#include "tsslbp/optimizer.hpp"

namespace tsslbp {

// Fully resolved run description. Parsed from a line-oriented
// "key = value" file with [section] headers; unknown keys are errors.
struct RunConfig {
  // [network]
  std::string arch = "400-10";
  Shape3 input_shape{1, 28, 28};
  int n_steps = 5;
  // [neuron]
  NeuronConfig neuron;
  // [backprop]
  BackpropConfig backprop;
  // [loss]
  double kernel_tau = 0.0;  // 0 = follow tau_s
  std::string target_pattern_path;
  bool readout_by_spikes = false;
  // [optimizer]
  OptimConfig optim;
  // [data]
  std::string data_kind = "synthetic";
  std::string train_images, train_labels, test_images, test_labels;
  int train_subset = 0;  // 0 = all
  int test_subset = 0;
  int n_classes = 10;
  // [training]
  int epochs = 10;
  int batch_size = 32;
  uint64_t seed = 1;
  bool serial = true;
  double init_scale = 3.0;
  bool use_bias = false;
  std::string out_dir = "runs/default";

  double EffectiveKernelTau() const {
    return kernel_tau > 0.0 ? kernel_tau : neuron.tau_s;
  }

  void Validate() const;

  static RunConfig Parse(const std::string& path);
  static RunConfig ParseString(const std::string& text);
  // Full resolved config as "section.key = value" lines (run manifest).
  std::string Render() const;
};

}  // namespace tsslbp

#endif  // TSSLBP_CONFIG_HPP_
