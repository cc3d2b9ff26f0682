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

#ifndef TSSLBP_LOSS_HPP_
#define TSSLBP_LOSS_HPP_

#include <string>
#include <vector>

#include "tsslbp/common.hpp"
#include "tsslbp/neuron.hpp"

namespace tsslbp {

// Desired output rasters per class plus the loss kernel time constant.
struct TargetSpec {
  int n_classes = 0;
  int n_out = 0;
  int n_steps = 0;
  double kernel_tau = 3.0;
  // [class][t * n_out + neuron], binary.
  std::vector<std::vector<uint8_t>> pattern;

  void Validate() const;

  // Default pattern: the label's neuron fires at every step, the rest stay
  // silent.
  static TargetSpec Default(int n_classes, int n_out, int n_steps,
                            double kernel_tau);
};

struct LossReport {
  double total = 0.0;
  std::vector<double> per_step;
  std::vector<double> per_neuron;
};

// Returns the desired raster for a label as a [n_steps x n_out] grid of
// 0/1 values.
StepGrid EncodeTarget(int label, const TargetSpec& spec);

// Filters a binary raster with the first-order kernel (same recursion as
// the synaptic PSC) using time constant tau.
StepGrid FilterRaster(const StepGrid& raster, double tau);

// Van Rossum-kernel squared distance between the actual and desired
// rasters: E[t] = 1/2 sum_i (filtered difference)^2, L = sum_t E[t].
LossReport VanRossumLoss(const SpikeRecord& actual, const StepGrid& desired,
                         double kernel_tau);

// Same loss evaluated on already-filtered series; gradient path helper.
LossReport FilteredLoss(const StepGrid& actual_f, const StepGrid& desired_f);

// Argmax over output neurons of the summed PSC; ties go to the lowest
// index. If by_spike_count is set, sums the raster instead.
int Classify(const StepGrid& output_psc);
int ClassifyBySpikeCount(const SpikeRecord& spikes);

// Plain-text pattern table: one line per (class, neuron) of the form
// "class neuron 010110...". Round-trips through SaveTargetPattern.
TargetSpec LoadTargetPattern(const std::string& path, double kernel_tau);
void SaveTargetPattern(const TargetSpec& spec, const std::string& path);

}  // namespace tsslbp

#endif  // TSSLBP_LOSS_HPP_
