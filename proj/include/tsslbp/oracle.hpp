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

#ifndef TSSLBP_ORACLE_HPP_
#define TSSLBP_ORACLE_HPP_

#include <vector>

#include "tsslbp/backprop.hpp"
#include "tsslbp/neuron.hpp"

namespace tsslbp {

// Literal re-evaluation of the three-case sensitivity rule by direct
// formula substitution. Shares no code with BuildPhi; the comparison of
// the two is the primary correctness oracle for the backward pass.
PhiTable PhiDirect(const LayerTrace& trace, const NeuronConfig& cfg,
                   const BackpropConfig& bp);

// Single LIF neuron driven through one synapse by a fixed input spike
// train, simulated on the continuous-time model at resolution dt/F.
struct ShiftExperiment {
  std::vector<double> input_spike_times;
  double weight = 2.0;
  double weight_perturbation = 1e-3;
  int fine_factor = 100;     // F
  double window = 10.0;      // coarse time units
  NeuronConfig neuron;
  BackpropConfig backprop;
};

struct ShiftResult {
  bool valid = false;        // same spike count in both variants
  bool clamped = false;      // slope clamp engaged in the prediction
  double dt_measured = 0.0;
  double dt_predicted = 0.0;
  double relative_error = 0.0;
};

// Measures the firing-time shift caused by the weight perturbation on the
// fine-resolution simulation and compares it against the firing-time
// linearization -du / (du/dt).
ShiftResult SpikeShiftCheck(const ShiftExperiment& exp);

// Central-difference check of the loss derivative with respect to the
// filtered output series. Returns the max relative error over entries.
double LossFdCheck(const StepGrid& actual_filtered,
                   const StepGrid& desired_filtered, double h);

}  // namespace tsslbp

#endif  // TSSLBP_ORACLE_HPP_
