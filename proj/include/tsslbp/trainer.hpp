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

#ifndef TSSLBP_TRAINER_HPP_
#define TSSLBP_TRAINER_HPP_

#include <string>
#include <vector>

#include "tsslbp/config.hpp"
#include "tsslbp/data.hpp"
#include "tsslbp/loss.hpp"
#include "tsslbp/network.hpp"
#include "tsslbp/optimizer.hpp"

namespace tsslbp {

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double test_acc = 0.0;
  int64_t wall_ms = 0;
};

struct TrainResult {
  NetworkSpec net;
  std::vector<EpochMetrics> history;
  std::string checkpoint_path;  // last epoch checkpoint
};

struct EvalResult {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  int n_samples = 0;
};

// Histogram of neurons by firing count within the window, averaged over
// samples. fractions[c] is the share of neurons that fired exactly c
// times; index n_steps+... is clamped at n_steps.
struct SparsityReport {
  std::vector<double> fractions;                 // overall, size n_steps+1
  std::vector<std::vector<double>> per_layer;    // spiking layers only
  std::vector<int> layer_index;                  // network layer id
  double silent_fraction = 0.0;
};

// Builds the (unpopulated) network described by a config and initializes
// weights from its seed.
NetworkSpec BuildNetwork(const RunConfig& cfg);

// Deterministic in-memory dataset for tests and smoke runs: each class has
// a fixed random prototype, samples are noisy copies.
DatasetHandle MakeSyntheticDataset(int n_samples, int channels, int n_classes,
                                   uint64_t seed);

DatasetHandle LoadTrainSet(const RunConfig& cfg);
DatasetHandle LoadTestSet(const RunConfig& cfg);
TargetSpec MakeTargetSpec(const RunConfig& cfg, int n_out);

// Full training loop: per-epoch metrics CSV, checkpoint per epoch, and a
// plain-text manifest of the resolved config, all under cfg.out_dir.
TrainResult Train(const RunConfig& cfg);

EvalResult Evaluate(const NetworkSpec& net, const DatasetHandle& ds,
                    const std::vector<int>& indices, const TargetSpec& target,
                    bool readout_by_spikes = false);

SparsityReport SparsityProfile(const NetworkSpec& net,
                               const DatasetHandle& ds,
                               const std::vector<int>& indices);

// Throws with layer/step/neuron coordinates if any trace value is
// non-finite; the non-finite-loss abort path.
void CheckRecordFinite(const ForwardRecord& rec);

}  // namespace tsslbp

#endif  // TSSLBP_TRAINER_HPP_
