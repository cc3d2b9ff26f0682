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

#include "tsslbp/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "tsslbp/checkpoint.hpp"

namespace tsslbp {

NetworkSpec BuildNetwork(const RunConfig& cfg) {
  cfg.Validate();
  NetworkSpec net;
  net.neuron = cfg.neuron;
  net.n_steps = cfg.n_steps;
  net.layers = ParseArchitecture(cfg.arch, cfg.input_shape);
  if (cfg.use_bias) {
    for (auto& p : net.layers) {
      if (p.Spiking()) {
        p.bias.assign(p.kind == LayerKind::kConv2d ? p.out_shape.c
                                                   : p.out_shape.Count(),
                      0.0f);
      }
    }
  }
  InitWeights(&net, cfg.seed, cfg.init_scale);
  net.Validate();
  return net;
}

DatasetHandle MakeSyntheticDataset(int n_samples, int channels, int n_classes,
                                   uint64_t seed) {
  DatasetHandle ds;
  ds.kind = SourceKind::kSynthetic;
  ds.n_samples = n_samples;
  ds.channels = channels;
  ds.height = 1;
  ds.width = channels;
  ds.pixels.resize(static_cast<size_t>(n_samples) * channels);
  ds.labels.resize(n_samples);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<float> proto(static_cast<size_t>(n_classes) * channels);
  for (auto& v : proto) v = static_cast<float>(unit(rng));
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int s = 0; s < n_samples; ++s) {
    const int c = s % n_classes;
    ds.labels[s] = static_cast<uint8_t>(c);
    for (int i = 0; i < channels; ++i) {
      double v = proto[static_cast<size_t>(c) * channels + i] + noise(rng);
      ds.pixels[static_cast<size_t>(s) * channels + i] =
          static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return ds;
}

DatasetHandle LoadTrainSet(const RunConfig& cfg) {
  if (cfg.data_kind == "idx") {
    return LoadIdx(cfg.train_images, cfg.train_labels);
  }
  if (cfg.data_kind == "cifar") {
    return LoadCifarBatch(cfg.train_images);
  }
  const int n = cfg.train_subset > 0 ? cfg.train_subset : 64;
  return MakeSyntheticDataset(n, cfg.input_shape.Count(), cfg.n_classes,
                              cfg.seed ^ 0x7261696eull);
}

DatasetHandle LoadTestSet(const RunConfig& cfg) {
  if (cfg.data_kind == "idx") {
    return LoadIdx(cfg.test_images, cfg.test_labels);
  }
  if (cfg.data_kind == "cifar") {
    return LoadCifarBatch(cfg.test_images);
  }
  const int n = cfg.test_subset > 0 ? cfg.test_subset : 64;
  return MakeSyntheticDataset(n, cfg.input_shape.Count(), cfg.n_classes,
                              cfg.seed ^ 0x74657374ull);
}

TargetSpec MakeTargetSpec(const RunConfig& cfg, int n_out) {
  if (!cfg.target_pattern_path.empty()) {
    TargetSpec spec =
        LoadTargetPattern(cfg.target_pattern_path, cfg.EffectiveKernelTau());
    TSSLBP_REQUIRE(spec.n_out <= n_out && spec.n_steps == cfg.n_steps,
                   "target pattern shape does not fit the network");
    spec.n_out = n_out;
    return spec;
  }
  return TargetSpec::Default(cfg.n_classes, n_out, cfg.n_steps,
                             cfg.EffectiveKernelTau());
}

void CheckRecordFinite(const ForwardRecord& rec) {
  for (size_t l = 0; l < rec.traces.size(); ++l) {
    if (!rec.traces[l].has_value()) continue;
    const auto& tr = *rec.traces[l];
    for (int t = 0; t < tr.u.n_steps; ++t) {
      for (int i = 0; i < tr.u.n_units; ++i) {
        if (!std::isfinite(tr.u.at(t, i)) || !std::isfinite(tr.a.at(t, i))) {
          throw ConfigError("non-finite state at layer " + std::to_string(l) +
                            ", step " + std::to_string(t) + ", neuron " +
                            std::to_string(i));
        }
      }
    }
  }
}

namespace {

std::vector<int> AllOrSubset(const DatasetHandle& ds, int subset,
                             uint64_t seed) {
  if (subset > 0 && subset < ds.n_samples) {
    return SubsetIndices(ds.n_samples, subset, seed);
  }
  std::vector<int> idx(ds.n_samples);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

EvalResult Evaluate(const NetworkSpec& net, const DatasetHandle& ds,
                    const std::vector<int>& indices, const TargetSpec& target,
                    bool readout_by_spikes) {
  EvalResult res;
  res.n_samples = static_cast<int>(indices.size());
  int correct = 0;
  double loss = 0.0;
  for (int idx : indices) {
    const Sample s = MakeSample(ds, idx, net.n_steps);
    const ForwardRecord rec = ForwardNetwork(s.input_psc, net);
    const int pred =
        readout_by_spikes
            ? ClassifyBySpikeCount(rec.traces.back()->spikes)
            : Classify(rec.output_psc);
    if (pred == s.label) ++correct;
    const StepGrid desired = EncodeTarget(s.label, target);
    loss += VanRossumLoss(rec.traces.back()->spikes, desired,
                          target.kernel_tau)
                .total;
  }
  if (res.n_samples > 0) {
    res.accuracy = double(correct) / res.n_samples;
    res.mean_loss = loss / res.n_samples;
  }
  return res;
}

SparsityReport SparsityProfile(const NetworkSpec& net,
                               const DatasetHandle& ds,
                               const std::vector<int>& indices) {
  TSSLBP_REQUIRE(!indices.empty(), "need at least one sample");
  SparsityReport rep;
  const int bins = net.n_steps + 1;
  std::vector<int> spiking_layers;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    if (net.layers[l].Spiking()) {
      spiking_layers.push_back(static_cast<int>(l));
    }
  }
  rep.layer_index = spiking_layers;
  rep.per_layer.assign(spiking_layers.size(), std::vector<double>(bins, 0.0));
  rep.fractions.assign(bins, 0.0);

  for (int idx : indices) {
    const Sample s = MakeSample(ds, idx, net.n_steps);
    const ForwardRecord rec = ForwardNetwork(s.input_psc, net);
    int total_neurons = 0;
    std::vector<double> overall(bins, 0.0);
    for (size_t li = 0; li < spiking_layers.size(); ++li) {
      const auto& spikes = rec.traces[spiking_layers[li]]->spikes;
      std::vector<double> counts(bins, 0.0);
      for (int i = 0; i < spikes.n_neurons; ++i) {
        const int c = std::min<int>(
            static_cast<int>(spikes.firing_steps[i].size()), net.n_steps);
        counts[c] += 1.0;
        overall[c] += 1.0;
      }
      total_neurons += spikes.n_neurons;
      for (int b = 0; b < bins; ++b) {
        rep.per_layer[li][b] += counts[b] / spikes.n_neurons;
      }
    }
    for (int b = 0; b < bins; ++b) {
      rep.fractions[b] += overall[b] / total_neurons;
    }
  }
  const double inv = 1.0 / indices.size();
  for (auto& f : rep.fractions) f *= inv;
  for (auto& layer : rep.per_layer) {
    for (auto& f : layer) f *= inv;
  }
  rep.silent_fraction = rep.fractions[0];
  return rep;
}

TrainResult Train(const RunConfig& cfg) {
  cfg.Validate();
  TrainResult result;
  result.net = BuildNetwork(cfg);
  NetworkSpec& net = result.net;

  const DatasetHandle train_ds = LoadTrainSet(cfg);
  const DatasetHandle test_ds = LoadTestSet(cfg);
  const std::vector<int> train_idx =
      AllOrSubset(train_ds, cfg.train_subset, cfg.seed ^ 0x11);
  const std::vector<int> test_idx =
      AllOrSubset(test_ds, cfg.test_subset, cfg.seed ^ 0x22);
  const TargetSpec target = MakeTargetSpec(cfg, net.OutputCount());
  const double loss_tau = target.kernel_tau;

  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream manifest(cfg.out_dir + "/manifest.txt");
  manifest << cfg.Render();
  manifest << "resolved.train_samples = " << train_idx.size() << "\n"
           << "resolved.test_samples = " << test_idx.size() << "\n"
           << "resolved.config_digest = " << ConfigDigest(net) << "\n";
  manifest.close();

  std::ofstream metrics(cfg.out_dir + "/metrics.csv");
  metrics << "epoch,train_loss,test_acc,wall_ms\n";

  Optimizer optim(cfg.optim, net);
  GradientSet grads, sample_grads;
  grads.Resize(net);
  sample_grads.Resize(net);

  // Pre-filter the per-class targets once per run.
  std::vector<StepGrid> target_filtered(target.n_classes);
  for (int c = 0; c < target.n_classes; ++c) {
    target_filtered[c] = FilterRaster(EncodeTarget(c, target), loss_tau);
  }

  result.checkpoint_path = cfg.out_dir + "/epoch_0.ckpt";
  SaveCheckpoint(net, result.checkpoint_path);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    optim.set_lr(cfg.optim.lr * std::pow(cfg.optim.lr_decay, epoch - 1));
    double epoch_loss = 0.0;
    size_t n_seen = 0;
    const auto batches = MakeBatches(static_cast<int>(train_idx.size()),
                                     cfg.batch_size, cfg.seed, epoch);
    for (const auto& batch : batches) {
      for (auto& g : grads.by_layer) std::fill(g.begin(), g.end(), 0.0);
      for (auto& g : grads.bias_by_layer) std::fill(g.begin(), g.end(), 0.0);
      for (int bi : batch) {
        const Sample s = MakeSample(train_ds, train_idx[bi], net.n_steps);
        const ForwardRecord rec = ForwardNetwork(s.input_psc, net);
        const LossReport rep =
            FilteredLoss(FilterRaster([&] {
                           StepGrid r(net.n_steps, net.OutputCount());
                           const auto& sp = rec.traces.back()->spikes;
                           for (int t = 0; t < r.n_steps; ++t)
                             for (int i = 0; i < r.n_units; ++i)
                               r.at(t, i) = sp.Fired(i, t) ? 1.0 : 0.0;
                           return r;
                         }(), loss_tau),
                         target_filtered[s.label]);
        if (!std::isfinite(rep.total)) CheckRecordFinite(rec);
        epoch_loss += rep.total;
        ++n_seen;

        for (auto& g : sample_grads.by_layer) {
          std::fill(g.begin(), g.end(), 0.0);
        }
        for (auto& g : sample_grads.bias_by_layer) {
          std::fill(g.begin(), g.end(), 0.0);
        }
        BackwardNetwork(rec, target_filtered[s.label], net, cfg.backprop,
                        &sample_grads);
        grads.Add(sample_grads);
      }
      grads.Scale(1.0 / batch.size());
      optim.Step(grads, &net);
    }
    const EvalResult ev =
        Evaluate(net, test_ds, test_idx, target, cfg.readout_by_spikes);
    const auto t1 = std::chrono::steady_clock::now();
    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = n_seen ? epoch_loss / n_seen : 0.0;
    em.test_acc = ev.accuracy;
    em.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    result.history.push_back(em);
    metrics << em.epoch << ',' << em.train_loss << ',' << em.test_acc << ','
            << em.wall_ms << '\n';
    metrics.flush();

    result.checkpoint_path =
        cfg.out_dir + "/epoch_" + std::to_string(epoch) + ".ckpt";
    SaveCheckpoint(net, result.checkpoint_path);
  }
  return result;
}

}  // namespace tsslbp
