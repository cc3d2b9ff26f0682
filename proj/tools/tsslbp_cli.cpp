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

// Command-line front end: train / eval / gradcheck / sparsity / arch-parse.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsslbp/checkpoint.hpp"
#include "tsslbp/oracle.hpp"
#include "tsslbp/trainer.hpp"

namespace {

using namespace tsslbp;

int CmdTrain(const std::string& config_path, int64_t seed_override,
             bool force_serial) {
  RunConfig cfg = RunConfig::Parse(config_path);
  if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
  if (force_serial) cfg.serial = true;
  cfg.Validate();
  const TrainResult res = Train(cfg);
  if (!res.history.empty()) {
    const auto& last = res.history.back();
    std::printf("final: epoch %d train_loss %.6f test_acc %.4f\n", last.epoch,
                last.train_loss, last.test_acc);
  }
  std::printf("checkpoint: %s\n", res.checkpoint_path.c_str());
  return 0;
}

int CmdEval(const std::string& ckpt, const std::string& config_path,
            bool use_train_split) {
  RunConfig cfg = RunConfig::Parse(config_path);
  cfg.Validate();
  NetworkSpec net = BuildNetwork(cfg);
  LoadCheckpoint(&net, ckpt);
  const DatasetHandle ds =
      use_train_split ? LoadTrainSet(cfg) : LoadTestSet(cfg);
  const auto idx = SubsetIndices(
      ds.n_samples, use_train_split ? cfg.train_subset : cfg.test_subset,
      cfg.seed);
  const TargetSpec target = MakeTargetSpec(cfg, net.OutputCount());
  const EvalResult r =
      Evaluate(net, ds, idx, target, cfg.readout_by_spikes);
  std::printf("samples %d accuracy %.4f mean_loss %.6f\n", r.n_samples,
              r.accuracy, r.mean_loss);
  return 0;
}

// Self-contained derivative checks; prints one line per probe.
int CmdGradcheck(const std::string& which) {
  bool ok = true;
  NeuronConfig neuron;
  BackpropConfig bp;

  if (which == "all" || which == "phi") {
    double worst = 0.0;
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> dist(-0.3, 0.9);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + trial % 4;
      const int steps = 5 + trial % 8;
      StepGrid i_net(steps, n);
      for (double& v : i_net.v) v = dist(rng);
      const LayerTrace trace = SimulateDynamics(i_net, neuron);
      const PhiTable got = BuildPhi(trace, neuron, bp);
      const PhiTable want = PhiDirect(trace, neuron, bp);
      for (int i = 0; i < n; ++i)
        for (int tk = 0; tk < steps; ++tk)
          for (int tm = 0; tm <= tk; ++tm) {
            const double a = got.At(i, tk, tm), b = want.At(i, tk, tm);
            const double rel =
                std::abs(a - b) / std::max(std::abs(b), 1e-12);
            if (rel > worst) worst = rel;
          }
    }
    const bool pass = worst <= 1e-12;
    ok = ok && pass;
    std::printf("phi     max_rel_err %.3e  %s\n", worst,
                pass ? "pass" : "FAIL");
  }

  if (which == "all" || which == "shift") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> wdist(1.8, 3.5);
    std::uniform_real_distribution<double> tdist(0.5, 3.0);
    std::vector<double> errs;
    for (int trial = 0; trial < 20; ++trial) {
      ShiftExperiment exp;
      exp.weight = wdist(rng);
      exp.input_spike_times = {tdist(rng), tdist(rng) + 1.0,
                               tdist(rng) + 2.0};
      const ShiftResult r = SpikeShiftCheck(exp);
      if (r.valid) errs.push_back(r.relative_error);
    }
    std::sort(errs.begin(), errs.end());
    const double median =
        errs.empty() ? 1.0 : errs[errs.size() / 2];
    const bool pass = !errs.empty() && median <= 0.3;
    ok = ok && pass;
    std::printf("shift   median_rel_err %.3e over %zu circuits  %s\n", median,
                errs.size(), pass ? "pass" : "FAIL");
  }

  if (which == "all" || which == "loss") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> dist(0.0, 2.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      StepGrid actual(5, 4), desired(5, 4);
      for (double& v : actual.v) v = dist(rng);
      for (double& v : desired.v) v = dist(rng);
      worst = std::max(worst, LossFdCheck(actual, desired, 1e-3));
    }
    const bool pass = worst <= 1e-5;
    ok = ok && pass;
    std::printf("loss    max_rel_err %.3e  %s\n", worst,
                pass ? "pass" : "FAIL");
  }
  return ok ? 0 : 1;
}

int CmdSparsity(const std::string& ckpt, const std::string& config_path,
                int n_samples) {
  RunConfig cfg = RunConfig::Parse(config_path);
  cfg.Validate();
  NetworkSpec net = BuildNetwork(cfg);
  LoadCheckpoint(&net, ckpt);
  const DatasetHandle ds = LoadTestSet(cfg);
  auto idx = SubsetIndices(ds.n_samples, n_samples, cfg.seed);
  const SparsityReport rep = SparsityProfile(net, ds, idx);
  std::printf("silent fraction: %.4f\n", rep.silent_fraction);
  std::printf("spikes  fraction of neurons\n");
  for (size_t c = 0; c < rep.fractions.size(); ++c) {
    std::printf("%5zu%s  %.4f\n", c,
                c + 1 == rep.fractions.size() ? "+" : " ", rep.fractions[c]);
  }
  for (size_t l = 0; l < rep.per_layer.size(); ++l) {
    std::printf("layer %d silent %.4f\n", rep.layer_index[l],
                rep.per_layer[l][0]);
  }
  return 0;
}

int CmdArchParse(const std::string& arch, const std::string& input) {
  RunConfig cfg;
  cfg.arch = arch;
  if (!input.empty()) {
    cfg = RunConfig::ParseString("[network]\ninput = " + input);
    cfg.arch = arch;
  }
  NeuronConfig neuron;
  const auto layers = ParseArchitecture(arch, cfg.input_shape);
  std::printf("input: %dx%dx%d (%d units)\n", cfg.input_shape.c,
              cfg.input_shape.h, cfg.input_shape.w, cfg.input_shape.Count());
  for (size_t l = 0; l < layers.size(); ++l) {
    const auto& p = layers[l];
    const char* kind = p.kind == LayerKind::kDense    ? "dense"
                       : p.kind == LayerKind::kConv2d ? "conv"
                                                      : "avgpool";
    std::printf("layer %zu: %-7s out %dx%dx%d (%d units), %zu weights\n", l,
                kind, p.out_shape.c, p.out_shape.h, p.out_shape.w,
                p.out_shape.Count(), p.WeightCount());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking network trainer"};
  app.require_subcommand(1);

  std::string config_path, ckpt, arch, input_shape, gc_case = "all";
  int64_t seed_override = -1;
  bool force_serial = false, use_train_split = false;
  int n_samples = 100;

  auto* train = app.add_subcommand("train", "Train from a config file");
  train->add_option("--config", config_path, "run config path")->required();
  train->add_option("--seed", seed_override, "override the config seed");
  train->add_flag("--serial", force_serial, "force serial mode");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", ckpt)->required();
  eval->add_option("--config", config_path, "config describing the data")
      ->required();
  eval->add_flag("--train-split", use_train_split,
                 "evaluate on the training split");

  auto* gradcheck =
      app.add_subcommand("gradcheck", "Run the derivative oracles");
  gradcheck->add_option("--case", gc_case, "phi|shift|loss|all")
      ->check(CLI::IsMember({"phi", "shift", "loss", "all"}));

  auto* sparsity =
      app.add_subcommand("sparsity", "Firing-count histogram on test data");
  sparsity->add_option("--checkpoint", ckpt)->required();
  sparsity->add_option("--config", config_path)->required();
  sparsity->add_option("--samples", n_samples)->check(CLI::PositiveNumber);

  auto* arch_parse =
      app.add_subcommand("arch-parse", "Print resolved layer shapes");
  arch_parse->add_option("arch", arch, "e.g. 15C5-P2-40C5-P2-300-10")
      ->required();
  arch_parse->add_option("--input", input_shape, "CxHxW or N (default 1x28x28)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return CmdTrain(config_path, seed_override, force_serial);
    if (*eval) return CmdEval(ckpt, config_path, use_train_split);
    if (*gradcheck) return CmdGradcheck(gc_case);
    if (*sparsity) return CmdSparsity(ckpt, config_path, n_samples);
    if (*arch_parse) return CmdArchParse(arch, input_shape);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
