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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tsslbp/checkpoint.hpp"

using namespace tsslbp;

namespace {

RunConfig SmokeConfig(const std::string& out_dir) {
  RunConfig cfg = RunConfig::ParseString(R"(
[network]
arch = 8-4
input = 12
n_steps = 5
[data]
kind = synthetic
n_classes = 4
train_subset = 16
test_subset = 16
[training]
epochs = 2
batch_size = 4
seed = 11
)");
  cfg.out_dir = out_dir;
  cfg.backprop.dead_neuron_kappa = 0.02;
  return cfg;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config parser: values, defaults, unknown keys") {
  const auto cfg = SmokeConfig("t_run");
  CHECK(cfg.arch == "8-4");
  CHECK(cfg.input_shape.Count() == 12);
  CHECK(cfg.n_steps == 5);
  CHECK(cfg.n_classes == 4);
  CHECK(cfg.optim.lr == 5e-4);  // untouched default
  CHECK(cfg.EffectiveKernelTau() == cfg.neuron.tau_s);

  CHECK_THROWS_AS(RunConfig::ParseString("[training]\nbogus_key = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::ParseString("[training]\nepochs\n"),
                  ConfigError);
  RunConfig bad = SmokeConfig("t_run");
  bad.data_kind = "idx";
  CHECK_THROWS_AS(bad.Validate(), ConfigError);  // missing files
}

TEST_CASE("adam: zero grad no-op, first-step magnitude, determinism") {
  RunConfig cfg = SmokeConfig("t_run");
  NetworkSpec net = BuildNetwork(cfg);
  OptimConfig oc;
  Optimizer opt(oc, net);

  GradientSet zero;
  zero.Resize(net);
  const auto before = net.layers[0].weights;
  opt.Step(zero, &net);
  CHECK(net.layers[0].weights == before);

  // constant gradient from fresh state: update ~= lr * sign(g)
  NetworkSpec net2 = BuildNetwork(cfg);
  Optimizer opt2(oc, net2);
  GradientSet g;
  g.Resize(net2);
  for (auto& layer : g.by_layer) {
    for (auto& v : layer) v = 0.37;
  }
  const auto w_before = net2.layers[0].weights;
  opt2.Step(g, &net2);
  for (size_t i = 0; i < w_before.size(); ++i) {
    const double upd = double(w_before[i]) - double(net2.layers[0].weights[i]);
    CHECK(upd == doctest::Approx(oc.lr).epsilon(1e-3));
  }

  // identical calls from identical state give identical outputs
  NetworkSpec net3 = BuildNetwork(cfg);
  Optimizer opt3(oc, net3);
  opt3.Step(g, &net3);
  CHECK(net2.layers[0].weights == net3.layers[0].weights);

  // non-finite gradient aborts and names the layer
  g.by_layer[0][0] = std::nan("");
  NetworkSpec net4 = BuildNetwork(cfg);
  Optimizer opt4(oc, net4);
  CHECK_THROWS_WITH_AS(opt4.Step(g, &net4),
                       doctest::Contains("layer 0"), ConfigError);
}

TEST_CASE("checkpoint: round-trip, tamper, truncation, mismatch") {
  RunConfig cfg = SmokeConfig("t_run");
  NetworkSpec net = BuildNetwork(cfg);
  const std::string path = "t_ck.bin";
  SaveCheckpoint(net, path);

  NetworkSpec loaded = BuildNetwork(cfg);
  for (auto& w : loaded.layers[0].weights) w = 0.0f;
  LoadCheckpoint(&loaded, path);
  for (size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(loaded.layers[l].weights == net.layers[l].weights);
  }

  // flip one digest byte
  auto bytes = Slurp(path);
  bytes[13] ^= 0x40;
  {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(LoadCheckpoint(&loaded, path), CkDigestError);

  // truncated payload
  bytes[13] ^= 0x40;
  {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 9));
  }
  CHECK_THROWS_AS(LoadCheckpoint(&loaded, path), CkTruncationError);

  // bad magic
  bytes[0] = 'X';
  {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(LoadCheckpoint(&loaded, path), CkMagicError);

  // architecture mismatch rejected via digest
  SaveCheckpoint(net, path);
  RunConfig other = cfg;
  other.arch = "6-4";
  NetworkSpec net_other = BuildNetwork(other);
  CHECK_THROWS_AS(LoadCheckpoint(&net_other, path), CkDigestError);
  std::remove(path.c_str());
}

TEST_CASE("train: zero epochs leaves initialization, logs deterministic") {
  RunConfig cfg = SmokeConfig("t_run_a");
  cfg.epochs = 0;
  const auto res = Train(cfg);
  NetworkSpec init = BuildNetwork(cfg);
  for (size_t l = 0; l < init.layers.size(); ++l) {
    CHECK(res.net.layers[l].weights == init.layers[l].weights);
  }
  NetworkSpec loaded = BuildNetwork(cfg);
  LoadCheckpoint(&loaded, res.checkpoint_path);
  for (size_t l = 0; l < init.layers.size(); ++l) {
    CHECK(loaded.layers[l].weights == init.layers[l].weights);
  }

  // same seed, serial mode: bit-identical metric logs
  RunConfig a = SmokeConfig("t_run_b");
  RunConfig b = SmokeConfig("t_run_c");
  const auto ra = Train(a);
  const auto rb = Train(b);
  CHECK(Slurp("t_run_b/metrics.csv") == Slurp("t_run_c/metrics.csv"));
  for (size_t l = 0; l < ra.net.layers.size(); ++l) {
    CHECK(ra.net.layers[l].weights == rb.net.layers[l].weights);
  }
  CHECK(std::filesystem::exists("t_run_b/manifest.txt"));
  for (const auto& dir : {"t_run_a", "t_run_b", "t_run_c"}) {
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("evaluate: repeatable and does not mutate weights") {
  RunConfig cfg = SmokeConfig("t_run");
  NetworkSpec net = BuildNetwork(cfg);
  const auto ds = MakeSyntheticDataset(12, 12, 4, 3);
  std::vector<int> idx(12);
  for (int i = 0; i < 12; ++i) idx[i] = i;
  const auto target = MakeTargetSpec(cfg, net.OutputCount());
  const auto before = net.layers[0].weights;
  const auto e1 = Evaluate(net, ds, idx, target);
  const auto e2 = Evaluate(net, ds, idx, target);
  CHECK(e1.accuracy == e2.accuracy);
  CHECK(e1.mean_loss == e2.mean_loss);
  CHECK(net.layers[0].weights == before);

  // single perfectly-predicted sample
  const Sample s = MakeSample(ds, 0, net.n_steps);
  const auto rec = ForwardNetwork(s.input_psc, net);
  const int pred = Classify(rec.output_psc);
  DatasetHandle one = ds;
  one.n_samples = 1;
  one.labels[0] = static_cast<uint8_t>(pred);
  const auto e3 = Evaluate(net, one, {0}, target);
  CHECK(e3.accuracy == 1.0);
}

TEST_CASE("sparsity profile: fractions sum to one; zero weights silent") {
  RunConfig cfg = SmokeConfig("t_run");
  NetworkSpec net = BuildNetwork(cfg);
  for (auto& p : net.layers) {
    for (auto& w : p.weights) w = 0.0f;
  }
  const auto ds = MakeSyntheticDataset(8, 12, 4, 3);
  std::vector<int> idx = {0, 1, 2, 3, 4, 5, 6, 7};
  const auto rep = SparsityProfile(net, ds, idx);
  CHECK(rep.silent_fraction == 1.0);
  double sum = 0.0;
  for (double f : rep.fractions) sum += f;
  CHECK(std::abs(sum - 1.0) <= 1e-9);
  for (const auto& layer : rep.per_layer) {
    double s = 0.0;
    for (double f : layer) s += f;
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }

  // a neuron firing every step lands in the top bin
  NetworkSpec hot = BuildNetwork(cfg);
  for (auto& w : hot.layers[0].weights) w = 5.0f;
  for (auto& w : hot.layers[1].weights) w = 5.0f;
  const auto rep2 = SparsityProfile(hot, ds, idx);
  CHECK(rep2.fractions[cfg.n_steps] > 0.0);
}

TEST_CASE("run manifest captures the resolved config") {
  RunConfig cfg = SmokeConfig("t_run_m");
  cfg.epochs = 0;
  Train(cfg);
  const auto manifest = Slurp("t_run_m/manifest.txt");
  CHECK(manifest.find("network.arch = 8-4") != std::string::npos);
  CHECK(manifest.find("training.seed = 11") != std::string::npos);
  CHECK(manifest.find("resolved.config_digest") != std::string::npos);
  std::filesystem::remove_all("t_run_m");
}
