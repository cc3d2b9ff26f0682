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

#include "tsslbp/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace tsslbp {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool ParseBool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

Shape3 ParseShape(const std::string& v) {
  Shape3 s;
  char x1, x2;
  std::istringstream is(v);
  if (is >> s.c >> x1 >> s.h >> x2 >> s.w && x1 == 'x' && x2 == 'x') {
    return s;
  }
  std::istringstream is2(v);
  int n;
  if (is2 >> n) return Shape3{1, 1, n};
  throw ConfigError("bad shape (want CxHxW or N): " + v);
}

}  // namespace

void RunConfig::Validate() const {
  neuron.Validate();
  TSSLBP_REQUIRE(n_steps >= 1, "n_steps must be >= 1");
  TSSLBP_REQUIRE(epochs >= 0, "epochs must be >= 0");
  TSSLBP_REQUIRE(batch_size >= 1, "batch_size must be >= 1");
  TSSLBP_REQUIRE(n_classes >= 1, "n_classes must be >= 1");
  TSSLBP_REQUIRE(optim.lr > 0.0, "learning rate must be positive");
  TSSLBP_REQUIRE(optim.lr_decay > 0.0 && optim.lr_decay <= 1.0,
                 "lr_decay must be in (0, 1]");
  TSSLBP_REQUIRE(init_scale > 0.0, "init_scale must be positive");
  TSSLBP_REQUIRE(kernel_tau == 0.0 || kernel_tau > 1.0,
                 "kernel_tau must be > 1 (or 0 to follow tau_s)");
  TSSLBP_REQUIRE(data_kind == "synthetic" || data_kind == "idx" ||
                     data_kind == "cifar" || data_kind == "events",
                 "unknown data kind: " + data_kind);
  if (data_kind == "idx") {
    for (const auto* p :
         {&train_images, &train_labels, &test_images, &test_labels}) {
      TSSLBP_REQUIRE(!p->empty(), "idx data requires all four file paths");
      TSSLBP_REQUIRE(std::filesystem::exists(*p), "missing file: " + *p);
    }
  }
  if (!target_pattern_path.empty()) {
    TSSLBP_REQUIRE(std::filesystem::exists(target_pattern_path),
                   "missing target pattern file: " + target_pattern_path);
  }
}

RunConfig RunConfig::ParseString(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      TSSLBP_REQUIRE(line.back() == ']',
                     "bad section header at line " + std::to_string(lineno));
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    TSSLBP_REQUIRE(eq != std::string::npos,
                   "expected key = value at line " + std::to_string(lineno));
    const std::string key = Trim(line.substr(0, eq));
    const std::string val = Trim(line.substr(eq + 1));
    const std::string k = section + "." + key;

    if (k == "network.arch") cfg.arch = val;
    else if (k == "network.input") cfg.input_shape = ParseShape(val);
    else if (k == "network.n_steps") cfg.n_steps = std::stoi(val);
    else if (k == "neuron.tau_m") cfg.neuron.tau_m = std::stod(val);
    else if (k == "neuron.tau_s") cfg.neuron.tau_s = std::stod(val);
    else if (k == "neuron.v_th") cfg.neuron.v_th = std::stod(val);
    else if (k == "backprop.eps_slope") cfg.backprop.eps_slope = std::stod(val);
    else if (k == "backprop.dead_neuron_kappa")
      cfg.backprop.dead_neuron_kappa = std::stod(val);
    else if (k == "loss.kernel_tau") cfg.kernel_tau = std::stod(val);
    else if (k == "loss.target_pattern") cfg.target_pattern_path = val;
    else if (k == "loss.readout") {
      if (val == "psc") cfg.readout_by_spikes = false;
      else if (val == "spikes") cfg.readout_by_spikes = true;
      else throw ConfigError("bad readout (want psc|spikes): " + val);
    } else if (k == "optimizer.kind") {
      if (val == "adam") cfg.optim.kind = OptimKind::kAdam;
      else if (val == "sgd") cfg.optim.kind = OptimKind::kSgd;
      else throw ConfigError("bad optimizer kind: " + val);
    } else if (k == "optimizer.lr") cfg.optim.lr = std::stod(val);
    else if (k == "optimizer.beta1") cfg.optim.beta1 = std::stod(val);
    else if (k == "optimizer.beta2") cfg.optim.beta2 = std::stod(val);
    else if (k == "optimizer.eps") cfg.optim.eps = std::stod(val);
    else if (k == "optimizer.lr_decay") cfg.optim.lr_decay = std::stod(val);
    else if (k == "data.kind") cfg.data_kind = val;
    else if (k == "data.train_images") cfg.train_images = val;
    else if (k == "data.train_labels") cfg.train_labels = val;
    else if (k == "data.test_images") cfg.test_images = val;
    else if (k == "data.test_labels") cfg.test_labels = val;
    else if (k == "data.train_subset") cfg.train_subset = std::stoi(val);
    else if (k == "data.test_subset") cfg.test_subset = std::stoi(val);
    else if (k == "data.n_classes") cfg.n_classes = std::stoi(val);
    else if (k == "training.epochs") cfg.epochs = std::stoi(val);
    else if (k == "training.batch_size") cfg.batch_size = std::stoi(val);
    else if (k == "training.seed") cfg.seed = std::stoull(val);
    else if (k == "training.serial") cfg.serial = ParseBool(val, k);
    else if (k == "training.init_scale") cfg.init_scale = std::stod(val);
    else if (k == "training.use_bias") cfg.use_bias = ParseBool(val, k);
    else if (k == "training.out_dir") cfg.out_dir = val;
    else throw ConfigError("unknown config key: " + k);
  }
  return cfg;
}

RunConfig RunConfig::Parse(const std::string& path) {
  std::ifstream in(path);
  TSSLBP_REQUIRE(in.good(), "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseString(ss.str());
}

std::string RunConfig::Render() const {
  std::ostringstream os;
  os << "network.arch = " << arch << "\n"
     << "network.input = " << input_shape.c << "x" << input_shape.h << "x"
     << input_shape.w << "\n"
     << "network.n_steps = " << n_steps << "\n"
     << "neuron.tau_m = " << neuron.tau_m << "\n"
     << "neuron.tau_s = " << neuron.tau_s << "\n"
     << "neuron.v_th = " << neuron.v_th << "\n"
     << "backprop.eps_slope = " << backprop.EffectiveEpsSlope(neuron) << "\n"
     << "backprop.dead_neuron_kappa = " << backprop.dead_neuron_kappa << "\n"
     << "loss.kernel_tau = " << EffectiveKernelTau() << "\n"
     << "loss.target_pattern = " << target_pattern_path << "\n"
     << "loss.readout = " << (readout_by_spikes ? "spikes" : "psc") << "\n"
     << "optimizer.kind = "
     << (optim.kind == OptimKind::kAdam ? "adam" : "sgd") << "\n"
     << "optimizer.lr = " << optim.lr << "\n"
     << "optimizer.beta1 = " << optim.beta1 << "\n"
     << "optimizer.beta2 = " << optim.beta2 << "\n"
     << "optimizer.eps = " << optim.eps << "\n"
     << "optimizer.lr_decay = " << optim.lr_decay << "\n"
     << "data.kind = " << data_kind << "\n"
     << "data.train_images = " << train_images << "\n"
     << "data.train_labels = " << train_labels << "\n"
     << "data.test_images = " << test_images << "\n"
     << "data.test_labels = " << test_labels << "\n"
     << "data.train_subset = " << train_subset << "\n"
     << "data.test_subset = " << test_subset << "\n"
     << "data.n_classes = " << n_classes << "\n"
     << "training.epochs = " << epochs << "\n"
     << "training.batch_size = " << batch_size << "\n"
     << "training.seed = " << seed << "\n"
     << "training.serial = " << (serial ? "true" : "false") << "\n"
     << "training.init_scale = " << init_scale << "\n"
     << "training.use_bias = " << (use_bias ? "true" : "false") << "\n"
     << "training.out_dir = " << out_dir << "\n";
  return os.str();
}

}  // namespace tsslbp
