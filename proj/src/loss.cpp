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

#include "tsslbp/loss.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tsslbp {

void TargetSpec::Validate() const {
  TSSLBP_REQUIRE(n_classes >= 1 && n_out >= 1 && n_steps >= 1,
                 "empty target spec");
  TSSLBP_REQUIRE(kernel_tau > 1.0, "loss kernel tau must be > 1");
  TSSLBP_REQUIRE(pattern.size() == static_cast<size_t>(n_classes),
                 "pattern table class count mismatch");
  for (const auto& p : pattern) {
    TSSLBP_REQUIRE(p.size() == static_cast<size_t>(n_out) * n_steps,
                   "pattern raster shape mismatch");
    for (auto v : p) TSSLBP_REQUIRE(v <= 1, "pattern entries must be 0/1");
  }
}

TargetSpec TargetSpec::Default(int n_classes, int n_out, int n_steps,
                               double kernel_tau) {
  TargetSpec spec;
  spec.n_classes = n_classes;
  spec.n_out = n_out;
  spec.n_steps = n_steps;
  spec.kernel_tau = kernel_tau;
  spec.pattern.assign(n_classes,
                      std::vector<uint8_t>(size_t(n_out) * n_steps, 0));
  for (int c = 0; c < n_classes && c < n_out; ++c) {
    for (int t = 0; t < n_steps; ++t) {
      spec.pattern[c][static_cast<size_t>(t) * n_out + c] = 1;
    }
  }
  return spec;
}

StepGrid EncodeTarget(int label, const TargetSpec& spec) {
  TSSLBP_REQUIRE(label >= 0 && label < spec.n_classes,
                 "label out of range: " + std::to_string(label));
  StepGrid g(spec.n_steps, spec.n_out);
  const auto& p = spec.pattern[label];
  for (size_t i = 0; i < p.size(); ++i) g.v[i] = p[i];
  return g;
}

StepGrid FilterRaster(const StepGrid& raster, double tau) {
  TSSLBP_REQUIRE(tau > 1.0, "kernel tau must be > 1");
  const double leak = 1.0 - 1.0 / tau;
  StepGrid out(raster.n_steps, raster.n_units);
  for (int t = 0; t < raster.n_steps; ++t) {
    for (int i = 0; i < raster.n_units; ++i) {
      const double prev = t > 0 ? out.at(t - 1, i) : 0.0;
      out.at(t, i) = leak * prev + raster.at(t, i);
    }
  }
  return out;
}

LossReport FilteredLoss(const StepGrid& actual_f, const StepGrid& desired_f) {
  TSSLBP_CHECK_MSG(actual_f.n_steps == desired_f.n_steps &&
                       actual_f.n_units == desired_f.n_units,
                   "filtered series shape mismatch");
  LossReport rep;
  rep.per_step.assign(actual_f.n_steps, 0.0);
  rep.per_neuron.assign(actual_f.n_units, 0.0);
  for (int t = 0; t < actual_f.n_steps; ++t) {
    for (int i = 0; i < actual_f.n_units; ++i) {
      const double d = actual_f.at(t, i) - desired_f.at(t, i);
      const double e = 0.5 * d * d;
      rep.per_step[t] += e;
      rep.per_neuron[i] += e;
      rep.total += e;
    }
  }
  return rep;
}

LossReport VanRossumLoss(const SpikeRecord& actual, const StepGrid& desired,
                         double kernel_tau) {
  TSSLBP_REQUIRE(actual.n_neurons == desired.n_units &&
                     actual.n_steps == desired.n_steps,
                 "actual/desired raster shape mismatch");
  StepGrid araster(actual.n_steps, actual.n_neurons);
  for (int t = 0; t < actual.n_steps; ++t) {
    for (int i = 0; i < actual.n_neurons; ++i) {
      araster.at(t, i) = actual.Fired(i, t) ? 1.0 : 0.0;
    }
  }
  return FilteredLoss(FilterRaster(araster, kernel_tau),
                      FilterRaster(desired, kernel_tau));
}

int Classify(const StepGrid& output_psc) {
  TSSLBP_REQUIRE(output_psc.n_units >= 1, "no output neurons");
  int best = 0;
  double best_sum = -1.0;
  for (int i = 0; i < output_psc.n_units; ++i) {
    double s = 0.0;
    for (int t = 0; t < output_psc.n_steps; ++t) s += output_psc.at(t, i);
    if (s > best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return best;
}

int ClassifyBySpikeCount(const SpikeRecord& spikes) {
  TSSLBP_REQUIRE(spikes.n_neurons >= 1, "no output neurons");
  int best = 0;
  size_t best_count = 0;
  bool first = true;
  for (int i = 0; i < spikes.n_neurons; ++i) {
    const size_t c = spikes.firing_steps[i].size();
    if (first || c > best_count) {
      best_count = c;
      best = i;
      first = false;
    }
  }
  return best;
}

TargetSpec LoadTargetPattern(const std::string& path, double kernel_tau) {
  std::ifstream in(path);
  TSSLBP_REQUIRE(in.good(), "cannot open target pattern file: " + path);
  struct Row {
    int cls;
    int neuron;
    std::string bits;
  };
  std::vector<Row> rows;
  int n_classes = 0, n_out = 0, n_steps = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Row r;
    TSSLBP_REQUIRE(bool(ls >> r.cls >> r.neuron >> r.bits),
                   "malformed target pattern line: " + line);
    for (char c : r.bits) {
      TSSLBP_REQUIRE(c == '0' || c == '1',
                     "pattern bits must be 0/1: " + line);
    }
    n_classes = std::max(n_classes, r.cls + 1);
    n_out = std::max(n_out, r.neuron + 1);
    if (n_steps == 0) n_steps = static_cast<int>(r.bits.size());
    TSSLBP_REQUIRE(static_cast<int>(r.bits.size()) == n_steps,
                   "inconsistent pattern lengths in " + path);
    rows.push_back(std::move(r));
  }
  TSSLBP_REQUIRE(!rows.empty(), "target pattern file is empty: " + path);
  TargetSpec spec;
  spec.n_classes = n_classes;
  spec.n_out = n_out;
  spec.n_steps = n_steps;
  spec.kernel_tau = kernel_tau;
  spec.pattern.assign(n_classes,
                      std::vector<uint8_t>(size_t(n_out) * n_steps, 0));
  for (const auto& r : rows) {
    for (int t = 0; t < n_steps; ++t) {
      spec.pattern[r.cls][static_cast<size_t>(t) * n_out + r.neuron] =
          r.bits[t] == '1' ? 1 : 0;
    }
  }
  spec.Validate();
  return spec;
}

void SaveTargetPattern(const TargetSpec& spec, const std::string& path) {
  std::ofstream out(path);
  TSSLBP_REQUIRE(out.good(), "cannot write target pattern file: " + path);
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int i = 0; i < spec.n_out; ++i) {
      std::string bits(spec.n_steps, '0');
      for (int t = 0; t < spec.n_steps; ++t) {
        if (spec.pattern[c][static_cast<size_t>(t) * spec.n_out + i]) {
          bits[t] = '1';
        }
      }
      out << c << ' ' << i << ' ' << bits << '\n';
    }
  }
}

}  // namespace tsslbp
