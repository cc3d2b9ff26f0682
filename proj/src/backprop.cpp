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

#include "tsslbp/backprop.hpp"

#include <algorithm>
#include <cmath>

namespace tsslbp {

double DuDtAtSpike(const LayerTrace& trace, int neuron, int t_m,
                   const NeuronConfig& cfg, const BackpropConfig& bp) {
  TSSLBP_CHECK_MSG(trace.spikes.Fired(neuron, t_m),
                   "du/dt queried at a non-firing step");
  const double raw =
      (-trace.u.at(t_m, neuron) + trace.i_net.at(t_m, neuron)) / cfg.tau_m;
  return std::max(raw, bp.EffectiveEpsSlope(cfg));
}

double DpscDtm(int t_k, int t_m, const NeuronConfig& cfg) {
  TSSLBP_CHECK(t_m <= t_k);
  return std::exp(-(t_k - t_m) / cfg.tau_s) / cfg.tau_s;
}

double DresetDtm(int t_p, int t_m, const NeuronConfig& cfg) {
  TSSLBP_CHECK(t_m <= t_p);
  return -cfg.v_th / cfg.tau_m * std::exp(-(t_p - t_m) / cfg.tau_m);
}

namespace {
double SigmoidPrime(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 - s);
}
}  // namespace

PhiTable BuildPhi(const LayerTrace& trace, const NeuronConfig& cfg,
                  const BackpropConfig& bp) {
  const int n = trace.spikes.n_neurons;
  const int steps = trace.spikes.n_steps;
  PhiTable phi(n, steps);

  for (int i = 0; i < n; ++i) {
    const auto& fires = trace.spikes.firing_steps[i];
    if (fires.empty()) {
      if (bp.dead_neuron_kappa != 0.0) {
        for (int t = 0; t < steps; ++t) {
          phi.At(i, t, t) = bp.dead_neuron_kappa *
                            SigmoidPrime(trace.u.at(t, i) - cfg.v_th);
        }
      }
      continue;
    }
    // Walk firing steps from the latest backwards so the chained entry
    // phi(t_k, t_p) already exists when t_m is handled.
    for (auto it = fires.rbegin(); it != fires.rend(); ++it) {
      const int t_m = *it;
      // In the discrete simulator, raising u[t_m] strengthens the spike's
      // downstream PSC contribution, so the surrogate gain is positive with
      // magnitude 1/(du/dt); DuDtAtSpike floors the slope for grazing spikes.
      const double gain = 1.0 / DuDtAtSpike(trace, i, t_m, cfg, bp);
      const int t_p = (it == fires.rbegin()) ? -1 : *std::prev(it);
      for (int t_k = t_m; t_k < steps; ++t_k) {
        double val = DpscDtm(t_k, t_m, cfg) * gain;
        if (t_p >= 0 && t_p < t_k) {
          // Reset-mediated coupling to the immediately next firing time.
          val -= phi.At(i, t_k, t_p) * DresetDtm(t_p, t_m, cfg) * gain;
        }
        phi.At(i, t_k, t_m) = val;
      }
    }
  }
  return phi;
}

DeltaTrace DeltaOutput(const StepGrid& out_psc, const StepGrid& target_psc,
                       const PhiTable& phi) {
  TSSLBP_CHECK_MSG(out_psc.n_steps == target_psc.n_steps &&
                       out_psc.n_units == target_psc.n_units,
                   "output/target series length mismatch");
  TSSLBP_CHECK(out_psc.n_units == phi.n_neurons &&
               out_psc.n_steps == phi.n_steps);
  const int n = out_psc.n_units;
  const int steps = out_psc.n_steps;
  DeltaTrace dt(n, steps);
  for (int i = 0; i < n; ++i) {
    for (int t_m = 0; t_m < steps; ++t_m) {
      double acc = 0.0;
      for (int t_k = t_m; t_k < steps; ++t_k) {
        const double err = out_psc.at(t_k, i) - target_psc.at(t_k, i);
        acc += err * phi.At(i, t_k, t_m);
      }
      dt.delta.at(t_m, i) = acc;
    }
  }
  return dt;
}

DeltaTrace DeltaFromBackCurrent(const StepGrid& back_current,
                                const PhiTable& phi) {
  TSSLBP_CHECK(back_current.n_units == phi.n_neurons &&
               back_current.n_steps == phi.n_steps);
  const int n = phi.n_neurons;
  const int steps = phi.n_steps;
  DeltaTrace dt(n, steps);
  for (int i = 0; i < n; ++i) {
    for (int t_m = 0; t_m < steps; ++t_m) {
      double acc = 0.0;
      for (int t_k = t_m; t_k < steps; ++t_k) {
        acc += phi.At(i, t_k, t_m) * back_current.at(t_k, i);
      }
      dt.delta.at(t_m, i) = acc;
    }
  }
  return dt;
}

DeltaTrace DeltaHidden(const std::vector<float>& next_weights, int n_next,
                       const DeltaTrace& next_delta, const PhiTable& phi) {
  const int n_this = phi.n_neurons;
  TSSLBP_CHECK_MSG(
      next_weights.size() == static_cast<size_t>(n_next) * n_this,
      "next-layer weight shape mismatch");
  TSSLBP_CHECK(next_delta.delta.n_units == n_next);
  const int steps = phi.n_steps;
  StepGrid back(steps, n_this);
  for (int t = 0; t < steps; ++t) {
    const double* d = next_delta.delta.step(t);
    double* out = back.step(t);
    for (int p = 0; p < n_next; ++p) {
      const float* row = next_weights.data() + static_cast<size_t>(p) * n_this;
      const double dp = d[p];
      for (int j = 0; j < n_this; ++j) out[j] += row[j] * dp;
    }
  }
  return DeltaFromBackCurrent(back, phi);
}

void AccumulateWeightGrad(const StepGrid& pre_psc, const DeltaTrace& delta,
                          std::vector<double>* grad) {
  const int n_pre = pre_psc.n_units;
  const int n_post = delta.delta.n_units;
  TSSLBP_CHECK_MSG(pre_psc.n_steps == delta.delta.n_steps,
                   "pre PSC / delta series misaligned");
  TSSLBP_CHECK(grad->size() == static_cast<size_t>(n_post) * n_pre);
  for (int t = 0; t < pre_psc.n_steps; ++t) {
    const double* a = pre_psc.step(t);
    const double* d = delta.delta.step(t);
    for (int i = 0; i < n_post; ++i) {
      double* row = grad->data() + static_cast<size_t>(i) * n_pre;
      const double di = d[i];
      if (di == 0.0) continue;
      for (int j = 0; j < n_pre; ++j) row[j] += di * a[j];
    }
  }
}

}  // namespace tsslbp
