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

#include "tsslbp/oracle.hpp"

#include <cmath>

namespace tsslbp {

namespace {

// Everything below is deliberately written from the formulas, not from
// the production backward pass.

double OracleSlope(const LayerTrace& trace, int i, int t, double tau_m,
                   double floor) {
  double s = (-trace.u.at(t, i) + trace.i_net.at(t, i)) / tau_m;
  if (s < floor) s = floor;
  return s;
}

double OraclePhi(const LayerTrace& trace, int i, int t_k, int t_m,
                 const NeuronConfig& cfg, double slope_floor) {
  if (t_k < t_m) return 0.0;
  if (!trace.spikes.Fired(i, t_m)) return 0.0;
  const double dadt = std::exp(-double(t_k - t_m) / cfg.tau_s) / cfg.tau_s;
  const double gain =
      1.0 / OracleSlope(trace, i, t_m, cfg.tau_m, slope_floor);
  double phi = dadt * gain;
  // next firing step strictly inside (t_m, t_k)
  int t_p = -1;
  for (int t = t_m + 1; t < t_k; ++t) {
    if (trace.spikes.Fired(i, t)) {
      t_p = t;
      break;
    }
  }
  if (t_p >= 0) {
    const double dreset =
        -(cfg.v_th / cfg.tau_m) * std::exp(-double(t_p - t_m) / cfg.tau_m);
    phi -= OraclePhi(trace, i, t_k, t_p, cfg, slope_floor) * dreset * gain;
  }
  return phi;
}

}  // namespace

PhiTable PhiDirect(const LayerTrace& trace, const NeuronConfig& cfg,
                   const BackpropConfig& bp) {
  const int n = trace.spikes.n_neurons;
  const int steps = trace.spikes.n_steps;
  const double floor = bp.EffectiveEpsSlope(cfg);
  PhiTable table(n, steps);
  for (int i = 0; i < n; ++i) {
    if (trace.spikes.firing_steps[i].empty()) {
      if (bp.dead_neuron_kappa != 0.0) {
        for (int t = 0; t < steps; ++t) {
          const double x = trace.u.at(t, i) - cfg.v_th;
          const double sig = 1.0 / (1.0 + std::exp(-x));
          table.At(i, t, t) = bp.dead_neuron_kappa * sig * (1.0 - sig);
        }
      }
      continue;
    }
    for (int t_k = 0; t_k < steps; ++t_k) {
      for (int t_m = 0; t_m <= t_k; ++t_m) {
        table.At(i, t_k, t_m) = OraclePhi(trace, i, t_k, t_m, cfg, floor);
      }
    }
  }
  return table;
}

namespace {

// Continuous input PSC: sum of exponential kernels with unit peak.
double ContinuousPsc(const std::vector<double>& spike_times, double t,
                     double tau_s) {
  double a = 0.0;
  for (double tf : spike_times) {
    if (t >= tf) a += std::exp(-(t - tf) / tau_s);
  }
  return a;
}

struct FineRun {
  std::vector<double> u;      // no-reset trajectory, u[k] at time k*h
  double first_crossing = -1.0;
  int spike_count = 0;        // with reset applied
};

FineRun SimulateFine(const ShiftExperiment& exp, double w) {
  const double h = exp.neuron.dt / exp.fine_factor;
  const int n = static_cast<int>(exp.window / h);
  FineRun run;
  run.u.resize(n + 1, 0.0);
  double u_reset = 0.0;  // trajectory with reset, for spike counting
  for (int k = 0; k < n; ++k) {
    const double t = k * h;
    const double a = ContinuousPsc(exp.input_spike_times, t, exp.neuron.tau_s);
    const double du = (-run.u[k] + w * a) / exp.neuron.tau_m;
    run.u[k + 1] = run.u[k] + h * du;
    if (run.first_crossing < 0.0 && run.u[k + 1] >= exp.neuron.v_th) {
      // linear interpolation inside the substep
      const double frac =
          (exp.neuron.v_th - run.u[k]) / (run.u[k + 1] - run.u[k]);
      run.first_crossing = t + frac * h;
    }
    const double du_r = (-u_reset + w * a) / exp.neuron.tau_m;
    double next = u_reset + h * du_r;
    if (next >= exp.neuron.v_th) {
      ++run.spike_count;
      next -= exp.neuron.v_th;
    }
    u_reset = next;
  }
  return run;
}

}  // namespace

ShiftResult SpikeShiftCheck(const ShiftExperiment& exp) {
  TSSLBP_REQUIRE(exp.fine_factor >= 10, "fine subdivision must be >= 10");
  ShiftResult res;
  const FineRun base = SimulateFine(exp, exp.weight);
  const FineRun pert =
      SimulateFine(exp, exp.weight + exp.weight_perturbation);
  if (base.first_crossing < 0.0 || pert.first_crossing < 0.0 ||
      base.spike_count != pert.spike_count) {
    res.valid = false;
    return res;
  }
  res.valid = true;
  res.dt_measured = pert.first_crossing - base.first_crossing;

  const double h = exp.neuron.dt / exp.fine_factor;
  const int k_star = static_cast<int>(base.first_crossing / h);
  // Potential change of the perturbed trajectory at the unperturbed firing
  // time (both trajectories are reset-free up to here).
  const double du = pert.u[k_star] - base.u[k_star];
  const double a_star = ContinuousPsc(exp.input_spike_times,
                                      base.first_crossing, exp.neuron.tau_s);
  double slope = (-exp.neuron.v_th + exp.weight * a_star) / exp.neuron.tau_m;
  const double floor = exp.backprop.EffectiveEpsSlope(exp.neuron);
  if (slope < floor) {
    slope = floor;
    res.clamped = true;
  }
  res.dt_predicted = -du / slope;
  if (res.dt_measured != 0.0) {
    res.relative_error =
        std::abs(res.dt_measured - res.dt_predicted) /
        std::abs(res.dt_measured);
  } else {
    res.relative_error = res.dt_predicted == 0.0 ? 0.0 : 1.0;
  }
  return res;
}

double LossFdCheck(const StepGrid& actual_filtered,
                   const StepGrid& desired_filtered, double h) {
  TSSLBP_CHECK(actual_filtered.n_steps == desired_filtered.n_steps &&
               actual_filtered.n_units == desired_filtered.n_units);
  auto loss = [&](const StepGrid& a) {
    double total = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) {
      const double d = a.v[i] - desired_filtered.v[i];
      total += 0.5 * d * d;
    }
    return total;
  };
  StepGrid probe = actual_filtered;
  double max_rel = 0.0;
  for (size_t i = 0; i < probe.v.size(); ++i) {
    const double analytic = actual_filtered.v[i] - desired_filtered.v[i];
    const double orig = probe.v[i];
    probe.v[i] = orig + h;
    const double lp = loss(probe);
    probe.v[i] = orig - h;
    const double lm = loss(probe);
    probe.v[i] = orig;
    const double numeric = (lp - lm) / (2.0 * h);
    const double denom = std::max(std::abs(analytic), 1e-6);
    max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
  }
  return max_rel;
}

}  // namespace tsslbp
