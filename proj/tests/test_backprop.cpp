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

#include <cmath>
#include <random>

#include "doctest.h"

using namespace tsslbp;

namespace {

NeuronConfig Cfg(double tau_m, double tau_s, double v_th = 1.0) {
  NeuronConfig c;
  c.tau_m = tau_m;
  c.tau_s = tau_s;
  c.v_th = v_th;
  return c;
}

// Builds a trace by hand: raster plus u/i_net values at the firing steps.
LayerTrace ManualTrace(int neurons, int steps) {
  return LayerTrace(neurons, steps);
}

}  // namespace

TEST_CASE("du/dt at spike: formula and clamp") {
  const auto cfg = Cfg(2, 3);
  BackpropConfig bp;
  auto trace = ManualTrace(1, 4);
  trace.spikes.SetFired(0, 1);
  trace.u.at(1, 0) = 1.0;

  trace.i_net.at(1, 0) = 2.0;
  CHECK(DuDtAtSpike(trace, 0, 1, cfg, bp) ==
        doctest::Approx(0.5).epsilon(1e-15));

  // raw slope 0 engages the clamp floor
  trace.i_net.at(1, 0) = 1.0;
  CHECK(DuDtAtSpike(trace, 0, 1, cfg, bp) ==
        doctest::Approx(bp.EffectiveEpsSlope(cfg)).epsilon(1e-15));

  const auto cfg4 = Cfg(4, 3);
  trace.i_net.at(1, 0) = 3.0;
  CHECK(DuDtAtSpike(trace, 0, 1, cfg4, bp) ==
        doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(DuDtAtSpike(trace, 0, 2, cfg, bp), ContractError);
}

TEST_CASE("dpsc/dtm evaluates the kernel onset derivative") {
  const auto cfg = Cfg(5, 2);
  CHECK(DpscDtm(3, 3, cfg) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(DpscDtm(5, 3, cfg) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(DpscDtm(13, 3, cfg) ==
        doctest::Approx(0.5 * std::exp(-5.0)).epsilon(1e-12));
}

TEST_CASE("phi: silent neuron gives the all-zero table") {
  BackpropConfig bp;
  const auto phi = BuildPhi(ManualTrace(2, 6), Cfg(5, 3), bp);
  for (double v : phi.values) CHECK(v == 0.0);
}

TEST_CASE("phi: single-spike inter-neuron value") {
  // spike at t_m = 1 with slope 0.5: phi(3,1) = dpsc(3,1) * (1/0.5)
  const auto cfg = Cfg(2, 2);
  BackpropConfig bp;
  auto trace = ManualTrace(1, 5);
  trace.spikes.SetFired(0, 1);
  trace.u.at(1, 0) = 1.0;
  trace.i_net.at(1, 0) = 2.0;  // slope (-1+2)/2 = 0.5
  const auto phi = BuildPhi(trace, cfg, bp);
  CHECK(phi.At(0, 3, 1) ==
        doctest::Approx(0.5 * std::exp(-1.0) * 2.0).epsilon(1e-12));
  CHECK(phi.At(0, 3, 1) == doctest::Approx(0.36788).epsilon(1e-4));
  // causality: zero below the diagonal and at non-firing rows
  CHECK(phi.At(0, 0, 1) == 0.0);
  CHECK(phi.At(0, 3, 2) == 0.0);
}

TEST_CASE("phi: two-spike case adds the reset-mediated chain") {
  const auto cfg = Cfg(4, 3, 1.0);
  BackpropConfig bp;
  auto trace = ManualTrace(1, 6);
  trace.spikes.SetFired(0, 1);
  trace.spikes.SetFired(0, 3);
  trace.u.at(1, 0) = 1.0;
  trace.i_net.at(1, 0) = 3.0;   // slope at t=1: 0.5
  trace.u.at(3, 0) = 1.2;
  trace.i_net.at(3, 0) = 2.0;   // slope at t=3: 0.2
  const auto phi = BuildPhi(trace, cfg, bp);

  const double gain1 = 1.0 / 0.5;
  const double inter41 = DpscDtm(4, 1, cfg) * gain1;
  const double phi43 = DpscDtm(4, 3, cfg) * (1.0 / 0.2);
  const double dreset = -(cfg.v_th / cfg.tau_m) * std::exp(-2.0 / cfg.tau_m);
  CHECK(phi.At(0, 4, 3) == doctest::Approx(phi43).epsilon(1e-12));
  CHECK(phi.At(0, 4, 1) ==
        doctest::Approx(inter41 - phi43 * dreset * gain1)
            .epsilon(1e-12));
  // between the spikes only the inter term applies
  CHECK(phi.At(0, 2, 1) ==
        doctest::Approx(DpscDtm(2, 1, cfg) * gain1).epsilon(1e-12));
  // at t_k = t_p the next spike is not strictly inside (t_m, t_k)
  CHECK(phi.At(0, 3, 1) ==
        doctest::Approx(DpscDtm(3, 1, cfg) * gain1).epsilon(1e-12));
}

TEST_CASE("phi case-a invariant on simulated traces") {
  const auto cfg = Cfg(5, 3);
  BackpropConfig bp;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-0.3, 1.2);
  StepGrid i_net(10, 4);
  for (auto& v : i_net.v) v = d(rng);
  const auto trace = SimulateDynamics(i_net, cfg);
  const auto phi = BuildPhi(trace, cfg, bp);
  for (int i = 0; i < 4; ++i) {
    for (int t_m = 0; t_m < 10; ++t_m) {
      if (trace.spikes.Fired(i, t_m)) continue;
      for (int t_k = 0; t_k < 10; ++t_k) {
        CHECK(phi.At(i, t_k, t_m) == 0.0);
      }
    }
  }
}

TEST_CASE("phi: intra-neuron term decays with the spike gap") {
  const auto cfg = Cfg(4, 3, 1.0);
  BackpropConfig bp;
  double prev_gap_term = 1.0;
  for (int gap : {2, 6, 10, 14}) {
    const int steps = gap + 4;
    auto trace = ManualTrace(1, steps);
    trace.spikes.SetFired(0, 1);
    trace.spikes.SetFired(0, 1 + gap);
    trace.u.at(1, 0) = 1.0;
    trace.i_net.at(1, 0) = 3.0;
    trace.u.at(1 + gap, 0) = 1.0;
    trace.i_net.at(1 + gap, 0) = 3.0;
    const auto phi = BuildPhi(trace, cfg, bp);
    const int t_k = gap + 3;
    const double inter =
        DpscDtm(t_k, 1, cfg) * (1.0 / DuDtAtSpike(trace, 0, 1, cfg, bp));
    const double intra = phi.At(0, t_k, 1) - inter;
    CHECK(std::abs(intra) < prev_gap_term);
    prev_gap_term = std::abs(intra);
  }
  CHECK(prev_gap_term < 1e-2);
}

TEST_CASE("delta_output: zero cases and brute-force oracle") {
  const auto cfg = Cfg(3, 2);
  BackpropConfig bp;
  StepGrid i_net(3, 1);
  i_net.at(0, 0) = 1.5;
  const auto trace = SimulateDynamics(i_net, cfg);
  REQUIRE(trace.spikes.Fired(0, 0));
  const auto phi = BuildPhi(trace, cfg, bp);

  // actual == target -> all-zero delta
  auto d0 = DeltaOutput(trace.a, trace.a, phi);
  for (double v : d0.delta.v) CHECK(v == 0.0);

  // silent neuron -> zero delta regardless of mismatch
  const auto silent = SimulateDynamics(StepGrid(3, 1), cfg);
  const auto phi_silent = BuildPhi(silent, cfg, bp);
  StepGrid target(3, 1);
  target.at(1, 0) = 1.0;
  auto d1 = DeltaOutput(silent.a, target, phi_silent);
  for (double v : d1.delta.v) CHECK(v == 0.0);

  // brute-force double loop over k
  auto d2 = DeltaOutput(trace.a, target, phi);
  for (int m = 0; m < 3; ++m) {
    double expect = 0.0;
    for (int k = m; k < 3; ++k) {
      expect += (trace.a.at(k, 0) - target.at(k, 0)) * phi.At(0, k, m);
    }
    CHECK(d2.delta.at(m, 0) == doctest::Approx(expect).epsilon(1e-12));
  }

  StepGrid wrong(4, 1);
  CHECK_THROWS_AS(DeltaOutput(trace.a, wrong, phi), ContractError);
}

TEST_CASE("delta_hidden: dense toy matches the triple-loop oracle") {
  const auto cfg = Cfg(4, 2);
  BackpropConfig bp;
  const int steps = 3;
  StepGrid i_net(steps, 2);
  i_net.at(0, 0) = 1.2;  // hidden neuron 0 spikes at t=0
  const auto trace = SimulateDynamics(i_net, cfg);
  const auto phi = BuildPhi(trace, cfg, bp);

  const std::vector<float> w_next = {0.7f, -0.4f};  // 1 post, 2 pre
  DeltaTrace next(1, steps);
  next.delta.at(0, 0) = 0.3;
  next.delta.at(1, 0) = -0.2;
  next.delta.at(2, 0) = 0.1;

  const auto delta = DeltaHidden(w_next, 1, next, phi);
  for (int j = 0; j < 2; ++j) {
    for (int m = 0; m < steps; ++m) {
      double expect = 0.0;
      for (int k = m; k < steps; ++k) {
        for (int p = 0; p < 1; ++p) {
          expect += phi.At(j, k, m) * w_next[p * 2 + j] * next.delta.at(k, p);
        }
      }
      CHECK(delta.delta.at(m, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  // zero downstream error and silent-neuron cases
  DeltaTrace zero(1, steps);
  const auto dz = DeltaHidden(w_next, 1, zero, phi);
  for (double v : dz.delta.v) CHECK(v == 0.0);
  for (int m = 0; m < steps; ++m) CHECK(delta.delta.at(m, 1) == 0.0);

  CHECK_THROWS_AS(DeltaHidden({0.5f}, 1, next, phi), ContractError);
}

TEST_CASE("weight gradient accumulation") {
  // single-step scalar: delta 0.3 times psc 0.5
  StepGrid pre1(1, 1);
  pre1.at(0, 0) = 0.5;
  DeltaTrace d1(1, 1);
  d1.delta.at(0, 0) = 0.3;
  std::vector<double> g1(1, 0.0);
  AccumulateWeightGrad(pre1, d1, &g1);
  CHECK(g1[0] == doctest::Approx(0.15).epsilon(1e-15));

  // zero delta -> zero gradient
  DeltaTrace dz(1, 1);
  std::vector<double> gz(1, 0.0);
  AccumulateWeightGrad(pre1, dz, &gz);
  CHECK(gz[0] == 0.0);

  // 5-step vector toy against the explicit sum
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StepGrid pre(5, 3);
  DeltaTrace d(2, 5);
  for (auto& v : pre.v) v = u(rng);
  for (auto& v : d.delta.v) v = u(rng);
  std::vector<double> g(6, 0.0);
  AccumulateWeightGrad(pre, d, &g);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      double expect = 0.0;
      for (int m = 0; m < 5; ++m) expect += d.delta.at(m, i) * pre.at(m, j);
      CHECK(g[i * 3 + j] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}
