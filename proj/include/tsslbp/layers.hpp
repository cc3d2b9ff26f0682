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

#ifndef TSSLBP_LAYERS_HPP_
#define TSSLBP_LAYERS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tsslbp/common.hpp"
#include "tsslbp/neuron.hpp"

namespace tsslbp {

enum class LayerKind : uint32_t { kDense = 0, kConv2d = 1, kAvgPool = 2 };

// Spatial extent of an activation volume. Dense activations use
// {1, 1, n} with channels carrying the feature count.
struct Shape3 {
  int c = 1;
  int h = 1;
  int w = 1;
  int Count() const { return c * h * w; }
  bool operator==(const Shape3&) const = default;
};

// One layer's parameters and geometry. Dense weights are [out, in]
// row-major; conv weights are [out_ch, in_ch, kh, kw]; pooling has none.
struct LayerParams {
  LayerKind kind = LayerKind::kDense;
  Shape3 in_shape;
  Shape3 out_shape;
  int kernel = 0;   // conv: kh == kw; pool: window == stride
  int stride = 1;
  int padding = 0;
  std::vector<float> weights;
  std::vector<float> bias;  // constant-current bias; empty = disabled

  size_t WeightCount() const {
    switch (kind) {
      case LayerKind::kDense:
        return static_cast<size_t>(out_shape.Count()) * in_shape.Count();
      case LayerKind::kConv2d:
        return static_cast<size_t>(out_shape.c) * in_shape.c * kernel * kernel;
      case LayerKind::kAvgPool:
        return 0;
    }
    return 0;
  }
  bool Spiking() const { return kind != LayerKind::kAvgPool; }
  int FanIn() const {
    return kind == LayerKind::kConv2d ? in_shape.c * kernel * kernel
                                      : in_shape.Count();
  }
  void Validate() const;
};

struct NetworkSpec {
  std::vector<LayerParams> layers;
  NeuronConfig neuron;
  int n_steps = 5;

  void Validate() const;
  int InputCount() const { return layers.front().in_shape.Count(); }
  int OutputCount() const { return layers.back().out_shape.Count(); }
};

// Per-step linear maps and their exact adjoints. x and y are flattened in
// (c, h, w) order.
void LinearForward(const LayerParams& p, const double* x, double* y);
void LinearAdjoint(const LayerParams& p, const double* y, double* x);
// grad[oc][ic][ky][kx] (conv) or grad[i][j] (dense) += dL/dy outer x.
void LinearWeightGrad(const LayerParams& p, const double* x, const double* y,
                      std::vector<double>* grad);

// Applies the forward map to a whole series.
StepGrid MapSeries(const LayerParams& p, const StepGrid& in);
StepGrid AdjointSeries(const LayerParams& p, const StepGrid& in);

// Materializes the layer's linear map as an explicit dense matrix
// [out x in]; test and equivalence-check helper.
std::vector<double> MaterializeDense(const LayerParams& p);

// Parses the compact architecture notation, e.g. "15C5-P2-40C5-P2-300-10":
// nCk = conv with n filters of k x k, Pk = k x k average pooling, a bare
// integer = dense layer. The string lists every layer after the input,
// including the output layer.
std::vector<LayerParams> ParseArchitecture(const std::string& arch,
                                           const Shape3& input_shape);

// Renders the layer list back into the compact notation.
std::string ArchitectureString(const std::vector<LayerParams>& layers);

// Fan-in-scaled uniform init, U(-b, b) with b = init_scale * v_th /
// sqrt(fan_in). Deterministic in (seed, layer index).
void InitWeights(NetworkSpec* net, uint64_t seed, double init_scale = 3.0);

}  // namespace tsslbp

#endif  // TSSLBP_LAYERS_HPP_
