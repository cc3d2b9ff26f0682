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

#include "tsslbp/layers.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

namespace tsslbp {

void LayerParams::Validate() const {
  TSSLBP_REQUIRE(weights.size() == WeightCount(),
                 "weight buffer does not match layer geometry");
  TSSLBP_REQUIRE(bias.empty() ||
                     bias.size() == static_cast<size_t>(out_shape.Count()),
                 "bias size does not match output count");
  switch (kind) {
    case LayerKind::kDense:
      break;
    case LayerKind::kConv2d: {
      TSSLBP_REQUIRE(kernel >= 1 && stride >= 1 && padding >= 0,
                     "bad conv geometry");
      const int oh = (in_shape.h + 2 * padding - kernel) / stride + 1;
      const int ow = (in_shape.w + 2 * padding - kernel) / stride + 1;
      TSSLBP_REQUIRE(oh == out_shape.h && ow == out_shape.w && oh > 0,
                     "conv output shape inconsistent with geometry");
      break;
    }
    case LayerKind::kAvgPool: {
      TSSLBP_REQUIRE(kernel >= 1, "bad pool window");
      TSSLBP_REQUIRE(in_shape.h % kernel == 0 && in_shape.w % kernel == 0,
                     "pool window must tile the input");
      TSSLBP_REQUIRE(out_shape.c == in_shape.c &&
                         out_shape.h == in_shape.h / kernel &&
                         out_shape.w == in_shape.w / kernel,
                     "pool output shape inconsistent");
      break;
    }
  }
}

void NetworkSpec::Validate() const {
  neuron.Validate();
  TSSLBP_REQUIRE(n_steps >= 1, "n_steps must be >= 1");
  TSSLBP_REQUIRE(!layers.empty(), "network has no layers");
  for (size_t l = 0; l < layers.size(); ++l) {
    layers[l].Validate();
    if (l > 0) {
      TSSLBP_REQUIRE(layers[l].in_shape.Count() ==
                         layers[l - 1].out_shape.Count(),
                     "layer " + std::to_string(l) +
                         " input does not match previous layer output");
    }
  }
  TSSLBP_REQUIRE(layers.back().Spiking(),
                 "network must end in a spiking layer");
}

namespace {

void DenseForward(const LayerParams& p, const double* x, double* y) {
  const int n_in = p.in_shape.Count();
  const int n_out = p.out_shape.Count();
  for (int i = 0; i < n_out; ++i) {
    const float* row = p.weights.data() + static_cast<size_t>(i) * n_in;
    double acc = p.bias.empty() ? 0.0 : p.bias[i];
    for (int j = 0; j < n_in; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void DenseAdjoint(const LayerParams& p, const double* y, double* x) {
  const int n_in = p.in_shape.Count();
  const int n_out = p.out_shape.Count();
  for (int j = 0; j < n_in; ++j) x[j] = 0.0;
  for (int i = 0; i < n_out; ++i) {
    const float* row = p.weights.data() + static_cast<size_t>(i) * n_in;
    const double yi = y[i];
    if (yi == 0.0) continue;
    for (int j = 0; j < n_in; ++j) x[j] += row[j] * yi;
  }
}

inline int Idx3(const Shape3& s, int c, int y, int x) {
  return (c * s.h + y) * s.w + x;
}

void ConvForward(const LayerParams& p, const double* x, double* y) {
  const auto& is = p.in_shape;
  const auto& os = p.out_shape;
  const int k = p.kernel;
  for (int oc = 0; oc < os.c; ++oc) {
    const double b = p.bias.empty() ? 0.0 : p.bias[oc];
    for (int oy = 0; oy < os.h; ++oy) {
      for (int ox = 0; ox < os.w; ++ox) {
        double acc = b;
        for (int ic = 0; ic < is.c; ++ic) {
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * p.stride + ky - p.padding;
            if (iy < 0 || iy >= is.h) continue;
            const size_t wbase =
                ((static_cast<size_t>(oc) * is.c + ic) * k + ky) * k;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * p.stride + kx - p.padding;
              if (ix < 0 || ix >= is.w) continue;
              acc += p.weights[wbase + kx] * x[Idx3(is, ic, iy, ix)];
            }
          }
        }
        y[Idx3(os, oc, oy, ox)] = acc;
      }
    }
  }
}

void ConvAdjoint(const LayerParams& p, const double* y, double* x) {
  const auto& is = p.in_shape;
  const auto& os = p.out_shape;
  const int k = p.kernel;
  for (int j = 0; j < is.Count(); ++j) x[j] = 0.0;
  for (int oc = 0; oc < os.c; ++oc) {
    for (int oy = 0; oy < os.h; ++oy) {
      for (int ox = 0; ox < os.w; ++ox) {
        const double g = y[Idx3(os, oc, oy, ox)];
        if (g == 0.0) continue;
        for (int ic = 0; ic < is.c; ++ic) {
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * p.stride + ky - p.padding;
            if (iy < 0 || iy >= is.h) continue;
            const size_t wbase =
                ((static_cast<size_t>(oc) * is.c + ic) * k + ky) * k;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * p.stride + kx - p.padding;
              if (ix < 0 || ix >= is.w) continue;
              x[Idx3(is, ic, iy, ix)] += p.weights[wbase + kx] * g;
            }
          }
        }
      }
    }
  }
}

void ConvWeightGrad(const LayerParams& p, const double* x, const double* y,
                    std::vector<double>* grad) {
  const auto& is = p.in_shape;
  const auto& os = p.out_shape;
  const int k = p.kernel;
  for (int oc = 0; oc < os.c; ++oc) {
    for (int oy = 0; oy < os.h; ++oy) {
      for (int ox = 0; ox < os.w; ++ox) {
        const double g = y[Idx3(os, oc, oy, ox)];
        if (g == 0.0) continue;
        for (int ic = 0; ic < is.c; ++ic) {
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * p.stride + ky - p.padding;
            if (iy < 0 || iy >= is.h) continue;
            const size_t wbase =
                ((static_cast<size_t>(oc) * is.c + ic) * k + ky) * k;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * p.stride + kx - p.padding;
              if (ix < 0 || ix >= is.w) continue;
              (*grad)[wbase + kx] += g * x[Idx3(is, ic, iy, ix)];
            }
          }
        }
      }
    }
  }
}

void PoolForward(const LayerParams& p, const double* x, double* y) {
  const auto& is = p.in_shape;
  const auto& os = p.out_shape;
  const int k = p.kernel;
  const double inv = 1.0 / (k * k);
  for (int c = 0; c < os.c; ++c) {
    for (int oy = 0; oy < os.h; ++oy) {
      for (int ox = 0; ox < os.w; ++ox) {
        double acc = 0.0;
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            acc += x[Idx3(is, c, oy * k + ky, ox * k + kx)];
          }
        }
        y[Idx3(os, c, oy, ox)] = acc * inv;
      }
    }
  }
}

void PoolAdjoint(const LayerParams& p, const double* y, double* x) {
  const auto& is = p.in_shape;
  const auto& os = p.out_shape;
  const int k = p.kernel;
  const double inv = 1.0 / (k * k);
  for (int c = 0; c < os.c; ++c) {
    for (int oy = 0; oy < os.h; ++oy) {
      for (int ox = 0; ox < os.w; ++ox) {
        const double g = y[Idx3(os, c, oy, ox)] * inv;
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            x[Idx3(is, c, oy * k + ky, ox * k + kx)] = g;
          }
        }
      }
    }
  }
}

}  // namespace

void LinearForward(const LayerParams& p, const double* x, double* y) {
  switch (p.kind) {
    case LayerKind::kDense: DenseForward(p, x, y); break;
    case LayerKind::kConv2d: ConvForward(p, x, y); break;
    case LayerKind::kAvgPool: PoolForward(p, x, y); break;
  }
}

void LinearAdjoint(const LayerParams& p, const double* y, double* x) {
  switch (p.kind) {
    case LayerKind::kDense: DenseAdjoint(p, y, x); break;
    case LayerKind::kConv2d: ConvAdjoint(p, y, x); break;
    case LayerKind::kAvgPool: PoolAdjoint(p, y, x); break;
  }
}

void LinearWeightGrad(const LayerParams& p, const double* x, const double* y,
                      std::vector<double>* grad) {
  TSSLBP_CHECK(grad->size() == p.WeightCount());
  switch (p.kind) {
    case LayerKind::kDense: {
      const int n_in = p.in_shape.Count();
      const int n_out = p.out_shape.Count();
      for (int i = 0; i < n_out; ++i) {
        const double g = y[i];
        if (g == 0.0) continue;
        double* row = grad->data() + static_cast<size_t>(i) * n_in;
        for (int j = 0; j < n_in; ++j) row[j] += g * x[j];
      }
      break;
    }
    case LayerKind::kConv2d: ConvWeightGrad(p, x, y, grad); break;
    case LayerKind::kAvgPool: break;
  }
}

StepGrid MapSeries(const LayerParams& p, const StepGrid& in) {
  TSSLBP_REQUIRE(in.n_units == p.in_shape.Count(),
                 "series width does not match layer input");
  StepGrid out(in.n_steps, p.out_shape.Count());
  for (int t = 0; t < in.n_steps; ++t) {
    LinearForward(p, in.step(t), out.step(t));
  }
  return out;
}

StepGrid AdjointSeries(const LayerParams& p, const StepGrid& in) {
  TSSLBP_REQUIRE(in.n_units == p.out_shape.Count(),
                 "series width does not match layer output");
  StepGrid out(in.n_steps, p.in_shape.Count());
  for (int t = 0; t < in.n_steps; ++t) {
    LinearAdjoint(p, in.step(t), out.step(t));
  }
  return out;
}

std::vector<double> MaterializeDense(const LayerParams& p) {
  const int n_in = p.in_shape.Count();
  const int n_out = p.out_shape.Count();
  std::vector<double> mat(static_cast<size_t>(n_out) * n_in, 0.0);
  std::vector<double> e(n_in, 0.0);
  std::vector<double> col(n_out, 0.0);
  for (int j = 0; j < n_in; ++j) {
    e[j] = 1.0;
    LinearForward(p, e.data(), col.data());
    // bias is not part of the linear map
    if (!p.bias.empty()) {
      for (int i = 0; i < n_out; ++i) {
        col[i] -= p.kind == LayerKind::kConv2d
                      ? p.bias[i / (p.out_shape.h * p.out_shape.w)]
                      : p.bias[i];
      }
    }
    for (int i = 0; i < n_out; ++i) {
      mat[static_cast<size_t>(i) * n_in + j] = col[i];
    }
    e[j] = 0.0;
  }
  return mat;
}

std::vector<LayerParams> ParseArchitecture(const std::string& arch,
                                           const Shape3& input_shape) {
  std::vector<LayerParams> layers;
  Shape3 cur = input_shape;
  std::stringstream ss(arch);
  std::string tok;
  while (std::getline(ss, tok, '-')) {
    TSSLBP_REQUIRE(!tok.empty(), "empty token in architecture string");
    LayerParams p;
    p.in_shape = cur;
    const size_t cpos = tok.find_first_of("Cc");
    if (tok[0] == 'P' || tok[0] == 'p') {
      p.kind = LayerKind::kAvgPool;
      p.kernel = std::stoi(tok.substr(1));
      p.stride = p.kernel;
      TSSLBP_REQUIRE(cur.h % p.kernel == 0 && cur.w % p.kernel == 0,
                     "pool window " + tok + " does not tile " +
                         std::to_string(cur.h) + "x" + std::to_string(cur.w));
      p.out_shape = {cur.c, cur.h / p.kernel, cur.w / p.kernel};
    } else if (cpos != std::string::npos) {
      p.kind = LayerKind::kConv2d;
      p.out_shape.c = std::stoi(tok.substr(0, cpos));
      p.kernel = std::stoi(tok.substr(cpos + 1));
      p.stride = 1;
      p.padding = 0;
      p.out_shape.h = cur.h - p.kernel + 1;
      p.out_shape.w = cur.w - p.kernel + 1;
      TSSLBP_REQUIRE(p.out_shape.h > 0 && p.out_shape.w > 0,
                     "conv kernel " + tok + " larger than its input");
    } else {
      p.kind = LayerKind::kDense;
      for (char ch : tok) {
        TSSLBP_REQUIRE(std::isdigit(static_cast<unsigned char>(ch)),
                       "unrecognized architecture token: " + tok);
      }
      p.in_shape = {1, 1, cur.Count()};
      p.out_shape = {1, 1, std::stoi(tok)};
      TSSLBP_REQUIRE(p.out_shape.w > 0, "dense width must be positive");
    }
    p.weights.assign(p.WeightCount(), 0.0f);
    cur = p.out_shape;
    layers.push_back(std::move(p));
  }
  TSSLBP_REQUIRE(!layers.empty(), "architecture string has no layers");
  return layers;
}

std::string ArchitectureString(const std::vector<LayerParams>& layers) {
  std::string out;
  for (const auto& p : layers) {
    if (!out.empty()) out += '-';
    switch (p.kind) {
      case LayerKind::kDense:
        out += std::to_string(p.out_shape.Count());
        break;
      case LayerKind::kConv2d:
        out += std::to_string(p.out_shape.c) + "C" + std::to_string(p.kernel);
        break;
      case LayerKind::kAvgPool:
        out += "P" + std::to_string(p.kernel);
        break;
    }
  }
  return out;
}

void InitWeights(NetworkSpec* net, uint64_t seed, double init_scale) {
  for (size_t l = 0; l < net->layers.size(); ++l) {
    auto& p = net->layers[l];
    if (p.kind == LayerKind::kAvgPool) continue;
    std::mt19937_64 rng(Fnv1a64(&l, sizeof(l), seed ^ 0x9e3779b97f4a7c15ull));
    const double bound =
        init_scale * net->neuron.v_th / std::sqrt(double(p.FanIn()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    p.weights.resize(p.WeightCount());
    for (auto& w : p.weights) w = static_cast<float>(dist(rng));
  }
}

}  // namespace tsslbp
