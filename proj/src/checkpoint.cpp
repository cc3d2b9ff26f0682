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

#include "tsslbp/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tsslbp {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload is little-endian; big-endian hosts need "
              "byte swapping");

namespace {

constexpr char kMagic[8] = {'T', 'S', 'S', 'L', 'B', 'P', 'C', 'K'};
constexpr uint32_t kVersion = 1;

template <typename T>
void WritePod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T ReadPod(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != sizeof(T)) {
    throw CkTruncationError("truncated checkpoint: " + path);
  }
  return v;
}

}  // namespace

uint64_t ConfigDigest(const NetworkSpec& net) {
  std::ostringstream os;
  os << ArchitectureString(net.layers) << '|' << net.layers[0].in_shape.c
     << 'x' << net.layers[0].in_shape.h << 'x' << net.layers[0].in_shape.w
     << '|' << net.neuron.tau_m << '|' << net.neuron.tau_s << '|'
     << net.neuron.v_th << '|' << net.n_steps;
  return Fnv1a64(os.str());
}

void SaveCheckpoint(const NetworkSpec& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  TSSLBP_REQUIRE(out.good(), "cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  WritePod(out, kVersion);
  WritePod(out, ConfigDigest(net));
  WritePod(out, static_cast<uint32_t>(net.layers.size()));
  for (const auto& p : net.layers) {
    WritePod(out, static_cast<uint32_t>(p.kind));
    for (int d : {p.in_shape.c, p.in_shape.h, p.in_shape.w, p.out_shape.c,
                  p.out_shape.h, p.out_shape.w, p.kernel, p.stride,
                  p.padding}) {
      WritePod(out, static_cast<uint32_t>(d));
    }
    WritePod(out, static_cast<uint64_t>(p.weights.size()));
    WritePod(out, static_cast<uint64_t>(p.bias.size()));
  }
  for (const auto& p : net.layers) {
    out.write(reinterpret_cast<const char*>(p.weights.data()),
              static_cast<std::streamsize>(p.weights.size() * 4));
    out.write(reinterpret_cast<const char*>(p.bias.data()),
              static_cast<std::streamsize>(p.bias.size() * 4));
  }
  TSSLBP_REQUIRE(out.good(), "write error on checkpoint: " + path);
}

void LoadCheckpoint(NetworkSpec* net, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) ||
      std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CkMagicError("bad checkpoint magic: " + path);
  }
  const auto version = ReadPod<uint32_t>(in, path);
  if (version != kVersion) {
    throw CkVersionError("unsupported checkpoint version " +
                         std::to_string(version) + ": " + path);
  }
  const auto digest = ReadPod<uint64_t>(in, path);
  if (digest != ConfigDigest(*net)) {
    throw CkDigestError("checkpoint config digest mismatch: " + path);
  }
  const auto n_layers = ReadPod<uint32_t>(in, path);
  if (n_layers != net->layers.size()) {
    throw CkDigestError("checkpoint layer count mismatch: " + path);
  }
  struct Counts {
    uint64_t weights;
    uint64_t bias;
  };
  std::vector<Counts> counts;
  for (auto& p : net->layers) {
    const auto kind = ReadPod<uint32_t>(in, path);
    uint32_t dims[9];
    for (auto& d : dims) d = ReadPod<uint32_t>(in, path);
    if (kind != static_cast<uint32_t>(p.kind) ||
        dims[0] != uint32_t(p.in_shape.c) || dims[1] != uint32_t(p.in_shape.h) ||
        dims[2] != uint32_t(p.in_shape.w) || dims[3] != uint32_t(p.out_shape.c) ||
        dims[4] != uint32_t(p.out_shape.h) || dims[5] != uint32_t(p.out_shape.w)) {
      throw CkDigestError("checkpoint layer geometry mismatch: " + path);
    }
    Counts c;
    c.weights = ReadPod<uint64_t>(in, path);
    c.bias = ReadPod<uint64_t>(in, path);
    if (c.weights != p.WeightCount()) {
      throw CkDigestError("checkpoint weight count mismatch: " + path);
    }
    counts.push_back(c);
  }
  for (size_t l = 0; l < net->layers.size(); ++l) {
    auto& p = net->layers[l];
    p.weights.resize(counts[l].weights);
    in.read(reinterpret_cast<char*>(p.weights.data()),
            static_cast<std::streamsize>(counts[l].weights * 4));
    if (in.gcount() != static_cast<std::streamsize>(counts[l].weights * 4)) {
      throw CkTruncationError("truncated checkpoint payload: " + path);
    }
    p.bias.resize(counts[l].bias);
    in.read(reinterpret_cast<char*>(p.bias.data()),
            static_cast<std::streamsize>(counts[l].bias * 4));
    if (in.gcount() != static_cast<std::streamsize>(counts[l].bias * 4)) {
      throw CkTruncationError("truncated checkpoint payload: " + path);
    }
  }
}

}  // namespace tsslbp
