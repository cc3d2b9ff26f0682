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

#ifndef TSSLBP_DATA_HPP_
#define TSSLBP_DATA_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tsslbp/common.hpp"
#include "tsslbp/neuron.hpp"

namespace tsslbp {

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};
class IdxMagicError : public DataError {
 public:
  using DataError::DataError;
};
class IdxTruncatedError : public DataError {
 public:
  using DataError::DataError;
};
class IdxCountMismatchError : public DataError {
 public:
  using DataError::DataError;
};
class EventParseError : public DataError {
 public:
  using DataError::DataError;
};

// One encoded training/evaluation instance.
struct Sample {
  StepGrid input_psc;  // [n_steps x channels]
  int label = 0;
};

enum class SourceKind { kIdxImages, kEventBins, kCifarBatches, kSynthetic };

// In-memory dataset. Images are kept as normalized pixels and encoded to
// PSC series on demand; event sources keep pre-binned rasters.
struct DatasetHandle {
  SourceKind kind = SourceKind::kSynthetic;
  int n_samples = 0;
  int channels = 0;  // input channels after flattening (c*h*w)
  int height = 0;
  int width = 0;
  std::vector<float> pixels;   // [n per-sample channels], image sources
  std::vector<uint8_t> labels;
};

struct AerEvent {
  int x = 0;
  int y = 0;
  int polarity = 0;
  int64_t timestamp_us = 0;
};

// IDX container (big-endian, magic 0x803 for image tensors and 0x801 for
// label vectors). Pixels are normalized to [0,1].
DatasetHandle LoadIdx(const std::string& images_path,
                      const std::string& labels_path);

// CIFAR10 binary batch format: 3073-byte records of label + 3072 pixels.
DatasetHandle LoadCifarBatch(const std::string& path);

// Constant-current encoding for static images: a[t] = pixel for every t.
StepGrid EncodeStatic(const float* pixels, int channels, int n_steps);
Sample MakeSample(const DatasetHandle& ds, int index, int n_steps);

// Bins events into a binary raster. Channel layout is
// (polarity * height + y) * width + x; multiple events in one bin saturate
// to 1. window_us spans the whole n_steps.
StepGrid BinEvents(const std::vector<AerEvent>& events, int n_steps,
                   int64_t window_us, int height, int width,
                   int n_polarities = 2);

// Plain-text event format: one "x y p t" line per event.
std::vector<AerEvent> LoadEventsText(const std::string& path);
// N-MNIST raw AER layout: 5-byte records of x, y, then polarity (1 bit)
// packed with a 23-bit big-endian microsecond timestamp.
std::vector<AerEvent> LoadEventsAer(const std::string& path);

// Seeded epoch shuffle; the last partial batch is kept.
std::vector<std::vector<int>> MakeBatches(int n_samples, int batch_size,
                                          uint64_t seed, int epoch);

// First-n subset after a seeded shuffle of the full index range.
std::vector<int> SubsetIndices(int n_total, int n_subset, uint64_t seed);

}  // namespace tsslbp

#endif  // TSSLBP_DATA_HPP_
