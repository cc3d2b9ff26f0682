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

#include "tsslbp/data.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace tsslbp {

namespace {

uint32_t ReadBe32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) {
    throw IdxTruncatedError("truncated IDX header in " + path);
  }
  return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) |
         (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

}  // namespace

DatasetHandle LoadIdx(const std::string& images_path,
                      const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img.good()) throw DataError("cannot open " + images_path);
  const uint32_t img_magic = ReadBe32(img, images_path);
  if (img_magic != 0x00000803u) {
    throw IdxMagicError("bad IDX image magic in " + images_path);
  }
  const uint32_t n = ReadBe32(img, images_path);
  const uint32_t h = ReadBe32(img, images_path);
  const uint32_t w = ReadBe32(img, images_path);

  std::ifstream lbl(labels_path, std::ios::binary);
  if (!lbl.good()) throw DataError("cannot open " + labels_path);
  const uint32_t lbl_magic = ReadBe32(lbl, labels_path);
  if (lbl_magic != 0x00000801u) {
    throw IdxMagicError("bad IDX label magic in " + labels_path);
  }
  const uint32_t n_lbl = ReadBe32(lbl, labels_path);
  if (n != n_lbl) {
    throw IdxCountMismatchError(
        "image/label count mismatch: " + std::to_string(n) + " vs " +
        std::to_string(n_lbl));
  }

  DatasetHandle ds;
  ds.kind = SourceKind::kIdxImages;
  ds.n_samples = static_cast<int>(n);
  ds.height = static_cast<int>(h);
  ds.width = static_cast<int>(w);
  ds.channels = ds.height * ds.width;

  std::vector<unsigned char> buf(size_t(n) * h * w);
  img.read(reinterpret_cast<char*>(buf.data()),
           static_cast<std::streamsize>(buf.size()));
  if (img.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw IdxTruncatedError("truncated IDX image payload in " + images_path);
  }
  ds.pixels.resize(buf.size());
  for (size_t i = 0; i < buf.size(); ++i) ds.pixels[i] = buf[i] / 255.0f;

  ds.labels.resize(n);
  lbl.read(reinterpret_cast<char*>(ds.labels.data()), n);
  if (lbl.gcount() != static_cast<std::streamsize>(n)) {
    throw IdxTruncatedError("truncated IDX label payload in " + labels_path);
  }
  return ds;
}

DatasetHandle LoadCifarBatch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw DataError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = static_cast<size_t>(in.tellg());
  in.seekg(0);
  constexpr size_t kRecord = 3073;  // label byte + 3 * 32 * 32 pixels
  if (size == 0 || size % kRecord != 0) {
    throw IdxTruncatedError("CIFAR batch size is not a whole record count: " +
                            path);
  }
  DatasetHandle ds;
  ds.kind = SourceKind::kCifarBatches;
  ds.n_samples = static_cast<int>(size / kRecord);
  ds.height = 32;
  ds.width = 32;
  ds.channels = 3 * 32 * 32;
  ds.pixels.resize(size_t(ds.n_samples) * ds.channels);
  ds.labels.resize(ds.n_samples);
  std::vector<unsigned char> rec(kRecord);
  for (int s = 0; s < ds.n_samples; ++s) {
    in.read(reinterpret_cast<char*>(rec.data()), kRecord);
    if (in.gcount() != static_cast<std::streamsize>(kRecord)) {
      throw IdxTruncatedError("truncated CIFAR batch: " + path);
    }
    ds.labels[s] = rec[0];
    for (int i = 0; i < ds.channels; ++i) {
      ds.pixels[size_t(s) * ds.channels + i] = rec[1 + i] / 255.0f;
    }
  }
  return ds;
}

StepGrid EncodeStatic(const float* pixels, int channels, int n_steps) {
  StepGrid g(n_steps, channels);
  for (int t = 0; t < n_steps; ++t) {
    double* row = g.step(t);
    for (int i = 0; i < channels; ++i) row[i] = pixels[i];
  }
  return g;
}

Sample MakeSample(const DatasetHandle& ds, int index, int n_steps) {
  TSSLBP_REQUIRE(index >= 0 && index < ds.n_samples, "sample out of range");
  Sample s;
  s.input_psc = EncodeStatic(
      ds.pixels.data() + static_cast<size_t>(index) * ds.channels,
      ds.channels, n_steps);
  s.label = ds.labels[index];
  return s;
}

StepGrid BinEvents(const std::vector<AerEvent>& events, int n_steps,
                   int64_t window_us, int height, int width,
                   int n_polarities) {
  TSSLBP_REQUIRE(n_steps >= 1 && window_us >= 1, "bad binning window");
  const int channels = n_polarities * height * width;
  StepGrid raster(n_steps, channels);
  const double bin_us = double(window_us) / n_steps;
  for (const auto& e : events) {
    TSSLBP_REQUIRE(e.timestamp_us >= 0, "negative event timestamp");
    if (e.x < 0 || e.x >= width || e.y < 0 || e.y >= height ||
        e.polarity < 0 || e.polarity >= n_polarities) {
      throw EventParseError("event coordinates out of range");
    }
    int bin = static_cast<int>(e.timestamp_us / bin_us);
    if (bin >= n_steps) bin = n_steps - 1;  // clip to the window
    const int ch = (e.polarity * height + e.y) * width + e.x;
    raster.at(bin, ch) = 1.0;  // saturating
  }
  return raster;
}

std::vector<AerEvent> LoadEventsText(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw DataError("cannot open " + path);
  std::vector<AerEvent> events;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    AerEvent e;
    if (!(ls >> e.x >> e.y >> e.polarity >> e.timestamp_us)) {
      throw EventParseError("malformed event at " + path + ":" +
                            std::to_string(lineno));
    }
    events.push_back(e);
  }
  return events;
}

std::vector<AerEvent> LoadEventsAer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw DataError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = static_cast<size_t>(in.tellg());
  in.seekg(0);
  if (size % 5 != 0) {
    throw EventParseError("AER file size not a multiple of 5 bytes at byte " +
                          std::to_string(size - size % 5) + ": " + path);
  }
  std::vector<AerEvent> events;
  events.reserve(size / 5);
  unsigned char rec[5];
  for (size_t off = 0; off < size; off += 5) {
    in.read(reinterpret_cast<char*>(rec), 5);
    if (in.gcount() != 5) {
      throw EventParseError("truncated AER record at byte offset " +
                            std::to_string(off) + ": " + path);
    }
    AerEvent e;
    e.x = rec[0];
    e.y = rec[1];
    e.polarity = rec[2] >> 7;
    e.timestamp_us = (int64_t(rec[2] & 0x7f) << 16) | (int64_t(rec[3]) << 8) |
                     int64_t(rec[4]);
    events.push_back(e);
  }
  return events;
}

std::vector<std::vector<int>> MakeBatches(int n_samples, int batch_size,
                                          uint64_t seed, int epoch) {
  TSSLBP_REQUIRE(batch_size >= 1, "batch_size must be >= 1");
  std::vector<int> order(n_samples);
  std::iota(order.begin(), order.end(), 0);
  uint64_t e = static_cast<uint64_t>(epoch);
  std::mt19937_64 rng(Fnv1a64(&e, sizeof(e), seed ^ 0xa5a5a5a55a5a5a5aull));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n_samples; start += batch_size) {
    const int end = std::min(n_samples, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

std::vector<int> SubsetIndices(int n_total, int n_subset, uint64_t seed) {
  std::vector<int> order(n_total);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(std::min(n_total, n_subset));
  return order;
}

}  // namespace tsslbp
