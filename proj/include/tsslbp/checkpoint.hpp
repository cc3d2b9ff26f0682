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

#ifndef TSSLBP_CHECKPOINT_HPP_
#define TSSLBP_CHECKPOINT_HPP_

#include <string>

#include "tsslbp/layers.hpp"

namespace tsslbp {

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& msg)
      : std::runtime_error(msg) {}
};
class CkMagicError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CkVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CkDigestError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class CkTruncationError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Digest of everything a checkpoint must agree on with the run config:
// architecture, neuron constants, and window length.
uint64_t ConfigDigest(const NetworkSpec& net);

// Versioned binary container: magic "TSSLBPCK", u32 version, u64 config
// digest, per-layer shape header, little-endian f32 weight payload.
void SaveCheckpoint(const NetworkSpec& net, const std::string& path);

// Loads weights into *net, which must already carry the matching
// architecture; rejects digest mismatches.
void LoadCheckpoint(NetworkSpec* net, const std::string& path);

}  // namespace tsslbp

#endif  // TSSLBP_CHECKPOINT_HPP_
