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

#ifndef TSSLBP_COMMON_HPP_
#define TSSLBP_COMMON_HPP_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsslbp {

// Contract violation (programming error / misuse of an API).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Bad user-supplied configuration (shapes, files, constants out of range).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace internal {
[[noreturn]] inline void CheckFail(const char* kind, const char* expr,
                                   const char* file, int line,
                                   const std::string& msg) {
  std::ostringstream os;
  os << kind << " failed: " << expr << " at " << file << ":" << line;
  if (!msg.empty()) os << " (" << msg << ")";
  if (std::string(kind) == "TSSLBP_REQUIRE") throw ConfigError(os.str());
  throw ContractError(os.str());
}
}  // namespace internal

#define TSSLBP_CHECK(cond)                                                 \
  do {                                                                     \
    if (!(cond))                                                           \
      ::tsslbp::internal::CheckFail("TSSLBP_CHECK", #cond, __FILE__,       \
                                    __LINE__, "");                         \
  } while (0)

#define TSSLBP_CHECK_MSG(cond, msg)                                        \
  do {                                                                     \
    if (!(cond))                                                           \
      ::tsslbp::internal::CheckFail("TSSLBP_CHECK", #cond, __FILE__,       \
                                    __LINE__, (msg));                      \
  } while (0)

// Like TSSLBP_CHECK but raises ConfigError; use for user-facing validation.
#define TSSLBP_REQUIRE(cond, msg)                                          \
  do {                                                                     \
    if (!(cond))                                                           \
      ::tsslbp::internal::CheckFail("TSSLBP_REQUIRE", #cond, __FILE__,     \
                                    __LINE__, (msg));                      \
  } while (0)

// Step-major grid of real values: one row per time step, one column per
// unit (neuron or input channel). The layout keeps a single time step
// contiguous, which is what the per-step linear maps want.
struct StepGrid {
  int n_steps = 0;
  int n_units = 0;
  std::vector<double> v;

  StepGrid() = default;
  StepGrid(int steps, int units)
      : n_steps(steps), n_units(units),
        v(static_cast<size_t>(steps) * units, 0.0) {}

  double& at(int t, int i) { return v[static_cast<size_t>(t) * n_units + i]; }
  double at(int t, int i) const {
    return v[static_cast<size_t>(t) * n_units + i];
  }
  double* step(int t) { return v.data() + static_cast<size_t>(t) * n_units; }
  const double* step(int t) const {
    return v.data() + static_cast<size_t>(t) * n_units;
  }
};

// 64-bit FNV-1a; used for checkpoint config digests.
inline uint64_t Fnv1a64(const void* data, size_t len,
                        uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t Fnv1a64(const std::string& s) {
  return Fnv1a64(s.data(), s.size());
}

}  // namespace tsslbp

#endif  // TSSLBP_COMMON_HPP_
