/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================
*/
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace apmlmc {

// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Identifies one independent random stream: a master seed plus a
// (tag, index) pair. Tags separate purposes (MLMC level, scan point, ...);
// the index is usually the sample number, so every sample owns a stream
// no matter which worker simulates it.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint32_t tag = 0;
  std::uint64_t index = 0;
};

// Counter-based random stream. Copyable; a copy replays the same sequence.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream() : RandomStream(StreamId{}) {}
  explicit RandomStream(StreamId id);
  RandomStream(std::uint64_t seed, std::uint32_t tag, std::uint64_t index)
      : RandomStream(StreamId{seed, tag, index}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  // Fair coin: -1.0 or +1.0.
  double sign();

 private:
  void refill();

  PhiloxKey key_{};
  PhiloxCounter ctr_{};
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace apmlmc
