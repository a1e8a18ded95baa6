// Copyright 2026 The mcqa-probe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCQA_PROBE_RNG_H_
#define MCQA_PROBE_RNG_H_

#include <concepts>
#include <cstddef>
#include <cstdint>

namespace mcqa_probe {

// Deterministic randomness shared by every stochastic component.
//
// All streams are SplitMix64: the state advances by the golden-gamma
// constant and each output is the Stafford variant-13 finalizer of the new
// state. Independent streams are keyed with DeriveSeed, so per-instance
// choices do not depend on iteration order or thread count:
//
//   PIO choice of instance i          RngState(DeriveSeed(seed, i))
//   augmentation of instance i, epoch e
//                                     RngState(DeriveSeed(DeriveSeed(seed, e), i))
//   training shuffle for epoch e      RngState(DeriveSeed(seed, e))
//
// Draw conversions are fixed so other implementations can reproduce them:
//   UniformDouble: (x >> 11) * 2^-53
//   UniformIndex(n): high 64 bits of the 128-bit product x * n

namespace internal {
__extension__ typedef unsigned __int128 Uint128;
}  // namespace internal

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output finalizer.
std::uint64_t Mix64(std::uint64_t z);

// Seed of the sub-stream `key` of `seed`.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t key);

template <typename T>
concept RandomBitSource = requires(T& source) {
  { source.NextU64() } -> std::same_as<std::uint64_t>;
};

class RngState {
 public:
  explicit RngState(std::uint64_t seed) : state_(seed) {}

  std::uint64_t NextU64() {
    state_ += kGoldenGamma;
    return Mix64(state_);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

template <RandomBitSource Source>
double UniformDouble(Source& source) {
  return static_cast<double>(source.NextU64() >> 11) * 0x1.0p-53;
}

// Uniform in [0, n). n must be positive.
template <RandomBitSource Source>
std::size_t UniformIndex(Source& source, std::size_t n) {
  const internal::Uint128 wide =
      static_cast<internal::Uint128>(source.NextU64()) * n;
  return static_cast<std::size_t>(wide >> 64);
}

// One draw; true with probability p. p <= 0 never fires, p >= 1 always does.
template <RandomBitSource Source>
bool Bernoulli(Source& source, double p) {
  return UniformDouble(source) < p;
}

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_RNG_H_
