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

#include "mcqa_probe/rng.h"

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

namespace mcqa_probe {
namespace {

// Reference outputs from a standalone Python SplitMix64.
TEST(RngTest, MatchesReferenceSplitMix64Stream) {
  RngState zero(0);
  EXPECT_EQ(zero.NextU64(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(zero.NextU64(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(zero.NextU64(), 0x06c45d188009454fULL);

  RngState other(1234567);
  EXPECT_EQ(other.NextU64(), 0x599ed017fb08fc85ULL);
  EXPECT_EQ(other.NextU64(), 0x2c73f08458540fa5ULL);
  EXPECT_EQ(other.NextU64(), 0x883ebce5a3f27c77ULL);
}

TEST(RngTest, DeriveSeedMatchesReference) {
  EXPECT_EQ(DeriveSeed(42, 0), 0x4579b960bb007f46ULL);
  EXPECT_EQ(DeriveSeed(42, 1), 0xa9cb101be2f6824fULL);
  EXPECT_EQ(DeriveSeed(0, 0), 0x48218226ff3cd4bfULL);
}

TEST(RngTest, DrawConversionsMatchReference) {
  const std::array<double, 5> doubles = {
      0.3898297483912715, 0.01678829452815611, 0.9007606806068834,
      0.5829302930280781, 0.45244189501146836};
  RngState a(7);
  for (double expected : doubles) EXPECT_DOUBLE_EQ(UniformDouble(a), expected);

  const std::array<std::size_t, 5> indices = {3, 0, 9, 5, 4};
  RngState b(7);
  for (std::size_t expected : indices) EXPECT_EQ(UniformIndex(b, 10), expected);
}

TEST(RngTest, BernoulliEdgeProbabilities) {
  RngState rng(3);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(Bernoulli(rng, 0.0));
    EXPECT_TRUE(Bernoulli(rng, 1.0));
  }
}

TEST(RngTest, UniformIndexStaysInRange) {
  RngState rng(99);
  for (std::size_t n = 1; n < 50; ++n) {
    for (int i = 0; i < 200; ++i) EXPECT_LT(UniformIndex(rng, n), n);
  }
}

TEST(RngTest, DerivedStreamsDiffer) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t key = 0; key < 100; ++key) {
    seeds.push_back(DeriveSeed(5, key));
  }
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
}

}  // namespace
}  // namespace mcqa_probe
