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
#include "apmlmc/random.hpp"

#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "stat_checks.hpp"

namespace apmlmc {
namespace {

TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const PhiloxCounter out = philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                          {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const PhiloxCounter out = philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                          {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RandomStream, SameIdReplaysSameSequence) {
  RandomStream a(42, 3, 17);
  RandomStream b(StreamId{42, 3, 17});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RandomStream, CopyReplaysFromCopyPoint) {
  RandomStream a(7, 0, 0);
  a.normal();
  RandomStream b = a;
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(RandomStream, DistinctIdsGiveDistinctStreams) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    for (std::uint32_t tag = 0; tag < 4; ++tag) {
      for (std::uint64_t index : {0ull, 1ull, 1ull << 32, (1ull << 32) + 1}) {
        firsts.insert(RandomStream(seed, tag, index)());
      }
    }
  }
  EXPECT_EQ(firsts.size(), 64u);
}

TEST(RandomStream, UniformIsInHalfOpenUnitInterval) {
  RandomStream rng(1, 0, 0);
  std::vector<double> xs;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    xs.push_back(u);
  }
  EXPECT_GT(testing::ks_pvalue(xs, testing::uniform_cdf), 0.01);
}

TEST(RandomStream, NormalPassesKolmogorovSmirnov) {
  RandomStream rng(2, 0, 0);
  std::vector<double> xs;
  for (int i = 0; i < 200000; ++i) xs.push_back(rng.normal());
  EXPECT_GT(testing::ks_pvalue(xs, testing::normal_cdf), 0.01);
  const testing::Moments m = testing::moments(xs);
  EXPECT_NEAR(m.mean, 0.0, 4.0 * m.se_mean);
  EXPECT_NEAR(m.variance, 1.0, 4.0 * m.se_variance);
}

TEST(RandomStream, SignIsFairCoin) {
  RandomStream rng(3, 0, 0);
  int plus = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double s = rng.sign();
    ASSERT_TRUE(s == 1.0 || s == -1.0);
    plus += s > 0 ? 1 : 0;
  }
  EXPECT_NEAR(plus, n / 2, 4.0 * std::sqrt(n / 4.0));
}

TEST(RandomStream, NeighbouringIndicesAreUncorrelated) {
  const int n = 100000;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    RandomStream a(9, 0, static_cast<std::uint64_t>(i));
    RandomStream b(9, 0, static_cast<std::uint64_t>(i) + 1);
    sxy += a.normal() * b.normal();
  }
  EXPECT_NEAR(sxy / n, 0.0, 4.0 / std::sqrt(n));
}

}  // namespace
}  // namespace apmlmc
