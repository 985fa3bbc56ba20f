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
#include "apmlmc/kinetics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "apmlmc/errors.hpp"
#include "stat_checks.hpp"

namespace apmlmc {
namespace {

const ModelParams kTwoSpeed{0.5, 1.0, VelocityDistribution::TwoSpeed};

TEST(ScaledParams, MatchesDirectArithmetic) {
  const ScaledParams p = scaled_params(kTwoSpeed, 0.2);
  EXPECT_NEAR(p.v_char_dt, 1.1111, 1e-4);
  EXPECT_NEAR(p.diff_coef, 0.4444, 1e-4);
  EXPECT_NEAR(p.p_collide, 0.4444, 1e-4);
  EXPECT_NEAR(p.p_no_collide, 0.5556, 1e-4);
  EXPECT_DOUBLE_EQ(p.dt, 0.2);
}

TEST(ScaledParams, ZeroStepIsTheLimit) {
  const ScaledParams p = scaled_params(kTwoSpeed, 0.0);
  EXPECT_DOUBLE_EQ(p.v_char_dt, 2.0);
  EXPECT_EQ(p.diff_coef, 0.0);
  EXPECT_EQ(p.p_collide, 0.0);
  EXPECT_EQ(p.p_no_collide, 1.0);
}

TEST(ScaledParams, DiffusionLimitForVanishingEpsilon) {
  const ScaledParams p = scaled_params({1e-8, 1.0, VelocityDistribution::TwoSpeed}, 1.0);
  EXPECT_NEAR(p.v_char_dt, 0.0, 1e-7);
  EXPECT_NEAR(p.diff_coef, 1.0, 1e-12);
  EXPECT_NEAR(p.p_collide, 1.0, 1e-12);
}

TEST(ScaledParams, RejectsInvalidInput) {
  EXPECT_THROW(scaled_params(kTwoSpeed, -0.1), InvalidParameter);
  EXPECT_THROW(scaled_params(kTwoSpeed, std::nan("")), InvalidParameter);
  EXPECT_THROW(scaled_params(kTwoSpeed, std::numeric_limits<double>::infinity()),
               InvalidParameter);
  EXPECT_THROW(scaled_params({0.0, 1.0, VelocityDistribution::TwoSpeed}, 0.1), InvalidParameter);
  EXPECT_THROW(scaled_params({0.5, -1.0, VelocityDistribution::TwoSpeed}, 0.1), InvalidParameter);
  EXPECT_THROW(scaled_params({std::nan(""), 1.0, VelocityDistribution::TwoSpeed}, 0.1),
               InvalidParameter);
}

TEST(ScaledParams, InvariantsOnRandomInputs) {
  RandomStream rng(11, 0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double eps = std::exp(-6.0 + 8.0 * rng.uniform());
    const double vc = std::exp(-2.0 + 4.0 * rng.uniform());
    const double dt1 = std::exp(-12.0 + 14.0 * rng.uniform());
    const double dt2 = std::exp(-12.0 + 14.0 * rng.uniform());
    const ModelParams model{eps, vc, VelocityDistribution::TwoSpeed};
    const ScaledParams a = scaled_params(model, std::min(dt1, dt2));
    const ScaledParams b = scaled_params(model, std::max(dt1, dt2));
    for (const ScaledParams& p : {a, b}) {
      ASSERT_EQ(p.p_collide + p.p_no_collide, 1.0);
      ASSERT_GE(p.p_collide, 0.0);
      ASSERT_LE(p.p_collide, 1.0);
      ASSERT_GE(p.diff_coef, 0.0);
      ASSERT_LT(p.diff_coef, vc * vc);
      ASSERT_NEAR(p.diff_coef, vc * vc * p.p_collide, 1e-14 * vc * vc);
    }
    if (dt1 != dt2) {
      ASSERT_GE(b.diff_coef, a.diff_coef);
      ASSERT_GE(b.p_collide, a.p_collide);
      ASSERT_LE(b.v_char_dt, a.v_char_dt);
    }
  }
}

TEST(UnitVelocity, TwoSpeedMoments) {
  RandomStream rng(12, 0, 0);
  const int n = 1000000;
  std::vector<double> xs(n);
  for (double& x : xs) {
    x = sample_unit_velocity(VelocityDistribution::TwoSpeed, rng);
    ASSERT_TRUE(x == 1.0 || x == -1.0);
  }
  const testing::Moments m = testing::moments(xs);
  EXPECT_LT(std::abs(m.mean), 4.0 / std::sqrt(n));
  EXPECT_NEAR(m.variance, 1.0, 0.01);
}

TEST(UnitVelocity, GaussianPassesKolmogorovSmirnov) {
  RandomStream rng(13, 0, 0);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = sample_unit_velocity(VelocityDistribution::Gaussian, rng);
  EXPECT_GT(testing::ks_pvalue(xs, testing::normal_cdf), 0.01);
}

TEST(CollisionDominance, Examples) {
  EXPECT_TRUE(collision_dominance_holds(0.5, 0.2, 5));
  EXPECT_NEAR(std::pow(0.25 / 0.45, 5), 0.0529, 1e-4);
  EXPECT_TRUE(collision_dominance_holds(0.1, 0.01, 2));
  for (double eps : {0.01, 0.3, 1.0, 7.0}) {
    for (double dt : {1e-6, 0.1, 3.0}) EXPECT_TRUE(collision_dominance_holds(eps, dt, 1));
  }
}

TEST(CollisionDominance, HoldsOnRandomGrid) {
  RandomStream rng(14, 0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double eps = std::exp(-5.0 + 7.0 * rng.uniform());
    const double dt = std::exp(-12.0 + 14.0 * rng.uniform());
    const int m = 1 + static_cast<int>(rng.uniform() * 64);
    ASSERT_TRUE(collision_dominance_holds(eps, dt, m)) << eps << ' ' << dt << ' ' << m;
  }
}

TEST(Distribution, ParsesNames) {
  EXPECT_EQ(parse_distribution("two-speed"), VelocityDistribution::TwoSpeed);
  EXPECT_EQ(parse_distribution("gaussian"), VelocityDistribution::Gaussian);
  EXPECT_EQ(parse_distribution(to_string(VelocityDistribution::Gaussian)),
            VelocityDistribution::Gaussian);
  EXPECT_THROW(parse_distribution("uniform"), InvalidParameter);
}

}  // namespace
}  // namespace apmlmc
