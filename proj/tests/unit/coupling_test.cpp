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
#include "apmlmc/coupling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "apmlmc/errors.hpp"
#include "stat_checks.hpp"

namespace apmlmc {
namespace {

const ModelParams kModel{0.5, 1.0, VelocityDistribution::TwoSpeed};

TEST(CoupleXi, Examples) {
  EXPECT_EQ(couple_xi(std::vector<double>{0.7}), 0.7);
  EXPECT_DOUBLE_EQ(couple_xi(std::vector<double>{1, 1, 1, 1}), 2.0);
  EXPECT_THROW(couple_xi(std::vector<double>{}), ContractViolation);
}

TEST(CoupleXi, PreservesStandardNormalMarginal) {
  RandomStream rng(30, 0, 0);
  std::vector<double> out(200000);
  std::vector<double> block(5);
  for (double& x : out) {
    for (double& b : block) b = rng.normal();
    x = couple_xi(block);
  }
  EXPECT_GT(testing::ks_pvalue(out, testing::normal_cdf), 0.01);
}

TEST(CoupleU, Examples) {
  EXPECT_EQ(couple_u(std::vector<double>{0.3}), 0.3);
  EXPECT_NEAR(couple_u(std::vector<double>{0.5, 0.9}), 0.81, 1e-15);
  EXPECT_THROW(couple_u(std::vector<double>{}), ContractViolation);
  EXPECT_THROW(couple_u(std::vector<double>{0.5, 1.2}), ContractViolation);
  EXPECT_THROW(couple_u(std::vector<double>{-0.1}), ContractViolation);
}

TEST(CoupleU, PreservesUniformMarginal) {
  RandomStream rng(31, 0, 0);
  std::vector<double> out(200000);
  std::vector<double> block(5);
  for (double& x : out) {
    for (double& b : block) b = rng.uniform();
    x = couple_u(block);
  }
  EXPECT_GT(testing::ks_pvalue(out, testing::uniform_cdf), 0.01);
}

TEST(CoarseVelocity, Branches) {
  const ScaledParams coarse = scaled_params(kModel, 1.0);
  EXPECT_NEAR(coarse.p_no_collide, 0.2, 1e-15);
  EXPECT_EQ(coarse_collision_and_velocity(0.0, coarse, 1.0, -1.0), 1.0);
  EXPECT_EQ(coarse_collision_and_velocity(1.0, coarse, 1.0, -1.0), -1.0);
  EXPECT_EQ(coarse_collision_and_velocity(0.25, coarse, 1.0, -1.0), -1.0);
}

TEST(CoarseVelocity, SubThresholdFineUniformsNeverCollideCoarse) {
  const ScaledParams fine = scaled_params(kModel, 0.2);
  const ScaledParams coarse = scaled_params(kModel, 0.4);
  RandomStream rng(32, 0, 0);
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> us = {rng.uniform() * fine.p_no_collide,
                                    rng.uniform() * fine.p_no_collide};
    ASSERT_FALSE(collides(couple_u(us), coarse));
  }
}

TEST(CoupledPair, RejectsInvalidSetups) {
  RandomStream rng(1, 0, 0);
  EXPECT_THROW(simulate_coupled_pair(kModel, 0.2, 1, 10.0, rng), InvalidParameter);
  EXPECT_THROW(simulate_coupled_pair(kModel, 0.2, 5, 10.5, rng), InvalidParameter);
}

TEST(CoupledPair, FinePathIsTheSingleLevelPath) {
  for (std::uint64_t i = 0; i < 50; ++i) {
    RandomStream a(33, 1, i);
    RandomStream b(33, 1, i);
    const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 10.0, a);
    const PathResult path = simulate_path(kModel, 0.2, 10.0, b);
    ASSERT_EQ(pair.fine.x, path.final_state.x);
    ASSERT_EQ(pair.fine.v, path.final_state.v);
    ASSERT_EQ(pair.fine_collisions, path.collisions);
  }
}

TEST(CoupledPair, InitialUnitVelocityIsShared) {
  RandomStream rng(34, 0, 0);
  CoupledOptions options;
  options.trace = true;
  const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 1.0, rng, options);
  const double vf = scaled_params(kModel, 0.2).v_char_dt;
  const double vc = scaled_params(kModel, 1.0).v_char_dt;
  EXPECT_DOUBLE_EQ(pair.trace.front().v_fine / vf, pair.trace.front().v_coarse / vc);
}

TEST(CoupledPair, NoCoarseCollisionWithoutFineCollision) {
  std::int64_t violations = 0;
  std::int64_t blocks = 0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    RandomStream rng(35, 0, i);
    const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 10.0, rng);
    violations += pair.dominance_violations;
    blocks += pair.coarse_steps;
  }
  EXPECT_EQ(blocks, 200000);
  EXPECT_EQ(violations, 0);
}

TEST(CoupledPair, ObserverSeesEveryBlock) {
  RandomStream rng(36, 0, 0);
  CoupledOptions options;
  options.burn_in_steps = 3;
  int calls = 0;
  options.observer = [&](const BlockDraws& block, const StepDraws& coarse) {
    ++calls;
    ASSERT_EQ(block.steps.size(), 5u);
    std::vector<double> xis;
    for (const StepDraws& d : block.steps) xis.push_back(d.xi);
    EXPECT_DOUBLE_EQ(coarse.xi, couple_xi(xis));
  };
  simulate_coupled_pair(kModel, 0.2, 5, 10.0, rng, options);
  EXPECT_EQ(calls, 13);
}

TEST(CoupledPair, TraceRowsAlignWithBlocks) {
  RandomStream rng(37, 0, 0);
  CoupledOptions options;
  options.trace = true;
  options.burn_in_steps = 2;
  const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 10.0, rng, options);
  ASSERT_EQ(pair.trace.size(), 51u);
  EXPECT_EQ(pair.trace.front().x_fine, 0.0);
  EXPECT_EQ(pair.trace.front().x_coarse, 0.0);
  EXPECT_EQ(pair.trace.back().x_fine, pair.fine.x);
  EXPECT_EQ(pair.trace.back().x_coarse, pair.coarse.x);
  EXPECT_NEAR(pair.trace.back().time, 10.0, 1e-12);
  std::int64_t fine = 0;
  std::int64_t coarse = 0;
  for (std::size_t k = 1; k < pair.trace.size(); ++k) {
    fine += pair.trace[k].fine_collided ? 1 : 0;
    coarse += pair.trace[k].coarse_collided ? 1 : 0;
    if (pair.trace[k].coarse_collided) EXPECT_EQ(k % 5, 0u);
  }
  EXPECT_EQ(fine, pair.fine_collisions);
  EXPECT_EQ(coarse, pair.coarse_collisions);
  EXPECT_NEAR(pair.brownian_fine + pair.transport_fine, pair.fine.x, 1e-12);
  EXPECT_NEAR(pair.brownian_coarse + pair.transport_coarse, pair.coarse.x, 1e-12);
}

TEST(CoupledPair, CoarseMarginalMatchesIndependentCoarseRuns) {
  const int n = 40000;
  std::vector<double> coupled;
  std::vector<double> independent;
  std::int64_t coupled_collisions = 0;
  std::int64_t independent_collisions = 0;
  for (int i = 0; i < n; ++i) {
    RandomStream a(38, 0, static_cast<std::uint64_t>(i));
    const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 10.0, a);
    coupled.push_back(pair.coarse.x);
    coupled_collisions += pair.coarse_collisions;
    RandomStream b(38, 1, static_cast<std::uint64_t>(i));
    const PathResult path = simulate_path(kModel, 1.0, 10.0, b);
    independent.push_back(path.final_state.x);
    independent_collisions += path.collisions;
  }
  const testing::Moments mc = testing::moments(coupled);
  const testing::Moments mi = testing::moments(independent);
  EXPECT_TRUE(testing::within_sigma(mc.mean, mi.mean, mc.se_mean, mi.se_mean, 3.0));
  EXPECT_TRUE(testing::within_sigma(mc.variance, mi.variance, mc.se_variance, mi.se_variance, 3.0));
  const double steps = 10.0 * n;
  const double pc = scaled_params(kModel, 1.0).p_collide;
  const double se = std::sqrt(pc * (1.0 - pc) / steps);
  EXPECT_TRUE(testing::within_sigma(coupled_collisions / steps, independent_collisions / steps,
                                    se, se, 3.0));
}

TEST(CoupledPair, DifferenceVarianceBelowFineVariance) {
  std::vector<double> fine;
  std::vector<double> diff;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    RandomStream rng(39, 0, i);
    const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 10.0, rng);
    fine.push_back(pair.fine.x);
    diff.push_back(pair.fine.x - pair.coarse.x);
  }
  const testing::Moments mf = testing::moments(fine);
  const testing::Moments md = testing::moments(diff);
  EXPECT_LT(md.variance, mf.variance);
  EXPECT_TRUE(testing::within_sigma(md.variance, 5.896, md.se_variance,
                                    testing::gaussian_variance_se(5.896, 1e4), 3.0))
      << md.variance;
}

TEST(CoupledPair, IncrementDifferencesHaveZeroMean) {
  std::vector<double> w;
  std::vector<double> t;
  std::vector<double> v;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    RandomStream rng(40, 0, i);
    const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 10.0, rng);
    w.push_back(pair.brownian_fine - pair.brownian_coarse);
    t.push_back(pair.transport_fine - pair.transport_coarse);
    v.push_back(pair.fine.v - pair.coarse.v);
  }
  for (const auto* xs : {&w, &t, &v}) {
    const testing::Moments m = testing::moments(*xs);
    EXPECT_LT(std::abs(m.mean), 4.0 * m.se_mean);
  }
}

TEST(CoupledTraceCsv, HasDocumentedColumns) {
  RandomStream rng(41, 0, 0);
  CoupledOptions options;
  options.trace = true;
  const CoupledOutcome pair = simulate_coupled_pair(kModel, 0.2, 5, 2.0, rng, options);
  std::ostringstream out;
  write_coupled_trace_csv(out, pair.trace);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "time,x_fine,v_fine,x_coarse,v_coarse,fine_collided,coarse_collided");
}

}  // namespace
}  // namespace apmlmc
