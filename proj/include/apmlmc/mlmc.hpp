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

#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "apmlmc/estimators.hpp"
#include "apmlmc/kinetics.hpp"

namespace apmlmc {

enum class LevelStrategy {
  GeometricFromEps2,  // dt_l = eps^2 M^-l
  ExtraCoarseLevel,   // dt_0 = t_end, dt_l = eps^2 M^(1-l) for l >= 1
};

LevelStrategy parse_strategy(std::string_view name);
std::string_view to_string(LevelStrategy strategy);

// Costs are in units of one trajectory at dt = eps^2.
struct LevelSpec {
  int index = 0;
  double dt = 0.0;
  std::int64_t steps = 0;
  double cost = 0.0;
  double fine_cost = 0.0;   // share of `cost` spent on the fine trajectory
  bool is_difference = false;
  int coarse_ratio = 0;     // dt_{l-1} / dt_l; 0 on level 0
};

struct MlmcConfig {
  ModelParams model;
  double t_end = 0.5;
  int m_factor = 2;
  LevelStrategy strategy = LevelStrategy::GeometricFromEps2;
  double rmse_target = 0.1;
  std::int64_t initial_samples = 0;  // 0 selects warmup_samples(rmse_target)
  int min_levels = 5;
  double alpha = 1.0;  // weak-rate exponent in the bias test; 0 fits it from observed means
  int max_levels = 16;
  QoiKind qoi = QoiKind::XSquared;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

void validate(const MlmcConfig& config);

// 40, 500 and 1000 samples at E = 0.1, 0.01 and 0.001, geometric in between,
// clamped outside.
std::int64_t warmup_samples(double rmse_target);

std::vector<LevelSpec> build_levels(const MlmcConfig& config, int level_count);

// ceil(2 E^-2 sqrt(V_l / C_l) sum_k sqrt(V_k C_k)), at least 1.
std::vector<std::int64_t> sample_counts(double rmse_target, const std::vector<double>& variances,
                                        const std::vector<double>& costs);

// ceil(V[F_L] / sum V[Y_l]) samples at fine_share * C_L each.
double classical_equivalent_cost(double fine_variance, double estimator_variance_sum,
                                 double fine_cost, double fine_share = 2.0 / 3.0);

struct LevelRow {
  LevelSpec spec;
  EstimatorStats fine;  // F at this level's time step
  EstimatorStats diff;  // F_l - F_{l-1}; equals `fine` on level 0
  double estimator_variance = 0.0;  // V_l / P_l
  double level_cost = 0.0;          // P_l C_l
};

struct MlmcReport {
  std::vector<LevelRow> levels;
  double estimate = 0.0;
  double variance_sum = 0.0;
  double total_cost = 0.0;
  double classical_cost = 0.0;
  double speedup = 0.0;
  double alpha = 1.0;
  double bias_estimate = 0.0;  // remaining-bias extrapolation at the finest level
  double bias_proxy = 0.0;     // |E[F_L - F_{L-1}]|
  bool converged = false;
};

// Adaptive driver. Level l draws sample i from RandomStream(seed, l, i).
// Stops when the extrapolated remaining bias is below E / sqrt(2) with
// sampling settled on every level, or returns converged == false after
// max_levels levels.
MlmcReport run_mlmc(const MlmcConfig& config);

// One row per level plus a "total" row.
void write_report_csv(std::ostream& out, const MlmcReport& report);
void write_report_table(std::ostream& out, const MlmcReport& report);

}  // namespace apmlmc
