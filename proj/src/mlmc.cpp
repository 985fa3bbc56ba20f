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
#include "apmlmc/mlmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "apmlmc/csv.hpp"
#include "apmlmc/errors.hpp"
#include "apmlmc/scheme.hpp"

namespace apmlmc {

LevelStrategy parse_strategy(std::string_view name) {
  if (name == "1" || name == "geometric") return LevelStrategy::GeometricFromEps2;
  if (name == "2" || name == "extra-coarse") return LevelStrategy::ExtraCoarseLevel;
  throw InvalidParameter("strategy: expected 1|geometric or 2|extra-coarse, got '" +
                         std::string(name) + "'");
}

std::string_view to_string(LevelStrategy strategy) {
  return strategy == LevelStrategy::GeometricFromEps2 ? "geometric" : "extra-coarse";
}

void validate(const MlmcConfig& config) {
  validate(config.model);
  if (!(config.rmse_target > 0.0)) throw InvalidParameter("rmse: must be > 0");
  if (config.m_factor < 2) throw InvalidParameter("m_factor: must be >= 2");
  if (!(config.t_end > 0.0) || !std::isfinite(config.t_end)) {
    throw InvalidParameter("t_end: must be finite and > 0");
  }
  if (config.initial_samples < 0) throw InvalidParameter("samples: must be >= 0");
  if (!(config.alpha >= 0.0) || !std::isfinite(config.alpha)) {
    throw InvalidParameter("alpha: must be finite and >= 0");
  }
  if (config.min_levels < 1) throw InvalidParameter("min_levels: must be >= 1");
  if (config.max_levels < config.min_levels) {
    throw InvalidParameter("max_levels: must be >= min_levels");
  }
}

std::int64_t warmup_samples(double rmse_target) {
  if (!(rmse_target > 0.0)) throw InvalidParameter("rmse: must be > 0");
  const double le = std::log10(rmse_target);
  double lp = 0.0;
  if (le >= -1.0) {
    lp = std::log10(40.0);
  } else if (le >= -2.0) {
    lp = std::log10(40.0) + (-1.0 - le) * (std::log10(500.0) - std::log10(40.0));
  } else if (le >= -3.0) {
    lp = std::log10(500.0) + (-2.0 - le) * (std::log10(1000.0) - std::log10(500.0));
  } else {
    lp = 3.0;
  }
  return static_cast<std::int64_t>(std::llround(std::pow(10.0, lp)));
}

std::vector<LevelSpec> build_levels(const MlmcConfig& config, int level_count) {
  validate(config);
  if (level_count < 1) throw InvalidParameter("level_count: must be >= 1");
  const double eps2 = config.model.epsilon * config.model.epsilon;
  const double m = config.m_factor;
  std::vector<LevelSpec> levels;
  levels.reserve(static_cast<std::size_t>(level_count));

  // Geometric levels relative to eps^2: dt = eps^2 / M^k, single-trajectory cost M^k.
  auto geometric = [&](int index, int k, bool difference, double coarse_share, int ratio) {
    LevelSpec spec;
    spec.index = index;
    spec.dt = eps2 / std::pow(m, k);
    spec.steps = step_count(config.t_end, spec.dt);
    spec.fine_cost = std::pow(m, k);
    spec.cost = spec.fine_cost + coarse_share;
    spec.is_difference = difference;
    spec.coarse_ratio = ratio;
    return spec;
  };

  if (config.strategy == LevelStrategy::GeometricFromEps2) {
    for (int l = 0; l < level_count; ++l) {
      levels.push_back(l == 0 ? geometric(0, 0, false, 0.0, 0)
                              : geometric(l, l, true, std::pow(m, l - 1), config.m_factor));
    }
    return levels;
  }

  const std::int64_t ratio = step_count(config.t_end, eps2);
  if (ratio < 2) {
    throw InvalidParameter("t_end/epsilon^2 must be an integer >= 2 for the extra coarse level");
  }
  if (ratio > 1000000) throw InvalidParameter("t_end/epsilon^2: coarse ratio too large");
  const double coarse = 1.0 / static_cast<double>(ratio);
  LevelSpec base;
  base.index = 0;
  base.dt = config.t_end;
  base.steps = 1;
  base.fine_cost = coarse;
  base.cost = coarse;
  levels.push_back(base);
  for (int l = 1; l < level_count; ++l) {
    levels.push_back(l == 1 ? geometric(1, 0, true, coarse, static_cast<int>(ratio))
                            : geometric(l, l - 1, true, std::pow(m, l - 2), config.m_factor));
  }
  return levels;
}

std::vector<std::int64_t> sample_counts(double rmse_target, const std::vector<double>& variances,
                                        const std::vector<double>& costs) {
  if (variances.size() != costs.size()) throw InvalidParameter("sample_counts: size mismatch");
  if (!(rmse_target > 0.0) || std::isnan(rmse_target)) throw InvalidParameter("rmse: must be > 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < variances.size(); ++i) {
    if (!std::isfinite(variances[i]) || variances[i] < 0.0) {
      throw InvalidParameter("sample_counts: variances must be finite and >= 0");
    }
    if (!std::isfinite(costs[i]) || costs[i] <= 0.0) {
      throw InvalidParameter("sample_counts: costs must be finite and > 0");
    }
    sum += std::sqrt(variances[i] * costs[i]);
  }
  std::vector<std::int64_t> counts;
  counts.reserve(variances.size());
  const double scale = 2.0 / (rmse_target * rmse_target);
  for (std::size_t i = 0; i < variances.size(); ++i) {
    const double p = std::ceil(scale * std::sqrt(variances[i] / costs[i]) * sum);
    counts.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(p)));
  }
  return counts;
}

double classical_equivalent_cost(double fine_variance, double estimator_variance_sum,
                                 double fine_cost, double fine_share) {
  if (!(estimator_variance_sum > 0.0) || !std::isfinite(estimator_variance_sum)) {
    throw InvalidParameter("classical cost: estimator variance sum must be > 0");
  }
  if (!(fine_variance >= 0.0) || !(fine_cost > 0.0) || !(fine_share > 0.0)) {
    throw InvalidParameter("classical cost: invalid fine variance or cost");
  }
  const double samples = std::max(1.0, std::ceil(fine_variance / estimator_variance_sum));
  return samples * fine_share * fine_cost;
}

namespace {

// Weak-rate exponent from |mean| over the regular difference levels.
double fit_alpha(const std::vector<LevelRow>& rows, int first_regular, double m) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t l = static_cast<std::size_t>(first_regular); l < rows.size(); ++l) {
    const double a = std::abs(rows[l].diff.mean);
    if (!(a > 0.0)) continue;
    const double x = static_cast<double>(l);
    const double y = std::log(a) / std::log(m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 1.0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 1.0;
  const double slope = (n * sxy - sx * sy) / denom;
  return std::max(0.5, -slope);
}

void finalize(MlmcReport& report) {
  report.estimate = 0.0;
  report.variance_sum = 0.0;
  report.total_cost = 0.0;
  for (LevelRow& row : report.levels) {
    const double p = static_cast<double>(row.diff.count);
    row.estimator_variance = p > 0.0 ? row.diff.variance() / p : 0.0;
    row.level_cost = p * row.spec.cost;
    report.estimate += row.diff.mean;
    report.variance_sum += row.estimator_variance;
    report.total_cost += row.level_cost;
  }
  const LevelRow& last = report.levels.back();
  report.bias_proxy = std::abs(last.diff.mean);
  if (report.variance_sum > 0.0) {
    report.classical_cost = classical_equivalent_cost(
        last.fine.variance(), report.variance_sum, last.spec.cost,
        last.spec.fine_cost / last.spec.cost);
    report.speedup = report.classical_cost / report.total_cost;
  }
}

}  // namespace

MlmcReport run_mlmc(const MlmcConfig& config) {
  validate(config);
  const double m = config.m_factor;
  const std::int64_t warmup =
      config.initial_samples > 0 ? config.initial_samples : warmup_samples(config.rmse_target);
  const int first_regular = config.strategy == LevelStrategy::GeometricFromEps2 ? 1 : 2;

  MlmcReport report;
  int level_count = std::max(config.min_levels, first_regular + 1);
  if (level_count > config.max_levels) level_count = config.max_levels;
  for (const LevelSpec& spec : build_levels(config, level_count)) {
    report.levels.push_back({spec, {}, {}, 0.0, 0.0});
  }
  std::vector<std::int64_t> pending(report.levels.size(), warmup);

  auto run_level = [&](LevelRow& row, std::int64_t count) {
    const SampleRange range{config.seed, static_cast<std::uint32_t>(row.spec.index),
                            static_cast<std::uint64_t>(row.diff.count), count};
    if (!row.spec.is_difference) {
      const EstimatorStats s = single_level_estimate(config.model, row.spec.dt, config.t_end,
                                                     config.qoi, range, config.threads);
      row.diff = merge_stats(row.diff, s);
      row.fine = row.diff;
      return;
    }
    const DifferenceStats s =
        difference_estimate(config.model, row.spec.dt, row.spec.coarse_ratio, config.t_end,
                            config.qoi, range, config.threads);
    row.diff = merge_stats(row.diff, s.diff);
    row.fine = merge_stats(row.fine, s.fine);
  };

  // Allocates samples over the first `active` levels until none needs more.
  auto settle = [&](std::size_t active) {
    for (;;) {
      for (std::size_t l = 0; l < report.levels.size(); ++l) {
        if (pending[l] > 0) run_level(report.levels[l], pending[l]);
        pending[l] = 0;
      }
      std::vector<double> variances;
      std::vector<double> costs;
      for (std::size_t l = 0; l < active; ++l) {
        variances.push_back(std::max(0.0, report.levels[l].diff.variance()));
        costs.push_back(report.levels[l].spec.cost);
      }
      const std::vector<std::int64_t> target =
          sample_counts(config.rmse_target, variances, costs);
      bool settled = true;
      for (std::size_t l = 0; l < active; ++l) {
        pending[l] = std::max<std::int64_t>(0, target[l] - report.levels[l].diff.count);
        if (pending[l] > 0) settled = false;
      }
      if (settled) return;
    }
  };

  auto bias_converged = [&] {
    const double alpha =
        config.alpha > 0.0 ? config.alpha : fit_alpha(report.levels, first_regular, m);
    const int top = static_cast<int>(report.levels.size()) - 1;
    double remaining = 0.0;
    for (int l = std::max(first_regular, top - 2); l <= top; ++l) {
      const double scaled = std::pow(m, -alpha * (top - l)) *
                            std::abs(report.levels[static_cast<std::size_t>(l)].diff.mean);
      remaining = std::max(remaining, scaled);
    }
    remaining /= std::pow(m, alpha) - 1.0;
    report.alpha = alpha;
    report.bias_estimate = remaining;
    return remaining < config.rmse_target / std::sqrt(2.0);
  };

  auto variance_sum = [&] {
    double sum = 0.0;
    for (const LevelRow& row : report.levels) {
      sum += std::max(0.0, row.diff.variance()) / static_cast<double>(row.diff.count);
    }
    return sum;
  };

  // The newest level keeps its warm-up samples unless they fail the test.
  for (;;) {
    settle(report.levels.size() - 1);
    if (bias_converged() &&
        variance_sum() < config.rmse_target * config.rmse_target) {
      report.converged = true;
      break;
    }
    settle(report.levels.size());
    if (bias_converged()) {
      report.converged = true;
      break;
    }
    if (static_cast<int>(report.levels.size()) >= config.max_levels) break;
    const std::vector<LevelSpec> specs =
        build_levels(config, static_cast<int>(report.levels.size()) + 1);
    report.levels.push_back({specs.back(), {}, {}, 0.0, 0.0});
    pending.push_back(warmup);
  }
  finalize(report);
  return report;
}

void write_report_csv(std::ostream& out, const MlmcReport& report) {
  write_row(out, {"level", "dt", "samples", "var_fine", "mean_diff", "var_diff", "var_estimator",
                  "cost_per_sample", "level_cost"});
  std::int64_t total_samples = 0;
  for (const LevelRow& row : report.levels) {
    total_samples += row.diff.count;
    write_row(out, {std::to_string(row.spec.index), format_number(row.spec.dt),
                    std::to_string(row.diff.count), format_number(row.fine.variance()),
                    format_number(row.diff.mean), format_number(row.diff.variance()),
                    format_number(row.estimator_variance), format_number(row.spec.cost),
                    format_number(row.level_cost)});
  }
  write_row(out, {"total", "", std::to_string(total_samples), "", format_number(report.estimate),
                  "", format_number(report.variance_sum), "", format_number(report.total_cost)});
}

void write_report_table(std::ostream& out, const MlmcReport& report) {
  char line[256];
  std::snprintf(line, sizeof line, "%5s %11s %10s %10s %11s %10s %10s %8s %12s\n", "level",
                "dt", "P", "V[F]", "E[dF]", "V_l", "V[Y_l]", "C_l", "P_l*C_l");
  out << line;
  for (const LevelRow& row : report.levels) {
    std::snprintf(line, sizeof line, "%5d %11.3e %10lld %10.3g %11.3e %10.3e %10.3e %8.4g %12.0f\n",
                  row.spec.index, row.spec.dt, static_cast<long long>(row.diff.count),
                  row.fine.variance(), row.diff.mean, row.diff.variance(),
                  row.estimator_variance, row.spec.cost, row.level_cost);
    out << line;
  }
  std::snprintf(line, sizeof line, "%5s %11s %10s %10s %11.4g %10s %10.3e %8s %12.0f\n", "sum",
                "", "", "", report.estimate, "", report.variance_sum, "", report.total_cost);
  out << line;
  std::snprintf(line, sizeof line,
                "converged %s, alpha %.3g, bias estimate %.3g, classical cost %.0f, "
                "multilevel cost %.0f, speedup %.3g\n",
                report.converged ? "yes" : "no", report.alpha, report.bias_estimate,
                report.classical_cost, report.total_cost, report.speedup);
  out << line;
}

}  // namespace apmlmc
