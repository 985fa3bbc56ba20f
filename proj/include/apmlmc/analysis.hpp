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
#include <optional>
#include <vector>

namespace apmlmc {

// A coupled level pair: fine step dt_fine, coarse step m_factor * dt_fine,
// horizon t_end = N * m_factor * dt_fine.
struct AnalysisPoint {
  double epsilon = 1.0;
  double v_char = 1.0;
  double dt_fine = 0.0;
  int m_factor = 2;
  double t_end = 0.0;
};

// Validates the point and returns the coarse step count N.
std::int64_t coarse_steps(const AnalysisPoint& point);

// Variance of the summed Brownian increment differences after N coarse steps.
double brownian_diff_variance(const AnalysisPoint& point);

// Variance of the summed transport increment differences after N coarse
// steps, for a stationary (post-collision) velocity process.
double transport_diff_variance(const AnalysisPoint& point);

// Stationary variance of v_fine - v_coarse.
double velocity_diff_variance(const AnalysisPoint& point);

enum class VarianceKind { Brownian, Transport, Velocity };

// Leading term of the small dt_fine expansion; linear in dt_fine.
double leading_order_variance(VarianceKind kind, const AnalysisPoint& point);

// Lipschitz overlay: k_x^2 (V_W + V_T) + k_v^2 V_vel + 2 k_x k_v sqrt((V_W + V_T) V_vel).
double variance_bound(const AnalysisPoint& point, double k_x, double k_v);

// Stationary variance of the position after t_end / dt steps of a single
// level started at x = 0. The step count may be fractional.
double single_level_position_variance(double epsilon, double v_char, double dt, double t_end);

// Cost-weighted comparison of keeping versus dropping a level 0 at M * eps^2
// below a level 1 at dt_level1, for real M > 1:
//   sqrt(C0 V[F0]) + sqrt((C0 + C1) V[F1 - F0]) - sqrt(C1 V[F1]).
double coarse_threshold_lhs(double epsilon, double v_char, double t_end, double dt_level1,
                            double m);

struct ThresholdResult {
  std::optional<double> root;  // empty when no sign change on [1.5, 64]
  double lhs_low = 0.0;        // left-hand side at M = 1.5
  double lhs_high = 0.0;       // left-hand side at M = 64
};

// Bisection on M in [1.5, 64] to an absolute tolerance of 1e-3.
ThresholdResult coarse_level_threshold(double epsilon, double v_char, double t_end,
                                       double dt_level1);

struct RatePoint {
  double dt = 0.0;
  double abs_mean = 0.0;
  double variance = 0.0;
};

struct RateFit {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;  // log2(M)
  std::vector<double> alpha_residuals;
  std::vector<double> beta_residuals;
};

// Least-squares slopes of log2(abs_mean) and log2(variance) against log2(dt).
// Throws InvalidParameter for fewer than three points or non-positive values.
RateFit fit_convergence_rates(const std::vector<RatePoint>& series, int m_factor);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace apmlmc
