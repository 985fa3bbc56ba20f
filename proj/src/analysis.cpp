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
#include "apmlmc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apmlmc/errors.hpp"
#include "apmlmc/kinetics.hpp"
#include "apmlmc/scheme.hpp"

namespace apmlmc {

namespace {

// e^x - 1 - x
double expm1_minus_x(double x) {
  if (std::abs(x) < 1e-2) {
    double term = x * x / 2.0;
    double sum = term;
    for (int k = 3; k <= 9; ++k) {
      term *= x / k;
      sum += term;
    }
    return sum;
  }
  return std::expm1(x) - x;
}

// log(1 - r) + r
double log1m_plus_r(double r) {
  if (r < 1e-2) {
    double power = r;
    double sum = 0.0;
    for (int k = 2; k <= 10; ++k) {
      power *= r;
      sum -= power / k;
    }
    return sum;
  }
  return std::log1p(-r) + r;
}

// sum_{k=1}^{n-1} (n - k) q^k for q = 1 - r = exp(log_q), real n >= 1:
// q (q^n - n q + n - 1) / (1 - q)^2, with the numerator split as
// (e^{n log q} - 1 - n log q) + n (log q + r).
double weighted_geometric_sum(double log_q, double r, double n) {
  if (r <= 0.0) return n * (n - 1.0) / 2.0;
  const double q = std::exp(log_q);
  const double numer = expm1_minus_x(n * log_q) + n * log1m_plus_r(r);
  return q * numer / (r * r);
}

struct Level {
  double dt;
  double v;       // v_char_dt
  double d;       // diff_coef
  double log_p;   // log p_no_collide
  double p_col;   // p_collide
};

Level level(double epsilon, double v_char, double dt) {
  const ScaledParams s = scaled_params({epsilon, v_char, VelocityDistribution::TwoSpeed}, dt);
  return {dt, s.v_char_dt, s.diff_coef, -std::log1p(dt / (epsilon * epsilon)), s.p_collide};
}

void check_point(const AnalysisPoint& p) {
  if (!std::isfinite(p.epsilon) || p.epsilon <= 0.0) throw InvalidParameter("epsilon: must be > 0");
  if (!std::isfinite(p.v_char) || p.v_char <= 0.0) throw InvalidParameter("v_char: must be > 0");
  if (!std::isfinite(p.dt_fine) || p.dt_fine <= 0.0) throw InvalidParameter("dt_fine: must be > 0");
  if (p.m_factor < 2) throw InvalidParameter("m_factor: must be >= 2");
}

double brownian_total(double eps, double vc, double dt_f, double m, double n) {
  const Level f = level(eps, vc, dt_f);
  const Level c = level(eps, vc, m * dt_f);
  const double diff = std::sqrt(f.d) - std::sqrt(c.d);
  return n * 2.0 * c.dt * diff * diff;
}

// m is real here so the threshold scan can treat the refinement factor as
// continuous.
double transport_total(double eps, double vc, double dt_f, double m, double n) {
  const double eps2 = eps * eps;
  const Level f = level(eps, vc, dt_f);
  const Level c = level(eps, vc, m * dt_f);
  const double log_pfm = m * f.log_p;
  const double pfm = std::exp(log_pfm);
  const double one_minus_pfm = -std::expm1(log_pfm);
  const double pc = std::exp(c.log_p);
  const double vf2 = f.v * f.v;
  const double cvc2 = c.dt * c.dt * c.v * c.v;

  const double per_step = m * dt_f * dt_f * vf2 - cvc2 +
                          2.0 * eps2 * vf2 * (m * dt_f - (eps2 + dt_f) * one_minus_pfm);

  // p^{1-M} + p^{M+1} - 2p = p (p^{-M/2} - p^{M/2})^2
  const double sh = 2.0 * std::sinh(-0.5 * m * f.log_p);
  const double pf = std::exp(f.log_p);
  const double sigma1 = eps2 * vc * vc * pf * sh * sh - cvc2;
  const double inner = (pc - pfm) / one_minus_pfm * (1.0 / f.p_col - m * pfm / one_minus_pfm) +
                       eps2 / dt_f;
  const double sigma2 = cvc2 * (1.0 - dt_f * f.v / (eps2 * c.v) * inner);

  const double cov = sigma1 * weighted_geometric_sum(log_pfm, one_minus_pfm, n) +
                     sigma2 * weighted_geometric_sum(c.log_p, c.p_col, n);
  return n * per_step + 2.0 * cov;
}

}  // namespace

std::int64_t coarse_steps(const AnalysisPoint& point) {
  check_point(point);
  return step_count(point.t_end, point.m_factor * point.dt_fine);
}

double brownian_diff_variance(const AnalysisPoint& point) {
  const auto n = static_cast<double>(coarse_steps(point));
  return brownian_total(point.epsilon, point.v_char, point.dt_fine, point.m_factor, n);
}

double transport_diff_variance(const AnalysisPoint& point) {
  const auto n = static_cast<double>(coarse_steps(point));
  if (n == 0.0) return 0.0;
  return transport_total(point.epsilon, point.v_char, point.dt_fine, point.m_factor, n);
}

double velocity_diff_variance(const AnalysisPoint& point) {
  check_point(point);
  const Level f = level(point.epsilon, point.v_char, point.dt_fine);
  const Level c = level(point.epsilon, point.v_char, point.m_factor * point.dt_fine);
  return f.v * f.v - c.v * c.v;
}

double leading_order_variance(VarianceKind kind, const AnalysisPoint& point) {
  if (!std::isfinite(point.dt_fine) || point.dt_fine < 0.0) {
    throw InvalidParameter("dt_fine: must be >= 0");
  }
  const double eps2 = point.epsilon * point.epsilon;
  const double v2 = point.v_char * point.v_char;
  const double m = point.m_factor;
  switch (kind) {
    case VarianceKind::Brownian: {
      const double root = std::sqrt(m) - 1.0;
      return 2.0 * point.t_end * v2 / eps2 * root * root * point.dt_fine;
    }
    case VarianceKind::Transport: {
      const double s = point.t_end / eps2;
      return 2.0 * v2 * (m - 1.0) * (std::expm1(-s) + s) * point.dt_fine;
    }
    case VarianceKind::Velocity:
      return 2.0 * v2 * (m - 1.0) / (eps2 * eps2) * point.dt_fine;
  }
  return 0.0;
}

double variance_bound(const AnalysisPoint& point, double k_x, double k_v) {
  if (!(k_x >= 0.0) || !(k_v >= 0.0)) throw InvalidParameter("k_x, k_v: must be >= 0");
  const double position = brownian_diff_variance(point) + transport_diff_variance(point);
  const double velocity = velocity_diff_variance(point);
  return k_x * k_x * position + k_v * k_v * velocity +
         2.0 * k_x * k_v * std::sqrt(position * velocity);
}

double single_level_position_variance(double epsilon, double v_char, double dt, double t_end) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidParameter("dt, t_end: must be positive");
  const Level s = level(epsilon, v_char, dt);
  const double n = t_end / dt;
  return n * 2.0 * dt * s.d +
         dt * dt * s.v * s.v * (n + 2.0 * weighted_geometric_sum(s.log_p, s.p_col, n));
}

double coarse_threshold_lhs(double epsilon, double v_char, double t_end, double dt_level1,
                            double m) {
  const double eps2 = epsilon * epsilon;
  const double dt0 = m * dt_level1;
  const double c0 = eps2 / dt0;
  const double c1 = eps2 / dt_level1;
  const double n0 = t_end / dt0;
  const double v0 = single_level_position_variance(epsilon, v_char, dt0, t_end);
  const double v1 = single_level_position_variance(epsilon, v_char, dt_level1, t_end);
  const double vd = brownian_total(epsilon, v_char, dt_level1, m, n0) +
                    transport_total(epsilon, v_char, dt_level1, m, n0);
  return std::sqrt(c0 * v0) + std::sqrt((c0 + c1) * std::max(vd, 0.0)) - std::sqrt(c1 * v1);
}

ThresholdResult coarse_level_threshold(double epsilon, double v_char, double t_end,
                                       double dt_level1) {
  if (!(epsilon > 0.0) || !(v_char > 0.0) || !(dt_level1 > 0.0) || !std::isfinite(t_end)) {
    throw InvalidParameter("threshold: epsilon, v_char and dt_level1 must be > 0");
  }
  ThresholdResult result;
  if (t_end <= dt_level1) return result;
  double lo = 1.5;
  double hi = 64.0;
  double f_lo = coarse_threshold_lhs(epsilon, v_char, t_end, dt_level1, lo);
  const double f_hi = coarse_threshold_lhs(epsilon, v_char, t_end, dt_level1, hi);
  result.lhs_low = f_lo;
  result.lhs_high = f_hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) return result;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = coarse_threshold_lhs(epsilon, v_char, t_end, dt_level1, mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  result.root = 0.5 * (lo + hi);
  return result;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("fit: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidParameter("fit: abscissae must not all coincide");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.residuals.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals.push_back(y[i] - (fit.intercept + fit.slope * x[i]));
  }
  return fit;
}

RateFit fit_convergence_rates(const std::vector<RatePoint>& series, int m_factor) {
  if (series.size() < 3) {
    throw InvalidParameter("series: need at least 3 points, got " + std::to_string(series.size()));
  }
  if (m_factor < 2) throw InvalidParameter("m_factor: must be >= 2");
  std::vector<double> lx;
  std::vector<double> lm;
  std::vector<double> lv;
  for (const RatePoint& p : series) {
    if (!(p.dt > 0.0) || !(p.abs_mean > 0.0) || !(p.variance > 0.0)) {
      throw InvalidParameter("series: dt, |mean| and variance must be > 0");
    }
    lx.push_back(std::log2(p.dt));
    lm.push_back(std::log2(p.abs_mean));
    lv.push_back(std::log2(p.variance));
  }
  const LinearFit a = least_squares(lx, lm);
  const LinearFit b = least_squares(lx, lv);
  return {a.slope, b.slope, std::log2(static_cast<double>(m_factor)), a.residuals, b.residuals};
}

}  // namespace apmlmc
