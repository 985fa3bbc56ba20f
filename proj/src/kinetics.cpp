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

#include <cmath>
#include <limits>
#include <string>

#include "apmlmc/errors.hpp"

namespace apmlmc {

VelocityDistribution parse_distribution(std::string_view name) {
  if (name == "two-speed" || name == "twospeed" || name == "TwoSpeed") {
    return VelocityDistribution::TwoSpeed;
  }
  if (name == "gaussian" || name == "Gaussian") return VelocityDistribution::Gaussian;
  throw InvalidParameter("dist: unknown velocity distribution '" + std::string(name) + "'");
}

std::string_view to_string(VelocityDistribution dist) {
  return dist == VelocityDistribution::TwoSpeed ? "two-speed" : "gaussian";
}

void validate(const ModelParams& model) {
  if (!std::isfinite(model.epsilon) || model.epsilon <= 0.0) {
    throw InvalidParameter("epsilon: must be finite and > 0");
  }
  if (!std::isfinite(model.v_char) || model.v_char <= 0.0) {
    throw InvalidParameter("v_char: must be finite and > 0");
  }
}

ScaledParams scaled_params(const ModelParams& model, double dt) {
  validate(model);
  if (!std::isfinite(dt) || dt < 0.0) throw InvalidParameter("dt: must be finite and >= 0");
  const double eps2 = model.epsilon * model.epsilon;
  const double denom = eps2 + dt;
  ScaledParams p;
  p.dt = dt;
  p.v_char_dt = model.epsilon * model.v_char / denom;
  p.diff_coef = model.v_char * model.v_char * dt / denom;
  p.p_collide = dt / denom;
  p.p_no_collide = 1.0 - p.p_collide;
  return p;
}

double sample_unit_velocity(VelocityDistribution dist, RandomStream& rng) {
  return dist == VelocityDistribution::TwoSpeed ? rng.sign() : rng.normal();
}

bool collision_dominance_holds(double epsilon, double dt_fine, int m_factor) {
  const double eps2 = epsilon * epsilon;
  const double lhs = std::pow(eps2 / (eps2 + dt_fine), m_factor);
  const double rhs = eps2 / (eps2 + m_factor * dt_fine);
  // Equality at M = 1 must survive rounding of the two expressions.
  return lhs <= rhs * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
}

}  // namespace apmlmc
