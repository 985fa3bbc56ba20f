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

#include <string_view>

#include "apmlmc/random.hpp"

namespace apmlmc {

// Shape of the unit-variance equilibrium B(vbar).
enum class VelocityDistribution { TwoSpeed, Gaussian };

VelocityDistribution parse_distribution(std::string_view name);
std::string_view to_string(VelocityDistribution dist);

// Diffusively scaled kinetic model: mean free path epsilon and the
// characteristic velocity of the equilibrium M(v) = B(v / v_char) / v_char.
struct ModelParams {
  double epsilon = 1.0;
  double v_char = 1.0;
  VelocityDistribution dist = VelocityDistribution::TwoSpeed;
};

// Throws InvalidParameter unless epsilon and v_char are finite and positive.
void validate(const ModelParams& model);

// Time-step dependent coefficients of the asymptotic-preserving scheme.
struct ScaledParams {
  double dt = 0.0;
  double v_char_dt = 0.0;     // epsilon * v / (epsilon^2 + dt)
  double diff_coef = 0.0;     // v^2 dt / (epsilon^2 + dt)
  double p_collide = 0.0;     // dt / (epsilon^2 + dt)
  double p_no_collide = 1.0;  // epsilon^2 / (epsilon^2 + dt)
};

// dt == 0 yields the zero-step limit (v/epsilon, 0, 0, 1).
ScaledParams scaled_params(const ModelParams& model, double dt);

double sample_unit_velocity(VelocityDistribution dist, RandomStream& rng);

// (eps^2/(eps^2+dt))^M <= eps^2/(eps^2+M dt): a fine block without collisions
// can never produce a coarse collision under the max-uniform coupling.
bool collision_dominance_holds(double epsilon, double dt_fine, int m_factor);

}  // namespace apmlmc
