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
#include "apmlmc/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apmlmc/csv.hpp"
#include "apmlmc/errors.hpp"

namespace apmlmc {

ParticleState ap_step(const ParticleState& state, const ScaledParams& params,
                      const StepDraws& draws) {
  if (!std::isfinite(draws.xi)) throw ContractViolation("ap_step: xi must be finite");
  if (!(draws.u >= 0.0 && draws.u <= 1.0)) throw ContractViolation("ap_step: u outside [0,1]");
  const bool collided = collides(draws.u, params);
  if (collided && !draws.vbar_new) {
    throw ContractViolation("ap_step: colliding step without a new unit velocity");
  }
  if (!collided && draws.vbar_new) {
    throw ContractViolation("ap_step: new unit velocity on a non-colliding step");
  }
  ParticleState next;
  next.x = state.x + state.v * params.dt +
           std::sqrt(2.0 * params.dt) * std::sqrt(params.diff_coef) * draws.xi;
  next.vbar = collided ? *draws.vbar_new : state.vbar;
  next.v = params.v_char_dt * next.vbar;
  return next;
}

StepDraws draw_step(VelocityDistribution dist, const ScaledParams& params, RandomStream& rng) {
  StepDraws draws;
  draws.xi = rng.normal();
  draws.u = rng.uniform();
  if (collides(draws.u, params)) draws.vbar_new = sample_unit_velocity(dist, rng);
  return draws;
}

ParticleState init_particle(const ModelParams& model, const ScaledParams& params,
                            RandomStream& rng) {
  ParticleState state;
  state.vbar = sample_unit_velocity(model.dist, rng);
  state.v = params.v_char_dt * state.vbar;
  return state;
}

std::int64_t step_count(double t_end, double dt) {
  if (!std::isfinite(t_end) || t_end < 0.0) throw InvalidParameter("t_end: must be finite and >= 0");
  if (!std::isfinite(dt) || dt <= 0.0) throw InvalidParameter("dt: must be finite and > 0");
  const double ratio = t_end / dt;
  if (ratio > 9.0e15) throw InvalidParameter("t_end/dt: too many steps");
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, n)) {
    throw InvalidParameter("t_end/dt = " + format_number(ratio) +
                           " is not an integer step count N (nearest N = " +
                           std::to_string(static_cast<std::int64_t>(n)) + ")");
  }
  return static_cast<std::int64_t>(n);
}

PathResult simulate_path(const ModelParams& model, double dt, double t_end, RandomStream& rng,
                         bool trace) {
  const std::int64_t n = step_count(t_end, dt);
  const ScaledParams params = scaled_params(model, dt);
  PathResult result;
  result.steps = n;
  ParticleState state = init_particle(model, params, rng);
  if (trace) {
    result.trace.reserve(static_cast<std::size_t>(n) + 1);
    result.trace.push_back({0, 0.0, state.x, state.v, false});
  }
  for (std::int64_t k = 0; k < n; ++k) {
    const StepDraws draws = draw_step(model.dist, params, rng);
    state = ap_step(state, params, draws);
    const bool collided = draws.vbar_new.has_value();
    result.collisions += collided ? 1 : 0;
    if (trace) {
      result.trace.push_back({k + 1, static_cast<double>(k + 1) * dt, state.x, state.v, collided});
    }
  }
  result.final_state = state;
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "step_index,time,x,v,collided\n";
  for (const TraceRow& row : trace) {
    out << row.step_index << ',' << format_number(row.time) << ',' << format_number(row.x) << ','
        << format_number(row.v) << ',' << (row.collided ? 1 : 0) << '\n';
  }
}

}  // namespace apmlmc
