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
#include <ostream>
#include <vector>

#include "apmlmc/kinetics.hpp"
#include "apmlmc/random.hpp"

namespace apmlmc {

// vbar is authoritative; v == v_char_dt * vbar for the level's ScaledParams.
struct ParticleState {
  double x = 0.0;
  double v = 0.0;
  double vbar = 0.0;
};

// Random inputs of one time step. vbar_new is present iff u >= p_no_collide.
struct StepDraws {
  double xi = 0.0;
  double u = 0.0;
  std::optional<double> vbar_new;
};

// Ties (u == p_no_collide) collide.
inline bool collides(double u, const ScaledParams& params) { return u >= params.p_no_collide; }

// Transport-diffusion with the current velocity, then the collision test;
// a new velocity takes effect from the next step on.
ParticleState ap_step(const ParticleState& state, const ScaledParams& params,
                      const StepDraws& draws);

// Consumes xi, u and, only on a collision, one unit velocity, in that order.
StepDraws draw_step(VelocityDistribution dist, const ScaledParams& params, RandomStream& rng);

// x = 0 with an equilibrium unit velocity.
ParticleState init_particle(const ModelParams& model, const ScaledParams& params,
                            RandomStream& rng);

// Number of steps of size dt spanning t_end; throws InvalidParameter unless
// t_end / dt is an integer to within 1e-9 relative.
std::int64_t step_count(double t_end, double dt);

struct TraceRow {
  std::int64_t step_index = 0;
  double time = 0.0;
  double x = 0.0;
  double v = 0.0;
  bool collided = false;
};

struct PathResult {
  ParticleState final_state;
  std::int64_t steps = 0;
  std::int64_t collisions = 0;
  std::vector<TraceRow> trace;  // steps + 1 rows when requested, else empty
};

PathResult simulate_path(const ModelParams& model, double dt, double t_end, RandomStream& rng,
                         bool trace = false);

// Columns: step_index,time,x,v,collided
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace apmlmc
