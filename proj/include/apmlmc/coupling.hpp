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
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "apmlmc/kinetics.hpp"
#include "apmlmc/random.hpp"
#include "apmlmc/scheme.hpp"

namespace apmlmc {

// (1/sqrt(M)) * sum of the M fine normals.
double couple_xi(std::span<const double> fine_xis);

// (max of the M fine uniforms)^M.
double couple_u(std::span<const double> fine_us);

// Unit velocity for the next coarse step: the fine unit velocity in effect
// at the end of the block if the coarse step collides, else prev_vbar.
double coarse_collision_and_velocity(double coarse_u, const ScaledParams& coarse_params,
                                     double prev_vbar, double last_fine_vbar);

// The M fine steps spanning one coarse step.
struct BlockDraws {
  std::vector<StepDraws> steps;
};

struct CoupledTraceRow {
  double time = 0.0;
  double x_fine = 0.0;
  double v_fine = 0.0;
  double x_coarse = 0.0;  // linear between coarse time points
  double v_coarse = 0.0;  // velocity driving the enclosing coarse step
  bool fine_collided = false;
  bool coarse_collided = false;
};

struct CoupledOptions {
  bool trace = false;
  // Coarse steps simulated before time zero; positions and increment sums are
  // reset afterwards, velocities are kept.
  std::int64_t burn_in_steps = 0;
  // Called once per coarse step, burn-in included.
  std::function<void(const BlockDraws& block, const StepDraws& coarse)> observer;
};

struct CoupledOutcome {
  ParticleState fine;
  ParticleState coarse;
  std::int64_t coarse_steps = 0;
  // Sums of the Brownian increments sqrt(2 dt D) xi and transport increments v dt.
  double brownian_fine = 0.0;
  double brownian_coarse = 0.0;
  double transport_fine = 0.0;
  double transport_coarse = 0.0;
  std::int64_t fine_collisions = 0;
  std::int64_t coarse_collisions = 0;
  // Coarse collisions in a block without any fine collision; always 0.
  std::int64_t dominance_violations = 0;
  std::vector<CoupledTraceRow> trace;  // coarse_steps * M + 1 rows when requested
};

// Fine path at dt_fine and coarse path at m_factor * dt_fine driven by the same
// draws. The fine path consumes the stream exactly as simulate_path does.
CoupledOutcome simulate_coupled_pair(const ModelParams& model, double dt_fine, int m_factor,
                                     double t_end, RandomStream& rng,
                                     const CoupledOptions& options = {});

// Columns: time,x_fine,v_fine,x_coarse,v_coarse,fine_collided,coarse_collided
void write_coupled_trace_csv(std::ostream& out, const std::vector<CoupledTraceRow>& trace);

}  // namespace apmlmc
