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

#include <algorithm>
#include <cmath>

#include "apmlmc/csv.hpp"
#include "apmlmc/errors.hpp"

namespace apmlmc {

double couple_xi(std::span<const double> fine_xis) {
  if (fine_xis.empty()) throw ContractViolation("couple_xi: empty block");
  double sum = 0.0;
  for (double xi : fine_xis) sum += xi;
  return sum / std::sqrt(static_cast<double>(fine_xis.size()));
}

double couple_u(std::span<const double> fine_us) {
  if (fine_us.empty()) throw ContractViolation("couple_u: empty block");
  double max_u = 0.0;
  for (double u : fine_us) {
    if (!(u >= 0.0 && u <= 1.0)) throw ContractViolation("couple_u: uniform outside [0,1]");
    max_u = std::max(max_u, u);
  }
  return std::pow(max_u, static_cast<double>(fine_us.size()));
}

double coarse_collision_and_velocity(double coarse_u, const ScaledParams& coarse_params,
                                     double prev_vbar, double last_fine_vbar) {
  return collides(coarse_u, coarse_params) ? last_fine_vbar : prev_vbar;
}

CoupledOutcome simulate_coupled_pair(const ModelParams& model, double dt_fine, int m_factor,
                                     double t_end, RandomStream& rng,
                                     const CoupledOptions& options) {
  if (m_factor < 2) throw InvalidParameter("m_factor: must be >= 2");
  if (options.burn_in_steps < 0) throw InvalidParameter("burn_in_steps: must be >= 0");
  const double dt_coarse = m_factor * dt_fine;
  const std::int64_t n_coarse = step_count(t_end, dt_coarse);
  const ScaledParams fp = scaled_params(model, dt_fine);
  const ScaledParams cp = scaled_params(model, dt_coarse);
  const double fine_diffusion = std::sqrt(2.0 * fp.dt) * std::sqrt(fp.diff_coef);
  const double coarse_diffusion = std::sqrt(2.0 * cp.dt) * std::sqrt(cp.diff_coef);

  CoupledOutcome out;
  out.coarse_steps = n_coarse;
  struct {
    ParticleState fine;
    ParticleState coarse;
  } s;
  s.fine.vbar = sample_unit_velocity(model.dist, rng);
  s.fine.v = fp.v_char_dt * s.fine.vbar;
  s.coarse.vbar = s.fine.vbar;
  s.coarse.v = cp.v_char_dt * s.coarse.vbar;

  BlockDraws block;
  block.steps.resize(static_cast<std::size_t>(m_factor));
  std::vector<double> xis(block.steps.size());
  std::vector<double> us(block.steps.size());
  std::vector<ParticleState> fine_states(block.steps.size());

  std::int64_t recorded = 0;
  auto run_block = [&](bool recording) {
    bool any_fine_collision = false;
    for (int m = 0; m < m_factor; ++m) {
      const auto mi = static_cast<std::size_t>(m);
      StepDraws& d = block.steps[mi];
      d = draw_step(model.dist, fp, rng);
      if (recording) {
        out.brownian_fine += fine_diffusion * d.xi;
        out.transport_fine += s.fine.v * fp.dt;
      }
      s.fine = ap_step(s.fine, fp, d);
      fine_states[mi] = s.fine;
      xis[mi] = d.xi;
      us[mi] = d.u;
      const bool collided = d.vbar_new.has_value();
      any_fine_collision = any_fine_collision || collided;
      if (recording) out.fine_collisions += collided ? 1 : 0;
    }

    StepDraws coarse_draws;
    coarse_draws.xi = couple_xi(xis);
    coarse_draws.u = couple_u(us);
    const bool coarse_collided = collides(coarse_draws.u, cp);
    if (coarse_collided) {
      coarse_draws.vbar_new =
          coarse_collision_and_velocity(coarse_draws.u, cp, s.coarse.vbar, s.fine.vbar);
    }
    if (options.observer) options.observer(block, coarse_draws);

    const ParticleState coarse_before = s.coarse;
    if (recording) {
      out.brownian_coarse += coarse_diffusion * coarse_draws.xi;
      out.transport_coarse += s.coarse.v * cp.dt;
    }
    s.coarse = ap_step(s.coarse, cp, coarse_draws);
    if (coarse_collided && !any_fine_collision) ++out.dominance_violations;
    if (!recording) return;
    out.coarse_collisions += coarse_collided ? 1 : 0;

    if (options.trace) {
      const std::int64_t base = recorded * m_factor;
      for (int m = 0; m < m_factor; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        const bool block_end = m + 1 == m_factor;
        const double w = static_cast<double>(m + 1) / m_factor;
        CoupledTraceRow row;
        row.time = static_cast<double>(base + m + 1) * dt_fine;
        row.x_fine = fine_states[mi].x;
        row.v_fine = fine_states[mi].v;
        row.x_coarse =
            block_end ? s.coarse.x : coarse_before.x + w * (s.coarse.x - coarse_before.x);
        row.v_coarse = block_end ? s.coarse.v : coarse_before.v;
        row.fine_collided = block.steps[mi].vbar_new.has_value();
        row.coarse_collided = block_end && coarse_collided;
        out.trace.push_back(row);
      }
    }
    ++recorded;
  };

  for (std::int64_t n = 0; n < options.burn_in_steps; ++n) run_block(false);
  s.fine.x = 0.0;
  s.coarse.x = 0.0;
  if (options.trace) {
    out.trace.reserve(static_cast<std::size_t>(n_coarse * m_factor + 1));
    out.trace.push_back({0.0, s.fine.x, s.fine.v, s.coarse.x, s.coarse.v, false, false});
  }
  for (std::int64_t n = 0; n < n_coarse; ++n) run_block(true);
  out.fine = s.fine;
  out.coarse = s.coarse;
  return out;
}

void write_coupled_trace_csv(std::ostream& out, const std::vector<CoupledTraceRow>& trace) {
  out << "time,x_fine,v_fine,x_coarse,v_coarse,fine_collided,coarse_collided\n";
  for (const CoupledTraceRow& r : trace) {
    out << format_number(r.time) << ',' << format_number(r.x_fine) << ','
        << format_number(r.v_fine) << ',' << format_number(r.x_coarse) << ','
        << format_number(r.v_coarse) << ',' << (r.fine_collided ? 1 : 0) << ','
        << (r.coarse_collided ? 1 : 0) << '\n';
  }
}

}  // namespace apmlmc
