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
#include "apmlmc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string_view>

#include "apmlmc/coupling.hpp"
#include "apmlmc/csv.hpp"
#include "apmlmc/errors.hpp"
#include "apmlmc/mlmc.hpp"
#include "apmlmc/scheme.hpp"

namespace apmlmc {

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<KeySpec> model_keys = {
      {"epsilon", "0.5", "mean free path"},
      {"v_char", "1", "characteristic velocity"},
      {"dist", "two-speed", "unit velocity distribution: two-speed | gaussian"},
  };
  auto with_model = [](std::vector<KeySpec> keys, std::vector<KeySpec> overrides) {
    std::vector<KeySpec> all = model_keys;
    for (KeySpec& k : overrides) {
      auto it = std::find_if(all.begin(), all.end(), [&](const KeySpec& s) { return s.key == k.key; });
      if (it != all.end()) *it = k;
    }
    all.insert(all.end(), keys.begin(), keys.end());
    return all;
  };
  const std::vector<KeySpec> scan_keys = {
      {"t_end", "5", "horizon t*"},
      {"dt", "2.5", "level-0 time step"},
      {"m_factor", "2", "refinement factor M"},
      {"levels", "10", "number of levels in the scan"},
      {"samples", "10000", "samples per level"},
      {"seed", "1", "master seed"},
      {"qoi", "x_squared", "quantity of interest: x_squared | x | v | v_squared"},
      {"k_x", "8", "Lipschitz constant in x for the bound column"},
      {"k_v", "0", "Lipschitz constant in v for the bound column"},
  };
  std::vector<KeySpec> rate_keys = scan_keys;
  for (KeySpec& k : rate_keys) {
    if (k.key == "levels") k.default_value = "12";
  }
  rate_keys.push_back({"tail_ratio", "0.015625", "fit levels with dt <= tail_ratio * epsilon^2"});

  static const std::vector<CommandSpec> specs = {
      {"demo-paths", "coupled fine/coarse trace and variance-vs-time curves",
       with_model({{"dt_fine", "0.2", "fine time step"},
                   {"m_factor", "5", "refinement factor M"},
                   {"t_end", "10", "horizon t*"},
                   {"samples", "1", "pairs; > 1 adds variance columns"},
                   {"seed", "1", "master seed"}},
                  {})},
      {"variance-scan", "means and variances of F and of level differences per time step",
       with_model(scan_keys, {{"epsilon", "1", "mean free path"}})},
      {"mlmc", "adaptive multilevel estimate with per-level report",
       with_model({{"t_end", "0.5", "horizon t*"},
                   {"m_factor", "2", "refinement factor M"},
                   {"strategy", "1", "level strategy: 1|geometric or 2|extra-coarse"},
                   {"rmse", "0.1", "target root mean square error E"},
                   {"samples", "0", "warm-up samples per level; 0 selects the default for E"},
                   {"min_levels", "5", "levels taken before the bias test"},
                   {"max_levels", "16", "maximum number of levels"},
                   {"alpha", "1", "weak-rate exponent for the bias test; 0 fits it"},
                   {"seed", "1", "master seed"},
                   {"qoi", "x_squared", "quantity of interest"}},
                  {{"epsilon", "0.1", "mean free path"}})},
      {"threshold-map", "root in M of the coarse-level benefit inequality over an (epsilon, t*) grid",
       {{"v_char", "1", "characteristic velocity"},
        {"eps_min", "0.01", "smallest epsilon"},
        {"eps_max", "1", "largest epsilon"},
        {"eps_count", "10", "log-spaced epsilon values"},
        {"t_min", "1", "smallest horizon"},
        {"t_max", "100", "largest horizon"},
        {"t_count", "10", "log-spaced horizons"}}},
      {"rates", "fitted decay rates of the level differences in the small time step tail",
       with_model(rate_keys, {{"epsilon", "1", "mean free path"}})},
  };
  return specs;
}

namespace {

// Resolves typed values, recording each in canonical form for the header.
class Resolver {
 public:
  Resolver(const CommandSpec& spec, const RunConfig& config) : spec_(spec), config_(config) {
    header_.emplace_back("command", spec.name);
  }

  std::string text(const std::string& key) {
    std::string value = raw(key);
    header_.emplace_back(key, value);
    return value;
  }
  double number(const std::string& key) {
    const double value = parse_double(key, raw(key));
    header_.emplace_back(key, format_number(value));
    return value;
  }
  std::int64_t integer(const std::string& key) {
    const std::int64_t value = parse_int(key, raw(key));
    header_.emplace_back(key, std::to_string(value));
    return value;
  }
  std::uint64_t u64(const std::string& key) {
    const std::uint64_t value = parse_u64(key, raw(key));
    header_.emplace_back(key, std::to_string(value));
    return value;
  }
  ModelParams model() {
    ModelParams m;
    m.epsilon = number("epsilon");
    m.v_char = number("v_char");
    m.dist = parse_distribution(raw("dist"));
    header_.emplace_back("dist", std::string(to_string(m.dist)));
    validate(m);
    return m;
  }
  unsigned threads() const {
    const auto value = config_.get("threads");
    if (!value) return 0;
    const std::int64_t t = parse_int("threads", *value);
    if (t < 0 || t > 4096) throw InvalidParameter("threads: must be in [0, 4096]");
    return static_cast<unsigned>(t);
  }
  const HeaderEntries& header() const { return header_; }

 private:
  std::string raw(const std::string& key) const {
    if (auto value = config_.get(key)) return *value;
    for (const KeySpec& k : spec_.keys) {
      if (k.key == key) return k.default_value;
    }
    throw ContractViolation("key '" + key + "' is not declared for " + spec_.name);
  }

  const CommandSpec& spec_;
  const RunConfig& config_;
  HeaderEntries header_;
};

int positive_int(std::string_view key, std::int64_t value, std::int64_t max = 1 << 30) {
  if (value < 1 || value > max) {
    throw InvalidParameter(std::string(key) + ": must be in [1, " + std::to_string(max) + "]");
  }
  return static_cast<int>(value);
}

std::vector<double> log_grid(double lo, double hi, std::int64_t count) {
  std::vector<double> grid;
  for (std::int64_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
  }
  return grid;
}

int cmd_demo_paths(Resolver& r, std::ostream& out) {
  const ModelParams model = r.model();
  const double dt_fine = r.number("dt_fine");
  const int m = positive_int("m_factor", r.integer("m_factor"));
  const double t_end = r.number("t_end");
  const std::int64_t samples = positive_int("samples", r.integer("samples"), 1 << 28);
  const std::uint64_t seed = r.u64("seed");
  const unsigned threads = r.threads();
  if (m < 2) throw InvalidParameter("m_factor: must be >= 2");
  const std::int64_t n = step_count(t_end, m * dt_fine);

  const bool curves = samples > 1;
  std::vector<std::string> columns = {"time",     "x_fine",        "v_fine",
                                      "x_coarse", "v_coarse",      "fine_collided",
                                      "coarse_collided"};
  if (curves) columns.insert(columns.end(), {"var_fine", "var_coarse", "var_diff"});
  if (n == 0) {
    write_header(out, r.header());
    write_row(out, columns);
    return kExitOk;
  }

  RandomStream rng(seed, 0, 0);
  CoupledOptions options;
  options.trace = true;
  const CoupledOutcome first = simulate_coupled_pair(model, dt_fine, m, t_end, rng, options);

  std::vector<EstimatorStats> stats;
  if (curves) {
    const std::size_t rows = first.trace.size();
    auto sample = [&](RandomStream& s, std::span<double> values) {
      CoupledOptions o;
      o.trace = true;
      const CoupledOutcome pair = simulate_coupled_pair(model, dt_fine, m, t_end, s, o);
      for (std::size_t k = 0; k < rows; ++k) {
        values[3 * k] = pair.trace[k].x_fine;
        values[3 * k + 1] = pair.trace[k].x_coarse;
        values[3 * k + 2] = pair.trace[k].x_fine - pair.trace[k].x_coarse;
      }
    };
    stats = parallel_stats({seed, 0, 0, samples}, 3 * rows, sample, threads);
  }

  write_header(out, r.header());
  write_row(out, columns);
  for (std::size_t k = 0; k < first.trace.size(); ++k) {
    const CoupledTraceRow& t = first.trace[k];
    std::vector<std::string> cells = {format_number(t.time),     format_number(t.x_fine),
                                      format_number(t.v_fine),   format_number(t.x_coarse),
                                      format_number(t.v_coarse), t.fine_collided ? "1" : "0",
                                      t.coarse_collided ? "1" : "0"};
    if (curves) {
      for (int c = 0; c < 3; ++c) cells.push_back(format_number(stats[3 * k + c].variance()));
    }
    write_row(out, cells);
  }
  return kExitOk;
}

ScanSettings resolve_scan(Resolver& r) {
  ScanSettings s;
  s.model = r.model();
  s.t_end = r.number("t_end");
  s.dt0 = r.number("dt");
  s.m_factor = positive_int("m_factor", r.integer("m_factor"));
  const std::int64_t levels = r.integer("levels");
  if (levels < 1 || levels > 40) throw InvalidParameter("levels: must be in [1, 40]");
  s.levels = static_cast<int>(levels);
  s.samples = r.integer("samples");
  if (s.samples < 2) throw InvalidParameter("samples: must be >= 2");
  s.seed = r.u64("seed");
  s.qoi = parse_qoi(r.text("qoi"));
  s.k_x = r.number("k_x");
  s.k_v = r.number("k_v");
  s.threads = r.threads();
  if (s.m_factor < 2) throw InvalidParameter("m_factor: must be >= 2");
  return s;
}

void write_scan(std::ostream& out, const std::vector<ScanRow>& rows) {
  write_row(out, {"level", "dt", "samples", "mean_fine", "var_fine", "mean_diff", "var_diff",
                  "se_mean_diff", "bound"});
  for (const ScanRow& row : rows) {
    write_row(out, {std::to_string(row.level), format_number(row.dt),
                    std::to_string(row.diff.count), format_number(row.fine.mean),
                    format_number(row.fine.variance()), format_number(row.diff.mean),
                    format_number(row.diff.variance()), format_number(row.diff.std_error()),
                    format_number(row.bound)});
  }
}

int cmd_variance_scan(Resolver& r, std::ostream& out) {
  const ScanSettings settings = resolve_scan(r);
  const std::vector<ScanRow> rows = variance_scan(settings);
  write_header(out, r.header());
  write_scan(out, rows);
  return kExitOk;
}

int cmd_rates(Resolver& r, std::ostream& out) {
  const ScanSettings settings = resolve_scan(r);
  const double tail_ratio = r.number("tail_ratio");
  if (!(tail_ratio > 0.0)) throw InvalidParameter("tail_ratio: must be > 0");
  const std::vector<ScanRow> rows = variance_scan(settings);
  const RateFit fit = fit_scan_tail(rows, settings.model.epsilon, tail_ratio, settings.m_factor);
  auto worst = [](const std::vector<double>& res) {
    double w = 0.0;
    for (double v : res) w = std::max(w, std::abs(v));
    return w;
  };
  write_header(out, r.header());
  write_row(out, {"quantity", "slope", "points", "max_abs_residual_log2"});
  const std::string points = std::to_string(fit.alpha_residuals.size());
  write_row(out, {"alpha", format_number(fit.alpha), points,
                  format_number(worst(fit.alpha_residuals))});
  write_row(out, {"beta", format_number(fit.beta), points, format_number(worst(fit.beta_residuals))});
  write_row(out, {"gamma", format_number(fit.gamma), points, "0"});
  return kExitOk;
}

int cmd_mlmc(Resolver& r, std::ostream& out, std::ostream& log) {
  MlmcConfig config;
  config.model = r.model();
  config.t_end = r.number("t_end");
  config.m_factor = positive_int("m_factor", r.integer("m_factor"));
  config.strategy = parse_strategy(r.text("strategy"));
  config.rmse_target = r.number("rmse");
  config.initial_samples = r.integer("samples");
  config.max_levels = positive_int("max_levels", r.integer("max_levels"), 40);
  config.min_levels = positive_int("min_levels", r.integer("min_levels"), 40);
  if (config.min_levels > config.max_levels) {
    throw InvalidParameter("min_levels: must be <= max_levels");
  }
  config.alpha = r.number("alpha");
  config.seed = r.u64("seed");
  config.qoi = parse_qoi(r.text("qoi"));
  config.threads = r.threads();
  const MlmcReport report = run_mlmc(config);

  HeaderEntries summary = r.header();
  summary.emplace_back("converged", report.converged ? "1" : "0");
  summary.emplace_back("estimate", format_number(report.estimate));
  summary.emplace_back("variance_sum", format_number(report.variance_sum));
  summary.emplace_back("bias_estimate", format_number(report.bias_estimate));
  summary.emplace_back("alpha", format_number(report.alpha));
  summary.emplace_back("multilevel_cost", format_number(report.total_cost));
  summary.emplace_back("classical_cost", format_number(report.classical_cost));
  summary.emplace_back("speedup", format_number(report.speedup));
  write_header(out, summary);
  write_report_csv(out, report);
  write_report_table(log, report);
  if (!report.converged) {
    log << "mlmc: bias not converged within max_levels = " << config.max_levels << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_threshold_map(Resolver& r, std::ostream& out) {
  const double v_char = r.number("v_char");
  const double eps_min = r.number("eps_min");
  const double eps_max = r.number("eps_max");
  const std::int64_t eps_count = positive_int("eps_count", r.integer("eps_count"), 10000);
  const double t_min = r.number("t_min");
  const double t_max = r.number("t_max");
  const std::int64_t t_count = positive_int("t_count", r.integer("t_count"), 10000);
  if (!(eps_min > 0.0) || !(eps_max >= eps_min)) {
    throw InvalidParameter("eps_min, eps_max: need 0 < eps_min <= eps_max");
  }
  if (!(t_min > 0.0) || !(t_max >= t_min)) {
    throw InvalidParameter("t_min, t_max: need 0 < t_min <= t_max");
  }
  if (!(v_char > 0.0)) throw InvalidParameter("v_char: must be > 0");
  write_header(out, r.header());
  write_row(out, {"epsilon", "t_end", "root", "lhs_m6", "lhs_m13", "sign_m6", "sign_m13"});
  auto sign = [](double v) { return v > 0.0 ? "1" : (v < 0.0 ? "-1" : "0"); };
  for (double eps : log_grid(eps_min, eps_max, eps_count)) {
    for (double t : log_grid(t_min, t_max, t_count)) {
      const double dt1 = eps * eps;
      const ThresholdResult res = coarse_level_threshold(eps, v_char, t, dt1);
      const bool defined = t > dt1;
      const double l6 = defined ? coarse_threshold_lhs(eps, v_char, t, dt1, 6.0) : 0.0;
      const double l13 = defined ? coarse_threshold_lhs(eps, v_char, t, dt1, 13.0) : 0.0;
      write_row(out, {format_number(eps), format_number(t),
                      res.root ? format_number(*res.root) : "nan", format_number(l6),
                      format_number(l13), sign(l6), sign(l13)});
    }
  }
  return kExitOk;
}

}  // namespace

std::vector<ScanRow> variance_scan(const ScanSettings& s) {
  validate(s.model);
  if (s.levels < 1) throw InvalidParameter("levels: empty time step grid");
  if (s.m_factor < 2) throw InvalidParameter("m_factor: must be >= 2");
  if (!(s.dt0 > 0.0)) throw InvalidParameter("dt: must be > 0");
  step_count(s.t_end, s.dt0);
  std::vector<ScanRow> rows;
  for (int l = s.first_level; l < s.levels; ++l) {
    ScanRow row;
    row.level = l;
    row.dt = s.dt0 / std::pow(static_cast<double>(s.m_factor), l);
    const SampleRange range{s.seed, static_cast<std::uint32_t>(l), 0, s.samples};
    if (l == 0) {
      row.fine = single_level_estimate(s.model, row.dt, s.t_end, s.qoi, range, s.threads);
      row.diff = row.fine;
    } else {
      const DifferenceStats d =
          difference_estimate(s.model, row.dt, s.m_factor, s.t_end, s.qoi, range, s.threads);
      row.fine = d.fine;
      row.diff = d.diff;
      row.bound = variance_bound({s.model.epsilon, s.model.v_char, row.dt, s.m_factor, s.t_end},
                                 s.k_x, s.k_v);
    }
    rows.push_back(row);
  }
  return rows;
}

RateFit fit_scan_tail(const std::vector<ScanRow>& rows, double epsilon, double tail_ratio,
                      int m_factor) {
  std::vector<RatePoint> tail;
  for (const ScanRow& row : rows) {
    if (row.level >= 1 && row.dt <= tail_ratio * epsilon * epsilon * (1.0 + 1e-12)) {
      tail.push_back({row.dt, std::abs(row.diff.mean), row.diff.variance()});
    }
  }
  return fit_convergence_rates(tail, m_factor);
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& out,
                std::ostream& log) {
  const auto& specs = command_specs();
  const auto it =
      std::find_if(specs.begin(), specs.end(), [&](const CommandSpec& s) { return s.name == name; });
  if (it == specs.end()) {
    log << "error: unknown command '" << name << "'\n";
    return kExitInvalid;
  }
  std::set<std::string> accepted = {"threads", "out_path"};
  for (const KeySpec& k : it->keys) accepted.insert(k.key);
  for (const auto& [key, value] : config.values()) {
    if (!accepted.count(key)) {
      log << "error: key '" << key << "' does not apply to " << name << '\n';
      return kExitInvalid;
    }
  }
  // Output is buffered so a failed run leaves `out` untouched.
  std::ostringstream buffer;
  try {
    Resolver resolver(*it, config);
    int code = kExitOk;
    if (name == "demo-paths") code = cmd_demo_paths(resolver, buffer);
    else if (name == "variance-scan") code = cmd_variance_scan(resolver, buffer);
    else if (name == "rates") code = cmd_rates(resolver, buffer);
    else if (name == "mlmc") code = cmd_mlmc(resolver, buffer, log);
    else code = cmd_threshold_map(resolver, buffer);
    out << buffer.str();
    return code;
  } catch (const InvalidParameter& e) {
    log << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace apmlmc
