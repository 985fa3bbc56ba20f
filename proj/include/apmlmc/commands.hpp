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
#include <ostream>
#include <string>
#include <vector>

#include "apmlmc/analysis.hpp"
#include "apmlmc/config.hpp"
#include "apmlmc/estimators.hpp"
#include "apmlmc/kinetics.hpp"

namespace apmlmc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNotConverged = 3;

struct KeySpec {
  std::string key;
  std::string default_value;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;  // threads and out_path are accepted by every command
};

const std::vector<CommandSpec>& command_specs();

// Runs one command, writing CSV to `out` and diagnostics to `log`. Returns
// kExitOk, kExitInvalid (message on `log`) or kExitNotConverged.
int run_command(const std::string& name, const RunConfig& config, std::ostream& out,
                std::ostream& log);

// Level 0 samples F at dt0; level l >= 1 samples coupled pairs at
// dt0 / M^l and dt0 / M^(l-1). Level l uses stream tag l.
struct ScanRow {
  int level = 0;
  double dt = 0.0;
  EstimatorStats fine;
  EstimatorStats diff;  // equals `fine` on level 0
  double bound = 0.0;   // variance_bound of the pair; 0 on level 0
};

struct ScanSettings {
  ModelParams model;
  double t_end = 5.0;
  double dt0 = 2.5;
  int m_factor = 2;
  int levels = 10;
  QoiKind qoi = QoiKind::XSquared;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double k_x = 8.0;
  double k_v = 0.0;
  int first_level = 0;  // levels below this are skipped
};

std::vector<ScanRow> variance_scan(const ScanSettings& settings);

// Difference levels with dt <= tail_ratio * eps^2, fitted in log2 space.
RateFit fit_scan_tail(const std::vector<ScanRow>& rows, double epsilon, double tail_ratio,
                      int m_factor);

}  // namespace apmlmc
