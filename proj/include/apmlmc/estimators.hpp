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
#include <span>
#include <string_view>
#include <vector>

#include "apmlmc/kinetics.hpp"
#include "apmlmc/scheme.hpp"

namespace apmlmc {

enum class QoiKind { XSquared, X, V, VSquared };

QoiKind parse_qoi(std::string_view name);
std::string_view to_string(QoiKind kind);

double qoi_eval(QoiKind kind, const ParticleState& state);

// Streaming count / mean / sum of squared deviations.
struct EstimatorStats {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double value);
  // Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;
  // Standard error of the mean.
  double std_error() const;
};

// The mean is combined as a count-weighted average, so merge(a, b) and
// merge(b, a) agree exactly on it.
EstimatorStats merge_stats(const EstimatorStats& a, const EstimatorStats& b);

// Samples [first, first + count) of one (seed, tag) family. Sample i always
// draws from RandomStream(seed, tag, i), whichever worker runs it.
struct SampleRange {
  std::uint64_t seed = 0;
  std::uint32_t tag = 0;
  std::uint64_t first = 0;
  std::int64_t count = 0;
};

// Fills one value per output channel for a single sample.
using SampleFn = std::function<void(RandomStream& rng, std::span<double> out)>;

// Per-channel statistics. Samples are grouped into fixed chunks which are
// merged as a balanced tree in index order, so the result does not depend on
// `threads` (0 selects the hardware concurrency).
std::vector<EstimatorStats> parallel_stats(const SampleRange& range, std::size_t channels,
                                           const SampleFn& sample, unsigned threads = 0);

EstimatorStats single_level_estimate(const ModelParams& model, double dt, double t_end,
                                     QoiKind qoi, const SampleRange& range,
                                     unsigned threads = 0);

struct DifferenceStats {
  EstimatorStats diff;    // F(fine) - F(coarse)
  EstimatorStats fine;    // F(fine)
  EstimatorStats coarse;  // F(coarse)
};

DifferenceStats difference_estimate(const ModelParams& model, double dt_fine, int m_factor,
                                    double t_end, QoiKind qoi, const SampleRange& range,
                                    unsigned threads = 0);

DifferenceStats merge_stats(const DifferenceStats& a, const DifferenceStats& b);

unsigned resolve_threads(unsigned threads);

}  // namespace apmlmc
