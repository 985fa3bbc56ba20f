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
#include "apmlmc/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <string>
#include <thread>

#include "apmlmc/coupling.hpp"
#include "apmlmc/errors.hpp"

namespace apmlmc {

QoiKind parse_qoi(std::string_view name) {
  if (name == "x_squared" || name == "x2") return QoiKind::XSquared;
  if (name == "x") return QoiKind::X;
  if (name == "v") return QoiKind::V;
  if (name == "v_squared" || name == "v2") return QoiKind::VSquared;
  throw InvalidParameter("qoi: unknown quantity '" + std::string(name) + "'");
}

std::string_view to_string(QoiKind kind) {
  switch (kind) {
    case QoiKind::XSquared: return "x_squared";
    case QoiKind::X: return "x";
    case QoiKind::V: return "v";
    case QoiKind::VSquared: return "v_squared";
  }
  return "x_squared";
}

double qoi_eval(QoiKind kind, const ParticleState& state) {
  switch (kind) {
    case QoiKind::XSquared: return state.x * state.x;
    case QoiKind::X: return state.x;
    case QoiKind::V: return state.v;
    case QoiKind::VSquared: return state.v * state.v;
  }
  return 0.0;
}

void EstimatorStats::add(double value) {
  ++count;
  const double delta = value - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (value - mean);
}

double EstimatorStats::variance() const {
  return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1);
}

double EstimatorStats::std_error() const {
  return count < 1 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
}

EstimatorStats merge_stats(const EstimatorStats& a, const EstimatorStats& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  EstimatorStats r;
  r.count = a.count + b.count;
  const double na = static_cast<double>(a.count);
  const double nb = static_cast<double>(b.count);
  const double n = static_cast<double>(r.count);
  r.mean = (na * a.mean + nb * b.mean) / n;
  const double delta = b.mean - a.mean;
  r.m2 = a.m2 + b.m2 + delta * delta * (na * nb / n);
  return r;
}

DifferenceStats merge_stats(const DifferenceStats& a, const DifferenceStats& b) {
  return {merge_stats(a.diff, b.diff), merge_stats(a.fine, b.fine),
          merge_stats(a.coarse, b.coarse)};
}

unsigned resolve_threads(unsigned threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

constexpr std::int64_t kChunk = 256;

std::vector<EstimatorStats> tree_merge(const std::vector<std::vector<EstimatorStats>>& chunks,
                                       std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return chunks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<EstimatorStats> left = tree_merge(chunks, lo, mid);
  const std::vector<EstimatorStats> right = tree_merge(chunks, mid, hi);
  for (std::size_t c = 0; c < left.size(); ++c) left[c] = merge_stats(left[c], right[c]);
  return left;
}

}  // namespace

std::vector<EstimatorStats> parallel_stats(const SampleRange& range, std::size_t channels,
                                           const SampleFn& sample, unsigned threads) {
  if (range.count < 0) throw InvalidParameter("samples: must be >= 0");
  if (range.count == 0) return std::vector<EstimatorStats>(channels);
  const std::int64_t n_chunks = (range.count + kChunk - 1) / kChunk;
  std::vector<std::vector<EstimatorStats>> chunks(static_cast<std::size_t>(n_chunks),
                                                  std::vector<EstimatorStats>(channels));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    std::vector<double> values(channels);
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks || failed.load()) return;
      const std::int64_t begin = c * kChunk;
      const std::int64_t end = std::min(range.count, begin + kChunk);
      std::vector<EstimatorStats>& acc = chunks[static_cast<std::size_t>(c)];
      try {
        for (std::int64_t i = begin; i < end; ++i) {
          RandomStream rng(range.seed, range.tag, range.first + static_cast<std::uint64_t>(i));
          sample(rng, values);
          for (std::size_t k = 0; k < channels; ++k) acc[k].add(values[k]);
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::int64_t>(resolve_threads(threads), n_chunks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return tree_merge(chunks, 0, chunks.size());
}

EstimatorStats single_level_estimate(const ModelParams& model, double dt, double t_end,
                                     QoiKind qoi, const SampleRange& range, unsigned threads) {
  validate(model);
  step_count(t_end, dt);
  auto sample = [&](RandomStream& rng, std::span<double> out) {
    out[0] = qoi_eval(qoi, simulate_path(model, dt, t_end, rng).final_state);
  };
  return parallel_stats(range, 1, sample, threads)[0];
}

DifferenceStats difference_estimate(const ModelParams& model, double dt_fine, int m_factor,
                                    double t_end, QoiKind qoi, const SampleRange& range,
                                    unsigned threads) {
  validate(model);
  if (m_factor < 2) throw InvalidParameter("m_factor: must be >= 2");
  step_count(t_end, m_factor * dt_fine);
  auto sample = [&](RandomStream& rng, std::span<double> out) {
    const CoupledOutcome pair = simulate_coupled_pair(model, dt_fine, m_factor, t_end, rng);
    out[1] = qoi_eval(qoi, pair.fine);
    out[2] = qoi_eval(qoi, pair.coarse);
    out[0] = out[1] - out[2];
  };
  const std::vector<EstimatorStats> s = parallel_stats(range, 3, sample, threads);
  return {s[0], s[1], s[2]};
}

}  // namespace apmlmc
