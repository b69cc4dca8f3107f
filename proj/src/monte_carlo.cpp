// Copyright 2026 The Seatrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seatrack/sim/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace seatrack::sim {

MonteCarloSummary run_monte_carlo(
    const SimConfig& base, int runs, std::vector<int> sweep_agents,
    std::vector<int> sweep_targets, unsigned workers,
    const std::function<void(const EpisodeLog&, int, int, int)>& per_run) {
  if (runs < 1) {
    throw std::invalid_argument("run_monte_carlo: runs must be >= 1");
  }
  if (sweep_agents.empty()) sweep_agents = {base.n_agents};
  if (sweep_targets.empty()) sweep_targets = {base.n_castaways};

  struct Job {
    int cell;
    int run;
    SimConfig cfg;
  };
  std::vector<Job> jobs;
  std::vector<std::pair<int, int>> cells;
  for (const int n : sweep_agents) {
    for (const int c : sweep_targets) {
      SimConfig cfg = base;
      cfg.n_agents = n;
      cfg.n_castaways = c;
      if (!cfg.placement.castaway_positions.empty() &&
          static_cast<int>(cfg.placement.castaway_positions.size()) != c) {
        throw std::invalid_argument(
            "run_monte_carlo: explicit castaway positions are incompatible "
            "with a target sweep");
      }
      validate_config(cfg);
      const int cell = static_cast<int>(cells.size());
      cells.emplace_back(n, c);
      for (int r = 0; r < runs; ++r) {
        jobs.push_back({cell, r, cfg});
      }
    }
  }

  // Metrics are stored by (cell, run) so aggregation never depends on which
  // worker finished first.
  std::vector<std::vector<EpisodeMetrics>> metrics(
      cells.size(), std::vector<EpisodeMetrics>(static_cast<std::size_t>(runs)));

  std::atomic<std::size_t> next_job{0};
  std::mutex callback_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker_loop = [&]() {
    for (;;) {
      const std::size_t index = next_job.fetch_add(1);
      if (index >= jobs.size()) return;
      const Job& job = jobs[index];
      try {
        const EpisodeLog log =
            run_episode(job.cfg, base.seed + static_cast<std::uint64_t>(job.run));
        metrics[static_cast<std::size_t>(job.cell)]
               [static_cast<std::size_t>(job.run)] = log.metrics;
        if (per_run) {
          const std::lock_guard<std::mutex> lock(callback_mutex);
          per_run(log, job.cfg.n_agents, job.cfg.n_castaways, job.run);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  unsigned n_workers = workers;
  if (n_workers == 0) {
    n_workers = std::max(1u, std::thread::hardware_concurrency());
  }
  n_workers = std::min<unsigned>(n_workers,
                                 static_cast<unsigned>(jobs.size()));
  if (n_workers <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker_loop);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);

  MonteCarloSummary summary;
  summary.base_seed = base.seed;
  summary.runs_per_cell = runs;
  summary.results.reserve(cells.size());
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    SweepResult result;
    result.n_agents = cells[cell].first;
    result.n_castaways = cells[cell].second;
    result.runs = runs;
    result.min_separation = std::numeric_limits<double>::infinity();
    result.min_altitude = std::numeric_limits<double>::infinity();
    double sep_sum = 0.0;
    for (const auto& m : metrics[cell]) {
      result.mean_avg_trace += m.avg_trace;
      result.mean_rmse += m.avg_rmse;
      result.min_separation = std::min(result.min_separation, m.min_separation);
      result.min_altitude = std::min(result.min_altitude, m.min_altitude);
      sep_sum += m.min_separation;
    }
    result.mean_avg_trace /= runs;
    result.mean_rmse /= runs;
    result.mean_min_separation = sep_sum / runs;
    summary.results.push_back(result);
  }
  return summary;
}

}  // namespace seatrack::sim
