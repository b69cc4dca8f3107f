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

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "seatrack/sim/config.hpp"
#include "seatrack/sim/episode.hpp"

namespace seatrack::sim {

/// Aggregate over the runs of one (agents, castaways) sweep cell.
struct SweepResult {
  int n_agents = 0;
  int n_castaways = 0;
  int runs = 0;
  double mean_avg_trace = 0.0;
  double mean_rmse = 0.0;
  double min_separation = 0.0;       ///< minimum over all runs
  double mean_min_separation = 0.0;
  double min_altitude = 0.0;         ///< minimum over all runs
};

struct MonteCarloSummary {
  std::uint64_t base_seed = 0;
  int runs_per_cell = 0;
  std::vector<SweepResult> results;
};

/// Runs `runs` episodes per sweep cell with per-run seeds base_seed + i,
/// distributed over `workers` threads (0 = hardware concurrency). The
/// aggregation is indexed by (cell, run), so the summary is independent of
/// worker scheduling. `per_run`, when set, is invoked serially per finished
/// episode (e.g. to export per-run logs).
MonteCarloSummary run_monte_carlo(
    const SimConfig& base, int runs, std::vector<int> sweep_agents,
    std::vector<int> sweep_targets, unsigned workers = 0,
    const std::function<void(const EpisodeLog&, int n_agents, int c_targets,
                             int run)>& per_run = nullptr);

}  // namespace seatrack::sim
