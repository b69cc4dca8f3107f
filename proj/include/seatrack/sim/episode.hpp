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
#include <iosfwd>
#include <vector>

#include "seatrack/coordination.hpp"
#include "seatrack/planner.hpp"
#include "seatrack/sensing.hpp"
#include "seatrack/sim/config.hpp"
#include "seatrack/vehicle.hpp"

namespace seatrack::sim {

/// Everything recorded for one executed step: post-drift truths, post-move
/// agent states, the step's measurements, the fused estimates, the cluster
/// assignment, the fresh plans, and the pairwise agent distances.
struct StepRecord {
  int step = 0;
  std::vector<Eigen::Vector3d> truths;
  std::vector<veh::AgentState> agents;
  std::vector<sensing::Measurement> measurements;
  std::vector<kf::TargetEstimate> fused;
  std::vector<int> agent_group;
  std::vector<int> agent_group_size;
  std::vector<planner::Plan> plans;
  std::vector<double> pairwise_distances;  ///< condensed, pairs (i, j), i < j
  double min_separation = 0.0;             ///< +inf for a single agent
};

struct EpisodeMetrics {
  int steps = 0;
  double avg_trace = 0.0;          ///< time average of sum_j tr(P_j)
  std::vector<double> rmse;        ///< planar RMSE per target
  double avg_rmse = 0.0;
  double min_separation = 0.0;     ///< over the whole episode, +inf if N = 1
  double min_altitude = 0.0;
  int state_violations = 0;        ///< logged states failing vehicle limits
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  int n_agents = 0;
  int n_castaways = 0;
  std::vector<Eigen::Vector3d> initial_truths;
  std::vector<veh::AgentState> initial_agents;
  std::vector<StepRecord> steps;
  EpisodeMetrics metrics;
};

/// Runs one episode: per step the truths drift, every agent senses and
/// filters, estimates are fused fleet-wide, targets are clustered and
/// assigned, the sequential planning round runs, and each agent executes
/// the first control of its fresh plan. Bit-reproducible for a fixed seed.
/// `bus_trace`, when set, receives the message-bus JSON trace.
EpisodeLog run_episode(const SimConfig& cfg, std::uint64_t seed,
                       std::ostream* bus_trace = nullptr);

}  // namespace seatrack::sim
