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

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "seatrack/estimation.hpp"
#include "seatrack/sensing.hpp"
#include "seatrack/vehicle.hpp"

namespace seatrack::planner {

/// Receding-horizon controller configuration. The control lattice lists the
/// admissible per-axis force levels; candidates are all level combinations
/// over the horizon, searched exhaustively with exact constraint evaluation.
struct PlannerConfig {
  int horizon = 3;                ///< K [steps]
  double safety_distance = 2.5;   ///< d_t [m]
  double noise_scale = 2.0;       ///< lambda [m]
  double r_floor = 0.05;          ///< lower clamp of the noise ramp
  std::vector<double> lattice;    ///< force levels per axis [N]; empty = default
  std::int64_t max_candidates = 0;  ///< cap on evaluated candidates, 0 = all
};

/// {-u_max, 0, +u_max} with u_max the largest force obeying the
/// per-axis acceleration bound.
std::vector<double> default_lattice(const veh::VehicleParams& params);

/// Length-K control sequence with the predicted states it induces;
/// states[k+1] = step(states[k], controls[k]) exactly.
struct Plan {
  int agent_id = -1;
  std::vector<veh::ControlInput> controls;
  std::vector<veh::AgentState> states;
  double objective = 0.0;  ///< accumulated covariance trace [m^2 units]
  int created_step = 0;
  bool degraded = false;   ///< no feasible candidate; safest plan returned
};

/// Predicted state of a (possibly stale) plan at an absolute step, holding
/// the final state beyond the plan's horizon.
const veh::AgentState& plan_state_at(const Plan& plan, int abs_step);

/// Per-side footprint membership: four boundary binaries, their sum, and the
/// inclusion bit that activates only when all four hold. Sides are indexed
/// left, right, bottom, top.
struct FovBoundaryCheck {
  std::array<bool, 4> side{};
  int sum = 0;
  bool inside = false;
};

/// Evaluates the four signed boundary comparisons with non-strict
/// inequalities. Agrees with sensing::in_fov on every input.
FovBoundaryCheck fov_binaries(const veh::AgentState& agent,
                              const Eigen::Vector2d& target_xy,
                              const sensing::CameraSpec& camera);

struct PlanningNoise {
  double sigma = 0.0;             ///< lambda * r(z) [m]
  Eigen::Matrix2d covariance;     ///< sigma^2 * I
};

/// Altitude-dependent pseudomeasurement noise: sigma = lambda * r(z) with
/// r a linear ramp between the detection breakpoints, clamped to
/// [r_floor, 1]. Monotone non-decreasing in z.
PlanningNoise planning_noise(double z, const PlannerConfig& cfg,
                             const sensing::DetectionProfile& prof);

/// Everything a rollout needs besides the candidate itself. `step` is the
/// current absolute step; other agents' plans are time-aligned against it.
struct RolloutContext {
  PlannerConfig cfg;
  sensing::CameraSpec camera{30.0 * std::numbers::pi / 180.0,
                             20.0 * std::numbers::pi / 180.0};
  sensing::DetectionProfile detection{};
  kf::FilterParams filter{1.0};
  veh::VehicleParams vehicle{};
  int step = 0;
};

/// Objective of one candidate: the sum over the K horizon steps of every
/// cluster target's posterior covariance trace, propagated with noiseless
/// pseudomeasurements gated by the FoV bits of the whole fleet (others in
/// ascending id order from their shared plans, then this agent).
/// Deterministic; `others` must be ordered by ascending agent id.
double rollout(std::span<const veh::ControlInput> controls,
               const veh::AgentState& own,
               std::span<const kf::TargetEstimate> targets,
               std::span<const Plan> others, const RolloutContext& ctx);

/// True iff every horizon state passes the vehicle limits and keeps at least
/// safety_distance (3-D Euclidean) from every other agent's planned state.
bool feasible(std::span<const veh::AgentState> states,
              std::span<const veh::ControlInput> controls,
              std::span<const Plan> others, const RolloutContext& ctx);

/// Zero-control plan from the given state.
Plan hover_plan(int agent_id, const veh::AgentState& state,
                const RolloutContext& ctx);

/// Exhaustive lattice search over the horizon with per-step pruning.
/// Returns the feasible candidate minimizing the rollout objective, ties
/// broken by smaller total control energy, then lexicographic control
/// order. When no candidate is feasible the safest plan (maximum of the
/// minimum inter-agent distance) is returned with the degraded flag set.
Plan solve(int agent_id, const veh::AgentState& own,
           std::span<const kf::TargetEstimate> cluster,
           std::span<const Plan> others, const RolloutContext& ctx);

}  // namespace seatrack::planner
