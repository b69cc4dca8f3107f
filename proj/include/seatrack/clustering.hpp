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

#include <numbers>
#include <span>
#include <vector>

#include "seatrack/estimation.hpp"
#include "seatrack/vehicle.hpp"

namespace seatrack::cluster {

struct ClusterParams {
  double split_distance = 40.0;                        ///< d_g [m]
  double angle_threshold = std::numbers::pi / 6.0;     ///< theta_g [rad]
  int horizon = 3;                                     ///< prediction steps K
};

/// Open-loop mean prediction of one target over the clustering horizon;
/// waypoints hold the (x, y) means at steps 1..K.
struct PredictedPath {
  int target_id = -1;
  std::vector<Eigen::Vector2d> waypoints;
};

std::vector<PredictedPath> predict_paths(
    std::span<const kf::TargetEstimate> estimates,
    const kf::FilterParams& params, int horizon);

/// Deterministic partition of target ids. Two targets stay together unless
/// their end-of-horizon separation exceeds split_distance AND their travel
/// headings differ by more than angle_threshold; groups are the transitive
/// closure of that relation, listed by ascending lowest member id.
std::vector<std::vector<int>> cluster_targets(
    std::span<const PredictedPath> paths, const ClusterParams& params);

/// Planar centroid of each group's current estimated positions.
std::vector<Eigen::Vector2d> group_centroids(
    const std::vector<std::vector<int>>& groups,
    std::span<const kf::TargetEstimate> estimates);

/// Greedy assignment in ascending agent order: nearest unclaimed centroid
/// first; once every group is claimed, remaining agents join the largest
/// group (ties to the lowest group id).
std::vector<int> assign_agents(std::span<const veh::AgentState> agents,
                               const std::vector<std::vector<int>>& groups,
                               std::span<const Eigen::Vector2d> centroids);

struct ClusterAssignment {
  std::vector<std::vector<int>> groups;
  std::vector<Eigen::Vector2d> centroids;
  std::vector<int> agent_to_group;
};

ClusterAssignment make_assignment(std::span<const kf::TargetEstimate> estimates,
                                  std::span<const veh::AgentState> agents,
                                  const kf::FilterParams& filter,
                                  const ClusterParams& params);

}  // namespace seatrack::cluster
