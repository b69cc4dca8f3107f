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

#include "seatrack/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace seatrack::cluster {

namespace {

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

void unite(std::vector<int>& parent, int a, int b) {
  const int ra = find_root(parent, a);
  const int rb = find_root(parent, b);
  if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
}

double heading_difference(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

}  // namespace

std::vector<PredictedPath> predict_paths(
    std::span<const kf::TargetEstimate> estimates,
    const kf::FilterParams& params, int horizon) {
  if (horizon < 1) {
    throw std::invalid_argument("predict_paths: horizon must be >= 1");
  }
  std::vector<PredictedPath> paths;
  paths.reserve(estimates.size());
  for (const auto& est : estimates) {
    PredictedPath path;
    path.target_id = est.target_id;
    path.waypoints.reserve(static_cast<std::size_t>(horizon));
    Eigen::Vector4d mean = est.mean;
    for (int k = 0; k < horizon; ++k) {
      mean = params.transition * mean;
      path.waypoints.emplace_back(mean.head<2>());
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<std::vector<int>> cluster_targets(
    std::span<const PredictedPath> paths, const ClusterParams& params) {
  if (paths.empty()) {
    throw std::invalid_argument("cluster_targets: no targets");
  }

  // Canonical order by target id makes the partition independent of the
  // input permutation.
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return paths[a].target_id < paths[b].target_id;
  });

  const auto n = static_cast<int>(paths.size());
  std::vector<Eigen::Vector2d> endpoint(n);
  std::vector<double> heading(n);
  for (int i = 0; i < n; ++i) {
    const auto& wp = paths[order[i]].waypoints;
    if (wp.empty()) {
      throw std::invalid_argument("cluster_targets: empty predicted path");
    }
    endpoint[i] = wp.back();
    const Eigen::Vector2d disp = wp.back() - wp.front();
    heading[i] = (disp.x() == 0.0 && disp.y() == 0.0)
                     ? 0.0
                     : std::atan2(disp.y(), disp.x());
  }

  // Pairwise split rule: targets part ways only when both the terminal
  // separation and the heading difference exceed their thresholds;
  // everything else merges, and groups are the transitive closure.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double separation = (endpoint[i] - endpoint[j]).norm();
      const double angle = heading_difference(heading[i], heading[j]);
      const bool split =
          separation > params.split_distance && angle > params.angle_threshold;
      if (!split) unite(parent, i, j);
    }
  }

  std::map<int, std::vector<int>> components;
  for (int i = 0; i < n; ++i) {
    components[find_root(parent, i)].push_back(
        paths[order[static_cast<std::size_t>(i)]].target_id);
  }
  std::vector<std::vector<int>> groups;
  groups.reserve(components.size());
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end());
    groups.push_back(std::move(members));
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

std::vector<Eigen::Vector2d> group_centroids(
    const std::vector<std::vector<int>>& groups,
    std::span<const kf::TargetEstimate> estimates) {
  std::map<int, Eigen::Vector2d> position;
  for (const auto& est : estimates) {
    position[est.target_id] = est.mean.head<2>();
  }
  std::vector<Eigen::Vector2d> centroids;
  centroids.reserve(groups.size());
  for (const auto& group : groups) {
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (int id : group) {
      const auto it = position.find(id);
      if (it == position.end()) {
        throw std::invalid_argument("group_centroids: unknown target id " +
                                    std::to_string(id));
      }
      sum += it->second;
    }
    centroids.push_back(sum / static_cast<double>(group.size()));
  }
  return centroids;
}

std::vector<int> assign_agents(std::span<const veh::AgentState> agents,
                               const std::vector<std::vector<int>>& groups,
                               std::span<const Eigen::Vector2d> centroids) {
  if (groups.empty() || centroids.size() != groups.size()) {
    throw std::invalid_argument("assign_agents: need one centroid per group");
  }
  const auto n_groups = static_cast<int>(groups.size());
  std::vector<bool> claimed(groups.size(), false);
  int n_claimed = 0;

  std::vector<int> assignment;
  assignment.reserve(agents.size());
  for (const auto& agent : agents) {
    int pick = -1;
    if (n_claimed < n_groups) {
      double best = std::numeric_limits<double>::infinity();
      for (int g = 0; g < n_groups; ++g) {
        if (claimed[g]) continue;
        const double dist =
            (centroids[g] - agent.position.head<2>()).norm();
        if (dist < best) {
          best = dist;
          pick = g;
        }
      }
      claimed[pick] = true;
      ++n_claimed;
    } else {
      std::size_t best_size = 0;
      for (int g = 0; g < n_groups; ++g) {
        if (groups[g].size() > best_size) {
          best_size = groups[g].size();
          pick = g;
        }
      }
    }
    assignment.push_back(pick);
  }
  return assignment;
}

ClusterAssignment make_assignment(std::span<const kf::TargetEstimate> estimates,
                                  std::span<const veh::AgentState> agents,
                                  const kf::FilterParams& filter,
                                  const ClusterParams& params) {
  ClusterAssignment out;
  const auto paths = predict_paths(estimates, filter, params.horizon);
  out.groups = cluster_targets(paths, params);
  out.centroids = group_centroids(out.groups, estimates);
  out.agent_to_group = assign_agents(agents, out.groups, out.centroids);
  return out;
}

}  // namespace seatrack::cluster
