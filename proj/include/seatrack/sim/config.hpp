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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "seatrack/clustering.hpp"
#include "seatrack/estimation.hpp"
#include "seatrack/planner.hpp"
#include "seatrack/sea_world.hpp"
#include "seatrack/sensing.hpp"
#include "seatrack/vehicle.hpp"

namespace seatrack::sim {

/// Initial placement rules: castaways scatter in a disk around the origin
/// (unless explicit positions are given); agents spawn in a disk of
/// `agent_radius` around the castaway centroid at `agent_altitude`, with
/// pairwise separation at least the planner safety distance.
struct PlacementConfig {
  double agent_radius = 10.0;
  double agent_altitude = 50.0;
  double castaway_spread = 15.0;
  std::vector<Eigen::Vector3d> castaway_positions;  ///< optional, overrides spread
  double report_noise_std = 2.0;  ///< std of the initial position reports [m]
};

struct SimConfig {
  std::uint64_t seed = 1;
  int n_agents = 2;
  int n_castaways = 3;
  double duration = 600.0;
  double dt = 1.0;

  std::vector<sea::WaveSource> waves;
  sensing::CameraSpec camera{30.0 * std::numbers::pi / 180.0,
                             20.0 * std::numbers::pi / 180.0};
  sensing::DetectionProfile detection{};
  double zeta = 1.0;

  Eigen::Vector4d process_noise_diag{0.05, 0.05, 0.01, 0.01};
  Eigen::Vector4d initial_cov_diag{4.0, 4.0, 1.0, 1.0};

  cluster::ClusterParams clustering;
  planner::PlannerConfig planner;
  veh::VehicleParams vehicle;
  PlacementConfig placement;

  kf::FilterParams filter() const {
    return kf::FilterParams(dt, process_noise_diag);
  }
  int steps() const;
};

/// Configuration rejected before step 0; `details` carries one message per
/// offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> details);
  const std::vector<std::string>& details() const { return details_; }

 private:
  std::vector<std::string> details_;
};

/// Defaults reproduce the desk-scale scenario: one wave source, 30x20 degree
/// camera, 600 s mission at 1 Hz.
SimConfig default_config();

/// Parses and validates a config document. Unknown keys anywhere are
/// rejected; all violations are reported together.
SimConfig load_config(const nlohmann::json& doc);
SimConfig load_config_file(const std::filesystem::path& path);

/// Full echo of the effective configuration.
nlohmann::json config_to_json(const SimConfig& cfg);

/// Re-checks every module invariant; throws ConfigError on violation.
void validate_config(const SimConfig& cfg);

}  // namespace seatrack::sim
