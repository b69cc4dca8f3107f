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

#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "seatrack/sea_world.hpp"
#include "seatrack/vehicle.hpp"

namespace seatrack::sensing {

/// Downward-pointing camera; the footprint is a rectangle on the sea surface
/// centered at the agent's (x, y).
template <class Scalar>
struct CameraSpecT {
  Scalar horizontal_fov;  ///< theta [rad]
  Scalar vertical_fov;    ///< phi [rad]

  CameraSpecT(Scalar horizontal, Scalar vertical)
      : horizontal_fov(horizontal), vertical_fov(vertical) {
    if (!(horizontal > Scalar(0)) || !(horizontal < std::numbers::pi_v<Scalar>) ||
        !(vertical > Scalar(0)) || !(vertical < std::numbers::pi_v<Scalar>)) {
      throw std::invalid_argument("camera: FoV angles must be in (0, pi)");
    }
  }
};

using CameraSpec = CameraSpecT<double>;

/// Piecewise-linear detection probability of a vision detector as a function
/// of altitude: 1 below alpha1, p_min above alpha2, a continuous linear ramp
/// in between. The slope/intercept are derived from the two breakpoints so
/// the curve cannot jump.
template <class Scalar>
struct DetectionProfileT {
  Scalar alpha1;  ///< altitude of guaranteed detection [m]
  Scalar alpha2;  ///< altitude where p bottoms out [m]
  Scalar beta1;   ///< ramp slope [1/m]
  Scalar beta2;   ///< ramp intercept
  Scalar p_min;   ///< floor probability

  DetectionProfileT(Scalar a1 = Scalar(30), Scalar a2 = Scalar(100),
                    Scalar floor = Scalar(0.25))
      : alpha1(a1), alpha2(a2), p_min(floor) {
    if (!(alpha1 > Scalar(0)) || !(alpha2 > alpha1)) {
      throw std::invalid_argument("detection: need 0 < alpha1 < alpha2");
    }
    if (!(p_min > Scalar(0)) || p_min > Scalar(1)) {
      throw std::invalid_argument("detection: need p_min in (0, 1]");
    }
    beta1 = (p_min - Scalar(1)) / (alpha2 - alpha1);
    beta2 = Scalar(1) - beta1 * alpha1;
  }
};

using DetectionProfile = DetectionProfileT<double>;

template <class Scalar>
struct MeasurementT {
  int agent_id = 0;
  int target_id = 0;
  Eigen::Matrix<Scalar, 2, 1> value = Eigen::Matrix<Scalar, 2, 1>::Zero();
  int step = 0;
};

using Measurement = MeasurementT<double>;

template <class Scalar>
struct FovExtentsT {
  Scalar horizontal;  ///< l_h [m]
  Scalar vertical;    ///< l_v [m]
};

/// Footprint side lengths at altitude z: l_h = 2z*tan(theta/2),
/// l_v = 2z*tan(phi/2).
template <class Scalar>
FovExtentsT<Scalar> fov_extents(Scalar z, const CameraSpecT<Scalar>& camera) {
  if (z < Scalar(0)) {
    throw std::invalid_argument("fov_extents: altitude must be >= 0");
  }
  return {Scalar(2) * z * std::tan(camera.horizontal_fov / Scalar(2)),
          Scalar(2) * z * std::tan(camera.vertical_fov / Scalar(2))};
}

/// Exact piecewise evaluation of the detection probability at altitude z.
template <class Scalar>
Scalar detection_probability(Scalar z, const DetectionProfileT<Scalar>& prof) {
  if (z <= prof.alpha1) return Scalar(1);
  if (z >= prof.alpha2) return prof.p_min;
  return prof.beta1 * z + prof.beta2;
}

/// Point-in-footprint test with closed boundaries (<=).
template <class Scalar, class Derived>
bool in_fov(const veh::AgentStateT<Scalar>& agent,
            const Eigen::MatrixBase<Derived>& target_xy,
            const CameraSpecT<Scalar>& camera) {
  const auto ext = fov_extents(agent.position.z(), camera);
  return std::abs(target_xy[0] - agent.position.x()) <= ext.horizontal / Scalar(2) &&
         std::abs(target_xy[1] - agent.position.y()) <= ext.vertical / Scalar(2);
}

/// Generates the measurement set for one agent at one step. Each in-FoV
/// target independently emits with probability p(z); an emitted measurement
/// is the target's (x, y) plus isotropic Gaussian noise with per-axis
/// standard deviation zeta/p. Targets outside the FoV never emit. The rng
/// stream must be owned by this agent (reproducibility contract).
template <class Scalar, class URBG>
std::vector<MeasurementT<Scalar>> sense(
    int agent_id, const veh::AgentStateT<Scalar>& agent,
    std::span<const sea::CastawayTruthT<Scalar>> truths,
    const CameraSpecT<Scalar>& camera, const DetectionProfileT<Scalar>& prof,
    Scalar zeta, URBG& rng, int step) {
  if (!(zeta > Scalar(0))) {
    throw std::invalid_argument("sense: zeta must be > 0");
  }
  const Scalar p = detection_probability(agent.position.z(), prof);
  const Scalar noise_std = zeta / p;
  std::uniform_real_distribution<Scalar> coin(Scalar(0), Scalar(1));
  std::vector<MeasurementT<Scalar>> out;
  for (const auto& truth : truths) {
    if (!in_fov(agent, truth.position.template head<2>(), camera)) continue;
    if (coin(rng) >= p) continue;
    std::normal_distribution<Scalar> noise(Scalar(0), noise_std);
    MeasurementT<Scalar> m;
    m.agent_id = agent_id;
    m.target_id = truth.id;
    const Scalar nx = noise(rng);
    const Scalar ny = noise(rng);
    m.value = truth.position.template head<2>() +
              Eigen::Matrix<Scalar, 2, 1>(nx, ny);
    m.step = step;
    out.push_back(m);
  }
  return out;
}

}  // namespace seatrack::sensing
