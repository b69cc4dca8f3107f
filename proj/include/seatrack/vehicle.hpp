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
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace seatrack::veh {

template <class Scalar>
struct AgentStateT {
  Eigen::Matrix<Scalar, 3, 1> position = Eigen::Matrix<Scalar, 3, 1>::Zero();
  Eigen::Matrix<Scalar, 3, 1> velocity = Eigen::Matrix<Scalar, 3, 1>::Zero();
};

using AgentState = AgentStateT<double>;

template <class Scalar>
struct ControlInputT {
  Eigen::Matrix<Scalar, 3, 1> force = Eigen::Matrix<Scalar, 3, 1>::Zero();
};

using ControlInput = ControlInputT<double>;

/// Double-integrator parameters plus the actuation and workspace limits the
/// planner and harness enforce. `step` itself never clamps.
template <class Scalar>
struct VehicleParamsT {
  Scalar mass = Scalar(1.5);    ///< m [kg]
  Scalar drag = Scalar(0.98);   ///< rho in (0, 1]
  Scalar dt = Scalar(1);        ///< sampling interval [s]
  Scalar max_speed_xy = Scalar(12);
  Scalar max_speed_z = Scalar(7);
  Scalar max_accel = Scalar(7);      ///< per-axis bound on gamma*u [m/s^2]
  Scalar min_altitude = Scalar(25);  ///< hard floor [m]
  Eigen::AlignedBox<Scalar, 3> workspace{
      Eigen::Matrix<Scalar, 3, 1>(Scalar(-5000), Scalar(-5000), Scalar(0)),
      Eigen::Matrix<Scalar, 3, 1>(Scalar(5000), Scalar(5000), Scalar(500))};

  /// gamma = dt/m, converts force to per-step velocity change.
  Scalar force_to_accel() const { return dt / mass; }
  /// Largest per-axis force magnitude satisfying the acceleration bound.
  Scalar max_force() const { return max_accel * mass / dt; }

  Eigen::Matrix<Scalar, 6, 6> transition() const {
    Eigen::Matrix<Scalar, 6, 6> a = Eigen::Matrix<Scalar, 6, 6>::Zero();
    a.template topLeftCorner<3, 3>().setIdentity();
    a.template topRightCorner<3, 3>() =
        dt * Eigen::Matrix<Scalar, 3, 3>::Identity();
    a.template bottomRightCorner<3, 3>() =
        drag * Eigen::Matrix<Scalar, 3, 3>::Identity();
    return a;
  }

  Eigen::Matrix<Scalar, 6, 3> input_matrix() const {
    Eigen::Matrix<Scalar, 6, 3> b = Eigen::Matrix<Scalar, 6, 3>::Zero();
    b.template bottomRows<3>() =
        force_to_accel() * Eigen::Matrix<Scalar, 3, 3>::Identity();
    return b;
  }

  void check() const {
    if (!(mass > Scalar(0))) {
      throw std::invalid_argument("vehicle: mass must be > 0");
    }
    if (!(drag > Scalar(0)) || drag > Scalar(1)) {
      throw std::invalid_argument("vehicle: drag must be in (0, 1]");
    }
    if (!(dt > Scalar(0))) {
      throw std::invalid_argument("vehicle: dt must be > 0");
    }
    if (!(max_speed_xy > Scalar(0)) || !(max_speed_z > Scalar(0)) ||
        !(max_accel > Scalar(0))) {
      throw std::invalid_argument("vehicle: limits must be > 0");
    }
    if (workspace.isEmpty()) {
      throw std::invalid_argument("vehicle: empty workspace box");
    }
  }
};

using VehicleParams = VehicleParamsT<double>;

/// One step of x' = A*x + B*u: p += dt*v, v = rho*v + gamma*u. Unclamped;
/// limit handling belongs to validate() and the planner.
template <class Scalar>
AgentStateT<Scalar> step(const AgentStateT<Scalar>& state,
                         const ControlInputT<Scalar>& u,
                         const VehicleParamsT<Scalar>& params) {
  AgentStateT<Scalar> next;
  next.position = state.position + params.dt * state.velocity;
  next.velocity = params.drag * state.velocity + params.force_to_accel() * u.force;
  return next;
}

enum class ViolationKind { kVelocity, kAcceleration, kAltitude, kWorkspace };

template <class Scalar>
struct ViolationT {
  ViolationKind kind;
  int axis;       ///< 0=x, 1=y, 2=z
  Scalar excess;  ///< amount beyond the bound [same unit as the bound]
};

template <class Scalar>
struct ValidationReportT {
  std::vector<ViolationT<Scalar>> violations;
  bool ok() const { return violations.empty(); }
};

using Violation = ViolationT<double>;
using ValidationReport = ValidationReportT<double>;

/// Reports every violated bound; never throws.
template <class Scalar>
ValidationReportT<Scalar> validate(const AgentStateT<Scalar>& state,
                                   const ControlInputT<Scalar>& u,
                                   const VehicleParamsT<Scalar>& params) {
  ValidationReportT<Scalar> report;
  const Scalar speed_limit[3] = {params.max_speed_xy, params.max_speed_xy,
                                 params.max_speed_z};
  for (int axis = 0; axis < 3; ++axis) {
    const Scalar speed = std::abs(state.velocity[axis]);
    if (speed > speed_limit[axis]) {
      report.violations.push_back(
          {ViolationKind::kVelocity, axis, speed - speed_limit[axis]});
    }
  }
  const Scalar gamma = params.force_to_accel();
  for (int axis = 0; axis < 3; ++axis) {
    const Scalar accel = std::abs(gamma * u.force[axis]);
    if (accel > params.max_accel) {
      report.violations.push_back(
          {ViolationKind::kAcceleration, axis, accel - params.max_accel});
    }
  }
  if (state.position.z() < params.min_altitude) {
    report.violations.push_back(
        {ViolationKind::kAltitude, 2, params.min_altitude - state.position.z()});
  }
  for (int axis = 0; axis < 3; ++axis) {
    const Scalar lo = params.workspace.min()[axis];
    const Scalar hi = params.workspace.max()[axis];
    if (state.position[axis] < lo) {
      report.violations.push_back(
          {ViolationKind::kWorkspace, axis, lo - state.position[axis]});
    } else if (state.position[axis] > hi) {
      report.violations.push_back(
          {ViolationKind::kWorkspace, axis, state.position[axis] - hi});
    }
  }
  return report;
}

}  // namespace seatrack::veh
