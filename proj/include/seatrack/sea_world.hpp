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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seatrack::sea {

/// Parameters of a single regular wave field driving surface drift.
///
/// The dispersion quantities (wave number, depth factor, period, frequency)
/// are derived once at construction from the finite-depth relation
/// T = sqrt(2*pi*L / (g * tanh(q*D))), so omega^2 == g*q*tanh(q*D) holds by
/// construction.
template <class Scalar>
struct WaveSourceT {
  using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

  Vector2 origin;
  Scalar wavelength;   ///< L [m]
  Scalar wave_height;  ///< h [m]
  Scalar decay_rate;   ///< w [1/m], amplitude envelope exp(-w*d)
  Scalar water_depth;  ///< D [m]
  Scalar gravity;      ///< g [m/s^2]

  // Derived at construction.
  Scalar wave_number;   ///< q = 2*pi/L [1/m]
  Scalar depth_factor;  ///< Z = tanh(q*D)
  Scalar period;        ///< T [s]
  Scalar frequency;     ///< omega = 2*pi/T [rad/s]

  /// Validates the small-amplitude and finite-depth assumptions and derives
  /// the dispersion quantities. `max_steepness` bounds q*h; for very deep
  /// water tanh(q*D) rounds to 1.0 in double precision, which is accepted
  /// (the condition Z < 1 holds mathematically for any finite depth).
  WaveSourceT(const Vector2& origin_, Scalar wavelength_, Scalar wave_height_,
              Scalar decay_rate_, Scalar water_depth_,
              Scalar gravity_ = Scalar(9.81), Scalar max_steepness = Scalar(0.2))
      : origin(origin_),
        wavelength(wavelength_),
        wave_height(wave_height_),
        decay_rate(decay_rate_),
        water_depth(water_depth_),
        gravity(gravity_) {
    if (!(wavelength > Scalar(0))) {
      throw std::invalid_argument("wave source: wavelength must be > 0");
    }
    if (!(wave_height > Scalar(0))) {
      throw std::invalid_argument("wave source: wave_height must be > 0");
    }
    if (!(water_depth > Scalar(0))) {
      throw std::invalid_argument("wave source: water_depth must be > 0");
    }
    if (!(gravity > Scalar(0))) {
      throw std::invalid_argument("wave source: gravity must be > 0");
    }
    if (decay_rate < Scalar(0)) {
      throw std::invalid_argument("wave source: decay_rate must be >= 0");
    }
    wave_number = Scalar(2) * std::numbers::pi_v<Scalar> / wavelength;
    if (!(wave_number * wave_height < max_steepness)) {
      throw std::invalid_argument(
          "wave source: steepness q*h = " +
          std::to_string(wave_number * wave_height) + " exceeds limit " +
          std::to_string(max_steepness));
    }
    depth_factor = std::tanh(wave_number * water_depth);
    if (!(depth_factor <= Scalar(1))) {
      throw std::invalid_argument("wave source: depth factor tanh(qD) > 1");
    }
    period = std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar> * wavelength /
                       (gravity * depth_factor));
    frequency = Scalar(2) * std::numbers::pi_v<Scalar> / period;
  }
};

using WaveSource = WaveSourceT<double>;

/// Ground-truth drifting target. The id stays fixed for the episode; the
/// z coordinate oscillates near the sea surface.
template <class Scalar>
struct CastawayTruthT {
  int id = 0;
  Eigen::Matrix<Scalar, 3, 1> position = Eigen::Matrix<Scalar, 3, 1>::Zero();
};

using CastawayTruth = CastawayTruthT<double>;

namespace detail {

template <class Scalar, class Derived>
Scalar planar_distance(const WaveSourceT<Scalar>& wave,
                       const Eigen::MatrixBase<Derived>& position) {
  static_assert(Derived::RowsAtCompileTime >= 2 ||
                    Derived::RowsAtCompileTime == Eigen::Dynamic,
                "position needs at least x and y components");
  const Scalar dx = position[0] - wave.origin[0];
  const Scalar dy = position[1] - wave.origin[1];
  return std::hypot(dx, dy);
}

}  // namespace detail

/// Water velocity experienced by a particle at `position` and time `tau`:
/// v = (omega*h/2) * exp(-w*d) * sin(q*d - omega*tau), d the planar distance
/// to the wave origin. Bounded by omega*h/2 for all inputs.
template <class Scalar, class Derived>
Scalar water_velocity(const WaveSourceT<Scalar>& wave,
                      const Eigen::MatrixBase<Derived>& position, Scalar tau) {
  const Scalar dist = detail::planar_distance(wave, position);
  return Scalar(0.5) * wave.frequency * wave.wave_height *
         std::exp(-wave.decay_rate * dist) *
         std::sin(wave.wave_number * dist - wave.frequency * tau);
}

/// Single-source displacement over one step of length `dt`. The drift
/// direction is radial from the wave origin; a particle exactly at the
/// origin uses angle 0 by convention.
template <class Scalar, class Derived>
Eigen::Matrix<Scalar, 3, 1> drift_displacement(
    const WaveSourceT<Scalar>& wave, const Eigen::MatrixBase<Derived>& position,
    Scalar tau, Scalar dt) {
  const Scalar v = water_velocity(wave, position, tau);
  const Scalar dx = position[0] - wave.origin[0];
  const Scalar dy = position[1] - wave.origin[1];
  const Scalar phi =
      (dx == Scalar(0) && dy == Scalar(0)) ? Scalar(0) : std::atan2(dy, dx);
  Eigen::Matrix<Scalar, 3, 1> step;
  step << std::cos(phi), std::sin(phi), Scalar(1);
  return v * step * dt;
}

/// Advances one castaway under a single wave source.
template <class Scalar>
CastawayTruthT<Scalar> drift_step(const WaveSourceT<Scalar>& wave,
                                  const CastawayTruthT<Scalar>& castaway,
                                  Scalar tau, Scalar dt) {
  if (!(dt > Scalar(0))) {
    throw std::invalid_argument("drift_step: dt must be > 0");
  }
  CastawayTruthT<Scalar> next = castaway;
  next.position += drift_displacement(wave, castaway.position, tau, dt);
  return next;
}

/// Dense time-indexed trajectory table; positions[step][castaway], with
/// step 0 holding the initial positions.
template <class Scalar>
struct TruthTableT {
  Scalar dt = Scalar(1);
  std::vector<std::vector<Eigen::Matrix<Scalar, 3, 1>>> positions;

  int steps() const { return static_cast<int>(positions.size()) - 1; }
  int castaways() const {
    return positions.empty() ? 0 : static_cast<int>(positions.front().size());
  }
};

using TruthTable = TruthTableT<double>;

/// Generates ground-truth trajectories for all castaways under linear
/// superposition of the per-source displacements. Pure function of its
/// arguments; an empty source list leaves every castaway stationary.
template <class Scalar>
TruthTableT<Scalar> generate_truth(
    std::span<const WaveSourceT<Scalar>> waves,
    std::span<const Eigen::Matrix<Scalar, 3, 1>> initial_positions,
    Scalar duration, Scalar dt) {
  if (initial_positions.empty()) {
    throw std::invalid_argument("generate_truth: need at least one castaway");
  }
  if (!(dt > Scalar(0)) || !(duration >= Scalar(0))) {
    throw std::invalid_argument("generate_truth: need dt > 0, duration >= 0");
  }
  const Scalar ratio = duration / dt;
  const auto steps = static_cast<long>(std::llround(ratio));
  if (std::abs(ratio - Scalar(steps)) > Scalar(1e-9)) {
    throw std::invalid_argument("generate_truth: duration must be an integral "
                                "number of steps");
  }

  TruthTableT<Scalar> table;
  table.dt = dt;
  table.positions.reserve(static_cast<std::size_t>(steps) + 1);
  table.positions.emplace_back(initial_positions.begin(),
                               initial_positions.end());
  for (long s = 0; s < steps; ++s) {
    const Scalar tau = Scalar(s) * dt;
    const auto& current = table.positions.back();
    std::vector<Eigen::Matrix<Scalar, 3, 1>> next;
    next.reserve(current.size());
    for (const auto& pos : current) {
      Eigen::Matrix<Scalar, 3, 1> delta = Eigen::Matrix<Scalar, 3, 1>::Zero();
      for (const auto& wave : waves) {
        delta += drift_displacement(wave, pos, tau, dt);
      }
      next.push_back(pos + delta);
    }
    table.positions.push_back(std::move(next));
  }
  return table;
}

}  // namespace seatrack::sea
