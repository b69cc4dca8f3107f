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
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace seatrack::kf {

/// Planar constant-velocity estimate of one target: mean [x, y, vx, vy] and
/// its 4x4 covariance. The covariance is re-symmetrized after every update.
template <class Scalar>
struct TargetEstimateT {
  int target_id = -1;
  Eigen::Matrix<Scalar, 4, 1> mean = Eigen::Matrix<Scalar, 4, 1>::Zero();
  Eigen::Matrix<Scalar, 4, 4> covariance = Eigen::Matrix<Scalar, 4, 4>::Identity();
};

using TargetEstimate = TargetEstimateT<double>;

/// Constant-velocity filter matrices: transition [[I, dt*I], [0, I]],
/// process noise Q, and the observation matrix C = [I2 | 0] selecting (x, y).
template <class Scalar>
struct FilterParamsT {
  Eigen::Matrix<Scalar, 4, 4> transition;
  Eigen::Matrix<Scalar, 4, 4> process_noise;
  Eigen::Matrix<Scalar, 2, 4> observation;

  explicit FilterParamsT(Scalar dt,
                         const Eigen::Matrix<Scalar, 4, 1>& q_diag =
                             Eigen::Matrix<Scalar, 4, 1>(Scalar(0.05), Scalar(0.05),
                                                         Scalar(0.01), Scalar(0.01))) {
    if (!(dt > Scalar(0))) {
      throw std::invalid_argument("filter: dt must be > 0");
    }
    if ((q_diag.array() < Scalar(0)).any()) {
      throw std::invalid_argument("filter: process noise must be PSD");
    }
    transition.setIdentity();
    transition.template topRightCorner<2, 2>() =
        dt * Eigen::Matrix<Scalar, 2, 2>::Identity();
    process_noise = q_diag.asDiagonal();
    observation.setZero();
    observation.template leftCols<2>().setIdentity();
  }
};

using FilterParams = FilterParamsT<double>;

template <class Scalar>
Eigen::Matrix<Scalar, 4, 4> symmetrize(const Eigen::Matrix<Scalar, 4, 4>& m) {
  return ((m + m.transpose()) / Scalar(2)).eval();
}

/// Apriori propagation: mean <- A*mean, P <- A*P*A' + Q.
template <class Scalar>
TargetEstimateT<Scalar> predict(const TargetEstimateT<Scalar>& est,
                                const FilterParamsT<Scalar>& params) {
  TargetEstimateT<Scalar> next = est;
  next.mean = params.transition * est.mean;
  next.covariance = symmetrize<Scalar>(
      params.transition * est.covariance * params.transition.transpose() +
      params.process_noise);
  return next;
}

namespace detail {

template <class Scalar>
struct GainPosterior {
  Eigen::Matrix<Scalar, 4, 2> gain;
  Eigen::Matrix<Scalar, 4, 4> covariance;
};

/// K = P*C'*(C*P*C' + R)^-1 and the posterior P - K*C*P, shared by the
/// measurement update and the planner's covariance-only recursion.
template <class Scalar>
GainPosterior<Scalar> gain_posterior(const Eigen::Matrix<Scalar, 4, 4>& cov,
                                     const Eigen::Matrix<Scalar, 2, 2>& noise,
                                     const FilterParamsT<Scalar>& params) {
  const Eigen::Matrix<Scalar, 2, 4> c = params.observation;
  const Eigen::Matrix<Scalar, 2, 2> innovation =
      c * cov * c.transpose() + noise;
  const Scalar det = innovation.determinant();
  if (!(std::abs(det) > Scalar(0)) || !std::isfinite(det)) {
    throw std::runtime_error("kf update: singular innovation covariance");
  }
  GainPosterior<Scalar> out;
  out.gain = cov * c.transpose() * innovation.inverse();
  out.covariance = symmetrize<Scalar>(cov - out.gain * c * cov);
  return out;
}

}  // namespace detail

/// Measurement update with observation y and noise covariance R.
template <class Scalar>
TargetEstimateT<Scalar> update(const TargetEstimateT<Scalar>& est,
                               const Eigen::Matrix<Scalar, 2, 1>& y,
                               const Eigen::Matrix<Scalar, 2, 2>& noise,
                               const FilterParamsT<Scalar>& params) {
  const auto gp = detail::gain_posterior<Scalar>(est.covariance, noise, params);
  TargetEstimateT<Scalar> next = est;
  next.mean = est.mean + gp.gain * (y - params.observation * est.mean);
  next.covariance = gp.covariance;
  return next;
}

/// Missed observation: the apriori estimate becomes the posterior unchanged.
template <class Scalar>
TargetEstimateT<Scalar> update_missed(const TargetEstimateT<Scalar>& est) {
  return est;
}

/// Covariance-only update, used for pseudomeasurements whose innovation is
/// zero by construction.
template <class Scalar>
Eigen::Matrix<Scalar, 4, 4> posterior_covariance(
    const Eigen::Matrix<Scalar, 4, 4>& cov,
    const Eigen::Matrix<Scalar, 2, 2>& noise,
    const FilterParamsT<Scalar>& params) {
  return detail::gain_posterior<Scalar>(cov, noise, params).covariance;
}

/// Covariance-intersection style fusion of one target's estimates from
/// several agents (input ordered by ascending agent id). Scalar weights are
/// the normalized inverse covariance traces; the fused covariance is the
/// weighted combination sum_i w_i * P_i, which is consistent under unknown
/// cross-correlations (identical inputs fuse to themselves). A zero-trace
/// input takes full weight, ties resolved to the lowest agent index.
template <class Scalar>
TargetEstimateT<Scalar> fuse(std::span<const TargetEstimateT<Scalar>> estimates) {
  if (estimates.empty()) {
    throw std::invalid_argument("fuse: empty estimate list");
  }
  const int id = estimates.front().target_id;
  for (const auto& est : estimates) {
    if (est.target_id != id) {
      throw std::invalid_argument("fuse: mixed target ids");
    }
  }

  const std::size_t n = estimates.size();
  std::vector<Scalar> weights(n, Scalar(0));
  std::size_t degenerate = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(estimates[i].covariance.trace() > Scalar(0))) {
      degenerate = i;
      break;
    }
  }
  if (degenerate < n) {
    weights[degenerate] = Scalar(1);
  } else {
    Scalar total = Scalar(0);
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = Scalar(1) / estimates[i].covariance.trace();
      total += weights[i];
    }
    for (auto& w : weights) w /= total;
  }

  TargetEstimateT<Scalar> fused;
  fused.target_id = id;
  fused.mean.setZero();
  fused.covariance.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    fused.mean += weights[i] * estimates[i].mean;
    fused.covariance += weights[i] * estimates[i].covariance;
  }
  fused.covariance = symmetrize<Scalar>(fused.covariance);
  return fused;
}

}  // namespace seatrack::kf
