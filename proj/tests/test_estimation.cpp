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

#include "seatrack/estimation.hpp"

#include <random>

#include <doctest.h>

#include "oracles.hpp"

using namespace seatrack;

namespace {

kf::FilterParams unit_filter(const Eigen::Vector4d& q_diag = {0.05, 0.05, 0.01,
                                                              0.01}) {
  return kf::FilterParams(1.0, q_diag);
}

kf::TargetEstimate make_estimate(int id, const Eigen::Vector4d& mean,
                                 const Eigen::Matrix4d& cov) {
  kf::TargetEstimate est;
  est.target_id = id;
  est.mean = mean;
  est.covariance = cov;
  return est;
}

}  // namespace

TEST_CASE("filter params build the constant-velocity matrices") {
  const auto params = unit_filter();
  Eigen::Matrix4d expected = Eigen::Matrix4d::Identity();
  expected(0, 2) = 1.0;
  expected(1, 3) = 1.0;
  CHECK(params.transition == expected);
  Eigen::Matrix<double, 2, 4> c = Eigen::Matrix<double, 2, 4>::Zero();
  c(0, 0) = 1.0;
  c(1, 1) = 1.0;
  CHECK(params.observation == c);
  CHECK_THROWS_AS(kf::FilterParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(kf::FilterParams(1.0, Eigen::Vector4d(-1, 0, 0, 0)),
                  std::invalid_argument);
}

TEST_CASE("predict propagates mean and grows covariance") {
  const auto quiet = unit_filter(Eigen::Vector4d::Zero());

  SUBCASE("stationary target with zero process noise keeps its mean") {
    const auto est = make_estimate(0, {3.0, -2.0, 0.0, 0.0},
                                   Eigen::Matrix4d::Identity());
    const auto next = kf::predict<double>(est, quiet);
    CHECK(next.mean == est.mean);
  }

  SUBCASE("identity covariance gives trace 4 + 2*dt^2") {
    const auto est =
        make_estimate(0, Eigen::Vector4d::Zero(), Eigen::Matrix4d::Identity());
    const auto next = kf::predict<double>(est, quiet);
    CHECK(next.covariance.trace() == doctest::Approx(6.0).epsilon(1e-14));
  }

  SUBCASE("positive process noise grows the trace every step") {
    const auto params = unit_filter();
    auto est =
        make_estimate(0, Eigen::Vector4d::Zero(), Eigen::Matrix4d::Identity());
    double previous = est.covariance.trace();
    for (int k = 0; k < 20; ++k) {
      est = kf::predict<double>(est, params);
      CHECK(est.covariance.trace() > previous);
      previous = est.covariance.trace();
    }
  }
}

TEST_CASE("update behaves like the textbook filter") {
  const auto params = unit_filter();

  SUBCASE("zero innovation leaves the mean, still shrinks covariance") {
    const auto est = make_estimate(0, {1.0, 2.0, 0.3, -0.4},
                                   2.0 * Eigen::Matrix4d::Identity());
    const Eigen::Vector2d y = params.observation * est.mean;
    const auto next =
        kf::update<double>(est, y, 0.5 * Eigen::Matrix2d::Identity(), params);
    CHECK(next.mean == est.mean);
    CHECK(next.covariance.trace() < est.covariance.trace());
  }

  SUBCASE("huge measurement noise changes nothing measurable") {
    const auto est = make_estimate(0, {1.0, 2.0, 0.3, -0.4},
                                   Eigen::Matrix4d::Identity());
    const auto next = kf::update<double>(est, Eigen::Vector2d(50.0, -80.0),
                                         1e12 * Eigen::Matrix2d::Identity(),
                                         params);
    CHECK((next.mean - est.mean).norm() < 1e-6);
    CHECK((next.covariance - est.covariance).cwiseAbs().maxCoeff() < 1e-6);
  }

  SUBCASE("posterior trace never exceeds the apriori trace") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const auto est = make_estimate(0, Eigen::Vector4d::Zero(),
                                     oracle::random_psd4(rng, 3.0));
      const auto next = kf::update<double>(est, Eigen::Vector2d(1.0, 1.0),
                                           oracle::random_spd2(rng), params);
      CHECK(next.covariance.trace() <= est.covariance.trace() + 1e-9);
    }
  }

  SUBCASE("singular innovation covariance is reported") {
    auto est = make_estimate(0, Eigen::Vector4d::Zero(),
                             Eigen::Matrix4d::Zero());
    CHECK_THROWS_AS(kf::update<double>(est, Eigen::Vector2d::Zero(),
                                       Eigen::Matrix2d::Zero(), params),
                    std::runtime_error);
  }
}

TEST_CASE("predict/update sequences match the plain-array oracle") {
  const Eigen::Vector4d q_diag(0.05, 0.05, 0.01, 0.01);
  const std::array<double, 4> q{0.05, 0.05, 0.01, 0.01};
  const auto params = unit_filter(q_diag);

  std::mt19937 rng(2025);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  std::uniform_int_distribution<int> op(0, 2);

  for (int sequence = 0; sequence < 1000; ++sequence) {
    auto est = make_estimate(
        0, {uni(rng), uni(rng), uni(rng) / 5.0, uni(rng) / 5.0},
        oracle::random_psd4(rng, 2.0));
    oracle::Kf4 ref;
    for (int i = 0; i < 4; ++i) ref.mean[static_cast<std::size_t>(i)] = est.mean[i];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        ref.cov[static_cast<std::size_t>(r * 4 + c)] = est.covariance(r, c);
      }
    }

    for (int step = 0; step < 12; ++step) {
      switch (op(rng)) {
        case 0: {
          est = kf::predict<double>(est, params);
          oracle::kf_predict(ref, 1.0, q);
          break;
        }
        case 1: {
          const Eigen::Vector2d y(uni(rng), uni(rng));
          const Eigen::Matrix2d noise = oracle::random_spd2(rng);
          est = kf::update<double>(est, y, noise, params);
          oracle::kf_update(ref, y.x(), y.y(), noise(0, 0), noise(0, 1),
                            noise(1, 0), noise(1, 1));
          break;
        }
        default:
          est = kf::update_missed<double>(est);
          break;
      }
    }

    for (int i = 0; i < 4; ++i) {
      CHECK(est.mean[i] ==
            doctest::Approx(ref.mean[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        CHECK(est.covariance(r, c) ==
              doctest::Approx(ref.cov[static_cast<std::size_t>(r * 4 + c)])
                  .epsilon(1e-9)
                  .scale(1.0));
      }
    }
  }
}

TEST_CASE("missed updates are the identity and compose with predict") {
  const auto params = unit_filter();
  auto est = make_estimate(0, {1.0, 1.0, 0.1, 0.2},
                           Eigen::Matrix4d::Identity());
  CHECK(kf::update_missed<double>(est).mean == est.mean);
  CHECK(kf::update_missed<double>(est).covariance == est.covariance);

  // update_missed after predict equals predict exactly.
  const auto predicted = kf::predict<double>(est, params);
  const auto missed = kf::update_missed<double>(predicted);
  CHECK(missed.mean == predicted.mean);
  CHECK(missed.covariance == predicted.covariance);

  SUBCASE("trace grows monotonically over miss cycles") {
    auto current = est;
    double t1 = 0.0;
    current = kf::update_missed<double>(kf::predict<double>(current, params));
    t1 = current.covariance.trace();
    current = kf::update_missed<double>(kf::predict<double>(current, params));
    CHECK(current.covariance.trace() > t1);
  }

  SUBCASE("ten missed cycles equal the closed-form open-loop covariance") {
    auto current = est;
    for (int k = 0; k < 10; ++k) {
      current = kf::update_missed<double>(kf::predict<double>(current, params));
    }
    const Eigen::Matrix4d expected = oracle::open_loop_covariance(
        est.covariance, params.transition, params.process_noise, 10);
    CHECK((current.covariance - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("covariance stays symmetric PSD through long random sequences") {
  const auto params = unit_filter();
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  std::uniform_int_distribution<int> op(0, 2);

  auto est = make_estimate(0, Eigen::Vector4d::Zero(),
                           4.0 * Eigen::Matrix4d::Identity());
  for (int step = 0; step < 1000; ++step) {
    switch (op(rng)) {
      case 0:
        est = kf::predict<double>(est, params);
        break;
      case 1:
        est = kf::update<double>(est, Eigen::Vector2d(uni(rng), uni(rng)),
                                 oracle::random_spd2(rng), params);
        break;
      default:
        est = kf::update_missed<double>(est);
        break;
    }
    CHECK((est.covariance - est.covariance.transpose()).cwiseAbs().maxCoeff() <
          1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eigen(est.covariance);
    CHECK(eigen.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("fusion uses normalized inverse-trace weights") {
  SUBCASE("single estimate is returned unchanged") {
    const auto est = make_estimate(7, {1.0, 2.0, 3.0, 4.0},
                                   2.0 * Eigen::Matrix4d::Identity());
    const std::vector<kf::TargetEstimate> one{est};
    const auto fused = kf::fuse<double>(one);
    CHECK(fused.target_id == 7);
    CHECK(fused.mean == est.mean);
    CHECK(fused.covariance == est.covariance);
  }

  SUBCASE("two identical estimates fuse to themselves") {
    // Consistency under unknown cross-correlations: duplicated information
    // must not manufacture confidence.
    std::mt19937 rng(9);
    const auto est =
        make_estimate(1, {0.5, -0.5, 0.1, 0.0}, oracle::random_psd4(rng));
    const std::vector<kf::TargetEstimate> pair{est, est};
    const auto fused = kf::fuse<double>(pair);
    CHECK((fused.mean - est.mean).norm() < 1e-14);
    CHECK((fused.covariance - est.covariance).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("traces 1 and 3 give weights 0.75 and 0.25") {
    const auto a = make_estimate(0, {1.0, 0.0, 0.0, 0.0},
                                 0.25 * Eigen::Matrix4d::Identity());
    const auto b = make_estimate(0, {0.0, 1.0, 0.0, 0.0},
                                 0.75 * Eigen::Matrix4d::Identity());
    REQUIRE(a.covariance.trace() == doctest::Approx(1.0));
    REQUIRE(b.covariance.trace() == doctest::Approx(3.0));
    const std::vector<kf::TargetEstimate> pair{a, b};
    const auto fused = kf::fuse<double>(pair);
    CHECK(fused.mean[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(fused.mean[1] == doctest::Approx(0.25).epsilon(1e-12));
    const Eigen::Matrix4d expected =
        0.75 * a.covariance + 0.25 * b.covariance;
    CHECK((fused.covariance - expected).cwiseAbs().maxCoeff() < 1e-12);
    // The fused trace lies between the input traces.
    CHECK(fused.covariance.trace() >= a.covariance.trace() - 1e-12);
    CHECK(fused.covariance.trace() <= b.covariance.trace() + 1e-12);
  }

  SUBCASE("zero-trace estimate takes full weight") {
    const auto exact = make_estimate(0, {5.0, 5.0, 0.0, 0.0},
                                     Eigen::Matrix4d::Zero());
    const auto noisy = make_estimate(0, {0.0, 0.0, 0.0, 0.0},
                                     Eigen::Matrix4d::Identity());
    const std::vector<kf::TargetEstimate> pair{exact, noisy};
    const auto fused = kf::fuse<double>(pair);
    CHECK(fused.mean == exact.mean);
    CHECK(fused.covariance == Eigen::Matrix4d::Zero());
  }

  SUBCASE("bad inputs are rejected") {
    CHECK_THROWS_AS(kf::fuse<double>(std::vector<kf::TargetEstimate>{}),
                    std::invalid_argument);
    const auto a = make_estimate(0, Eigen::Vector4d::Zero(),
                                 Eigen::Matrix4d::Identity());
    const auto b = make_estimate(1, Eigen::Vector4d::Zero(),
                                 Eigen::Matrix4d::Identity());
    const std::vector<kf::TargetEstimate> mixed{a, b};
    CHECK_THROWS_AS(kf::fuse<double>(mixed), std::invalid_argument);
  }
}
