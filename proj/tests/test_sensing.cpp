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

#include "seatrack/sensing.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "oracles.hpp"

using namespace seatrack;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

sensing::CameraSpec paper_camera() { return {30.0 * kDeg, 20.0 * kDeg}; }

veh::AgentState agent_at(double x, double y, double z) {
  veh::AgentState state;
  state.position = Eigen::Vector3d(x, y, z);
  return state;
}

}  // namespace

TEST_CASE("fov extents scale linearly with altitude") {
  const auto cam = paper_camera();
  const auto at_zero = sensing::fov_extents(0.0, cam);
  CHECK(at_zero.horizontal == 0.0);
  CHECK(at_zero.vertical == 0.0);

  const auto at_100 = sensing::fov_extents(100.0, cam);
  CHECK(std::abs(at_100.horizontal - 200.0 * std::tan(15.0 * kDeg)) < 1e-12);
  CHECK(std::abs(at_100.vertical - 200.0 * std::tan(10.0 * kDeg)) < 1e-12);
  CHECK(at_100.horizontal == doctest::Approx(53.58983848622454).epsilon(1e-14));
  CHECK(at_100.vertical == doctest::Approx(35.265396141692996).epsilon(1e-14));

  const auto at_200 = sensing::fov_extents(200.0, cam);
  CHECK(at_200.horizontal == 2.0 * at_100.horizontal);
  CHECK(at_200.vertical == 2.0 * at_100.vertical);

  CHECK_THROWS_AS(sensing::fov_extents(-1.0, cam), std::invalid_argument);
  CHECK_THROWS_AS(sensing::CameraSpec(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sensing::CameraSpec(0.5, 3.2), std::invalid_argument);
}

TEST_CASE("detection probability follows the piecewise definition") {
  const sensing::DetectionProfile prof;  // 30, 100, 0.25
  CHECK(prof.beta1 == doctest::Approx(-0.75 / 70.0).epsilon(1e-15));
  CHECK(prof.beta1 * prof.alpha1 + prof.beta2 == doctest::Approx(1.0));
  CHECK(prof.beta1 * prof.alpha2 + prof.beta2 == doctest::Approx(0.25));

  CHECK(sensing::detection_probability(15.0, prof) == 1.0);
  CHECK(sensing::detection_probability(200.0, prof) == 0.25);
  CHECK(sensing::detection_probability(65.0, prof) ==
        doctest::Approx(0.625).epsilon(1e-12));

  // Continuity at the breakpoints and monotone non-increasing overall.
  CHECK(sensing::detection_probability(30.0 + 1e-9, prof) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sensing::detection_probability(100.0 - 1e-9, prof) ==
        doctest::Approx(0.25).epsilon(1e-6));
  double previous = 1.0;
  for (double z = 0.0; z <= 300.0; z += 0.25) {
    const double p = sensing::detection_probability(z, prof);
    CHECK(p <= previous + 1e-15);
    CHECK(p >= prof.p_min);
    CHECK(p <= 1.0);
    previous = p;
  }

  CHECK_THROWS_AS(sensing::DetectionProfile(100.0, 30.0, 0.25),
                  std::invalid_argument);
  CHECK_THROWS_AS(sensing::DetectionProfile(30.0, 100.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("in_fov uses closed boundaries and matches the rectangle oracle") {
  const auto cam = paper_camera();
  const auto agent = agent_at(10.0, -4.0, 80.0);
  CHECK(sensing::in_fov(agent, Eigen::Vector2d(10.0, -4.0), cam));

  const auto ext = sensing::fov_extents(80.0, cam);
  CHECK(sensing::in_fov(agent, Eigen::Vector2d(10.0 + ext.horizontal / 2.0, -4.0),
                        cam));
  CHECK(sensing::in_fov(agent, Eigen::Vector2d(10.0, -4.0 + ext.vertical / 2.0),
                        cam));
  CHECK_FALSE(sensing::in_fov(
      agent, Eigen::Vector2d(10.0 + ext.horizontal / 2.0 + 1e-9, -4.0), cam));

  std::mt19937 rng(41);
  std::uniform_real_distribution<double> coord(-60.0, 60.0);
  std::uniform_real_distribution<double> alt(0.0, 150.0);
  for (int i = 0; i < 10000; ++i) {
    const auto a = agent_at(coord(rng), coord(rng), alt(rng));
    const Eigen::Vector2d target(coord(rng), coord(rng));
    CHECK(sensing::in_fov(a, target, cam) ==
          oracle::in_rectangle(a.position.x(), a.position.y(), a.position.z(),
                               cam.horizontal_fov, cam.vertical_fov, target.x(),
                               target.y()));
  }
}

TEST_CASE("footprints nest with altitude") {
  const auto cam = paper_camera();
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> coord(-30.0, 30.0);
  std::uniform_real_distribution<double> alt(10.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = alt(rng);
    const auto low = agent_at(coord(rng), coord(rng), z);
    const Eigen::Vector2d target(coord(rng), coord(rng));
    if (sensing::in_fov(low, target, cam)) {
      auto high = low;
      high.position.z() = z * 1.5 + 5.0;
      CHECK(sensing::in_fov(high, target, cam));
    }
  }
}

TEST_CASE("sense ignores targets outside the footprint") {
  const auto cam = paper_camera();
  const sensing::DetectionProfile prof;
  const auto agent = agent_at(0.0, 0.0, 25.0);  // p = 1 below alpha1
  std::vector<sea::CastawayTruth> truths{
      {0, Eigen::Vector3d(500.0, 500.0, 0.0)}};
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    CHECK(sensing::sense<double>(0, agent, truths, cam, prof, 1.0, rng, i)
              .empty());
  }
}

TEST_CASE("sense always emits at full detection probability") {
  const auto cam = paper_camera();
  const sensing::DetectionProfile prof;
  const auto agent = agent_at(0.0, 0.0, 25.0);
  std::vector<sea::CastawayTruth> truths{{4, Eigen::Vector3d(1.0, -1.0, 0.0)}};
  std::mt19937_64 rng(7);
  double sq_sum = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const auto measurements =
        sensing::sense<double>(2, agent, truths, cam, prof, 1.0, rng, i);
    REQUIRE(measurements.size() == 1);
    CHECK(measurements[0].agent_id == 2);
    CHECK(measurements[0].target_id == 4);
    CHECK(measurements[0].step == i);
    sq_sum += (measurements[0].value - Eigen::Vector2d(1.0, -1.0)).squaredNorm();
  }
  // Per-axis variance is zeta^2 at p = 1.
  const double noise_var = sq_sum / (2.0 * draws);
  CHECK(noise_var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sense matches the requested emission rate and noise scale") {
  const auto cam = paper_camera();
  const sensing::DetectionProfile prof;
  // Altitude where the ramp gives exactly p = 0.5.
  const double z = (0.5 - prof.beta2) / prof.beta1;
  REQUIRE(sensing::detection_probability(z, prof) == doctest::Approx(0.5));
  const auto agent = agent_at(0.0, 0.0, z);
  std::vector<sea::CastawayTruth> truths{{0, Eigen::Vector3d(0.0, 0.0, 0.0)}};

  std::mt19937_64 rng(123);
  const double zeta = 1.0;
  int emitted = 0;
  double sq_sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto measurements =
        sensing::sense<double>(0, agent, truths, cam, prof, zeta, rng, i);
    if (!measurements.empty()) {
      ++emitted;
      sq_sum += measurements[0].value.squaredNorm();
    }
  }
  const double rate = static_cast<double>(emitted) / draws;
  CHECK(std::abs(rate - 0.5) < 0.01);
  const double observed_std = std::sqrt(sq_sum / (2.0 * emitted));
  CHECK(std::abs(observed_std - zeta / 0.5) / (zeta / 0.5) < 0.02);
}

TEST_CASE("sense is reproducible for a fixed seed") {
  const auto cam = paper_camera();
  const sensing::DetectionProfile prof;
  const auto agent = agent_at(0.0, 0.0, 60.0);
  std::vector<sea::CastawayTruth> truths{{0, Eigen::Vector3d(2.0, 1.0, 0.0)},
                                         {1, Eigen::Vector3d(-3.0, 0.5, 0.0)}};
  const auto run = [&] {
    std::mt19937_64 rng(2024);
    std::vector<sensing::Measurement> all;
    for (int step = 0; step < 200; ++step) {
      auto m = sensing::sense<double>(1, agent, truths, cam, prof, 1.0, rng, step);
      all.insert(all.end(), m.begin(), m.end());
    }
    return all;
  };
  const auto a = run();
  const auto b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].target_id == b[i].target_id);
    CHECK(a[i].step == b[i].step);
  }
  CHECK_THROWS_AS(
      [&] {
        std::mt19937_64 rng(1);
        return sensing::sense<double>(0, agent, truths, cam, prof, 0.0, rng, 0);
      }(),
      std::invalid_argument);
}
