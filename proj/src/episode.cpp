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

#include "seatrack/sim/episode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "seatrack/sea_world.hpp"

namespace seatrack::sim {

namespace {

// Independent deterministic streams per purpose and agent.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t tag, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                    static_cast<std::uint32_t>(seed >> 32), tag,
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t kTagWorld = 0x776f726c;   // placement and reports
constexpr std::uint32_t kTagSensor = 0x73656e73;  // per-agent measurement noise

Eigen::Vector2d sample_disk(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double angle = 2.0 * std::numbers::pi * unit(rng);
  return {r * std::cos(angle), r * std::sin(angle)};
}

double min_pairwise_distance(std::span<const veh::AgentState> agents,
                             std::vector<double>* pairwise = nullptr) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      const double dist =
          (agents[i].position - agents[j].position).norm();
      if (pairwise != nullptr) pairwise->push_back(dist);
      lowest = std::min(lowest, dist);
    }
  }
  return lowest;
}

}  // namespace

EpisodeLog run_episode(const SimConfig& cfg, std::uint64_t seed,
                       std::ostream* bus_trace) {
  validate_config(cfg);

  const int n_steps = cfg.steps();
  const int n_agents = cfg.n_agents;
  const int n_targets = cfg.n_castaways;
  const kf::FilterParams filter = cfg.filter();

  std::mt19937_64 world_rng = make_rng(seed, kTagWorld, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Castaway ground truth.
  std::vector<sea::CastawayTruth> truths(static_cast<std::size_t>(n_targets));
  for (int j = 0; j < n_targets; ++j) {
    auto& truth = truths[static_cast<std::size_t>(j)];
    truth.id = j;
    if (!cfg.placement.castaway_positions.empty()) {
      truth.position = cfg.placement.castaway_positions[static_cast<std::size_t>(j)];
    } else {
      const Eigen::Vector2d xy =
          sample_disk(world_rng, cfg.placement.castaway_spread);
      truth.position = Eigen::Vector3d(xy.x(), xy.y(), 0.0);
    }
  }
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& truth : truths) centroid += truth.position.head<2>();
  centroid /= static_cast<double>(n_targets);

  // Agents spawn around the castaway centroid; resample until every pair
  // respects the safety distance so the separation guarantee holds from
  // step 0.
  std::vector<veh::AgentState> agents(static_cast<std::size_t>(n_agents));
  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) {
      throw std::runtime_error(
          "run_episode: cannot place agents with the required separation");
    }
    for (auto& agent : agents) {
      const Eigen::Vector2d xy =
          centroid + sample_disk(world_rng, cfg.placement.agent_radius);
      agent.position =
          Eigen::Vector3d(xy.x(), xy.y(), cfg.placement.agent_altitude);
      agent.velocity.setZero();
    }
    if (n_agents == 1 ||
        min_pairwise_distance(agents) >= cfg.planner.safety_distance) {
      break;
    }
  }

  // Initial reports: noisy positions, zero velocity, shared by all agents.
  std::vector<coord::EstimateBank> banks(
      static_cast<std::size_t>(n_agents));
  {
    coord::EstimateBank initial(static_cast<std::size_t>(n_targets));
    for (int j = 0; j < n_targets; ++j) {
      auto& est = initial[static_cast<std::size_t>(j)];
      est.target_id = j;
      est.mean.setZero();
      est.mean.head<2>() =
          truths[static_cast<std::size_t>(j)].position.head<2>() +
          cfg.placement.report_noise_std *
              Eigen::Vector2d(gauss(world_rng), gauss(world_rng));
      est.covariance = cfg.initial_cov_diag.asDiagonal();
    }
    for (auto& bank : banks) bank = initial;
  }

  std::vector<std::mt19937_64> sensor_rng;
  sensor_rng.reserve(static_cast<std::size_t>(n_agents));
  for (int i = 0; i < n_agents; ++i) {
    sensor_rng.push_back(make_rng(seed, kTagSensor, i));
  }

  coord::MessageBus bus;
  bus.set_trace(bus_trace);
  coord::RoundContext round_ctx;
  round_ctx.rollout.cfg = cfg.planner;
  round_ctx.rollout.camera = cfg.camera;
  round_ctx.rollout.detection = cfg.detection;
  round_ctx.rollout.filter = filter;
  round_ctx.rollout.vehicle = cfg.vehicle;

  std::vector<planner::Plan> previous_plans;
  previous_plans.reserve(static_cast<std::size_t>(n_agents));
  {
    planner::RolloutContext bootstrap = round_ctx.rollout;
    bootstrap.step = 0;
    for (int i = 0; i < n_agents; ++i) {
      previous_plans.push_back(planner::hover_plan(
          i, agents[static_cast<std::size_t>(i)], bootstrap));
    }
  }

  EpisodeLog log;
  log.seed = seed;
  log.n_agents = n_agents;
  log.n_castaways = n_targets;
  log.initial_agents = agents;
  for (const auto& truth : truths) log.initial_truths.push_back(truth.position);
  log.steps.reserve(static_cast<std::size_t>(n_steps));

  double trace_sum_total = 0.0;
  std::vector<double> sq_error_sum(static_cast<std::size_t>(n_targets), 0.0);
  double min_separation = min_pairwise_distance(agents);
  double min_altitude = std::numeric_limits<double>::infinity();
  for (const auto& agent : agents) {
    min_altitude = std::min(min_altitude, agent.position.z());
  }
  int state_violations = 0;

  for (int step = 1; step <= n_steps; ++step) {
    // (1) Ground truth drifts under superposed wave displacements.
    const double tau = static_cast<double>(step - 1) * cfg.dt;
    for (auto& truth : truths) {
      Eigen::Vector3d delta = Eigen::Vector3d::Zero();
      for (const auto& wave : cfg.waves) {
        delta += sea::drift_displacement(wave, truth.position, tau, cfg.dt);
      }
      truth.position += delta;
    }

    // (2) Each agent senses from its pre-move state.
    std::vector<sensing::Measurement> all_measurements;
    std::vector<std::vector<sensing::Measurement>> by_agent(
        static_cast<std::size_t>(n_agents));
    for (int i = 0; i < n_agents; ++i) {
      by_agent[static_cast<std::size_t>(i)] = sensing::sense<double>(
          i, agents[static_cast<std::size_t>(i)], truths, cfg.camera,
          cfg.detection, cfg.zeta, sensor_rng[static_cast<std::size_t>(i)],
          step);
      all_measurements.insert(all_measurements.end(),
                              by_agent[static_cast<std::size_t>(i)].begin(),
                              by_agent[static_cast<std::size_t>(i)].end());
    }

    // (3) Local predict plus update or miss per agent and target.
    for (int i = 0; i < n_agents; ++i) {
      auto& bank = banks[static_cast<std::size_t>(i)];
      const double p = sensing::detection_probability(
          agents[static_cast<std::size_t>(i)].position.z(), cfg.detection);
      const double meas_std = cfg.zeta / p;
      const Eigen::Matrix2d meas_noise =
          meas_std * meas_std * Eigen::Matrix2d::Identity();
      for (int j = 0; j < n_targets; ++j) {
        auto est = kf::predict<double>(bank[static_cast<std::size_t>(j)], filter);
        const auto& received = by_agent[static_cast<std::size_t>(i)];
        const auto it = std::find_if(
            received.begin(), received.end(),
            [j](const sensing::Measurement& m) { return m.target_id == j; });
        if (it != received.end()) {
          est = kf::update<double>(est, it->value, meas_noise, filter);
        } else {
          est = kf::update_missed<double>(est);
        }
        bank[static_cast<std::size_t>(j)] = est;
      }
    }

    // (4) Fleet-wide fusion; all banks identical afterwards.
    coord::exchange_and_fuse(banks, step, bus);

    // (5) Predictive clustering and greedy assignment.
    const cluster::ClusterAssignment assignment = cluster::make_assignment(
        banks.front(), agents, filter, cfg.clustering);

    // (6) Sequential planning round.
    const std::vector<planner::Plan> plans = coord::planning_round(
        agents, banks, assignment, round_ctx, step, previous_plans, bus);
    previous_plans = plans;

    // (7) Receding horizon: execute only the first control of each plan.
    for (int i = 0; i < n_agents; ++i) {
      agents[static_cast<std::size_t>(i)] =
          veh::step(agents[static_cast<std::size_t>(i)],
                    plans[static_cast<std::size_t>(i)].controls.front(),
                    cfg.vehicle);
    }

    StepRecord record;
    record.step = step;
    for (const auto& truth : truths) record.truths.push_back(truth.position);
    record.agents = agents;
    record.measurements = std::move(all_measurements);
    record.fused = banks.front();
    record.agent_group = assignment.agent_to_group;
    for (const int g : assignment.agent_to_group) {
      record.agent_group_size.push_back(
          static_cast<int>(assignment.groups[static_cast<std::size_t>(g)].size()));
    }
    record.plans = plans;
    record.min_separation =
        min_pairwise_distance(agents, &record.pairwise_distances);
    log.steps.push_back(std::move(record));

    double trace_sum = 0.0;
    for (int j = 0; j < n_targets; ++j) {
      const auto& est = banks.front()[static_cast<std::size_t>(j)];
      trace_sum += est.covariance.trace();
      sq_error_sum[static_cast<std::size_t>(j)] +=
          (est.mean.head<2>() -
           truths[static_cast<std::size_t>(j)].position.head<2>())
              .squaredNorm();
    }
    trace_sum_total += trace_sum;
    min_separation = std::min(min_separation, log.steps.back().min_separation);
    for (const auto& agent : agents) {
      min_altitude = std::min(min_altitude, agent.position.z());
      if (!veh::validate(agent, veh::ControlInput{}, cfg.vehicle).ok()) {
        ++state_violations;
      }
    }
  }

  log.metrics.steps = n_steps;
  log.metrics.avg_trace = trace_sum_total / n_steps;
  log.metrics.rmse.resize(static_cast<std::size_t>(n_targets));
  double rmse_sum = 0.0;
  for (int j = 0; j < n_targets; ++j) {
    log.metrics.rmse[static_cast<std::size_t>(j)] =
        std::sqrt(sq_error_sum[static_cast<std::size_t>(j)] / n_steps);
    rmse_sum += log.metrics.rmse[static_cast<std::size_t>(j)];
  }
  log.metrics.avg_rmse = rmse_sum / n_targets;
  log.metrics.min_separation = min_separation;
  log.metrics.min_altitude = min_altitude;
  log.metrics.state_violations = state_violations;
  return log;
}

}  // namespace seatrack::sim
