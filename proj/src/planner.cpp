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

#include "seatrack/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seatrack::planner {

std::vector<double> default_lattice(const veh::VehicleParams& params) {
  const double u = params.max_force();
  return {-u, 0.0, u};
}

const veh::AgentState& plan_state_at(const Plan& plan, int abs_step) {
  if (plan.states.empty()) {
    throw std::invalid_argument("plan_state_at: plan has no states");
  }
  auto idx = static_cast<long>(abs_step) - plan.created_step;
  idx = std::clamp<long>(idx, 0, static_cast<long>(plan.states.size()) - 1);
  return plan.states[static_cast<std::size_t>(idx)];
}

FovBoundaryCheck fov_binaries(const veh::AgentState& agent,
                              const Eigen::Vector2d& target_xy,
                              const sensing::CameraSpec& camera) {
  const double z = agent.position.z();
  const double half_h = z * std::tan(camera.horizontal_fov / 2.0);
  const double half_v = z * std::tan(camera.vertical_fov / 2.0);

  // Side kappa maps to (sign, axis): the boundary value is
  // sign*agent + half-extent and the side holds when sign*target stays at
  // or below it. kappa = 0..3 is left, right, bottom, top.
  struct Side {
    double sign;
    int axis;
    double half;
  };
  const Side sides[4] = {
      {-1.0, 0, half_h}, {1.0, 0, half_h}, {-1.0, 1, half_v}, {1.0, 1, half_v}};

  FovBoundaryCheck check;
  for (int kappa = 0; kappa < 4; ++kappa) {
    const Side& s = sides[kappa];
    const double boundary = s.sign * agent.position[s.axis] + s.half;
    check.side[static_cast<std::size_t>(kappa)] =
        s.sign * target_xy[s.axis] <= boundary;
    check.sum += check.side[static_cast<std::size_t>(kappa)] ? 1 : 0;
  }
  check.inside = check.sum == 4;
  return check;
}

PlanningNoise planning_noise(double z, const PlannerConfig& cfg,
                             const sensing::DetectionProfile& prof) {
  if (z < 0.0) {
    throw std::invalid_argument("planning_noise: altitude must be >= 0");
  }
  const double ramp = (z - prof.alpha1) / (prof.alpha2 - prof.alpha1);
  const double r = std::clamp(ramp, cfg.r_floor, 1.0);
  PlanningNoise out;
  out.sigma = cfg.noise_scale * r;
  out.covariance = out.sigma * out.sigma * Eigen::Matrix2d::Identity();
  return out;
}

namespace {

/// Candidate-independent precomputation for one solve/rollout: open-loop
/// target means over the horizon and the pseudo-update noise of every other
/// agent whose predicted FoV covers a target, per stage in fleet order.
class HorizonEvaluator {
 public:
  HorizonEvaluator(std::span<const kf::TargetEstimate> targets,
                   std::span<const Plan> others, const RolloutContext& ctx)
      : ctx_(ctx), n_(targets.size()) {
    const int horizon = ctx.cfg.horizon;
    means_.resize(static_cast<std::size_t>(horizon) + 1);
    means_[0].reserve(n_);
    initial_covs_.reserve(n_);
    for (const auto& target : targets) {
      means_[0].push_back(target.mean);
      initial_covs_.push_back(target.covariance);
    }
    for (int k = 1; k <= horizon; ++k) {
      auto& stage = means_[static_cast<std::size_t>(k)];
      stage.reserve(n_);
      for (const auto& mean : means_[static_cast<std::size_t>(k) - 1]) {
        stage.push_back(ctx.filter.transition * mean);
      }
    }

    other_noise_.assign(static_cast<std::size_t>(horizon),
                        std::vector<std::vector<Eigen::Matrix2d>>(n_));
    for (int k = 1; k <= horizon; ++k) {
      for (const auto& other : others) {
        const veh::AgentState& state = plan_state_at(other, ctx.step + k);
        const auto noise = planning_noise(std::max(0.0, state.position.z()),
                                          ctx.cfg, ctx.detection);
        for (std::size_t j = 0; j < n_; ++j) {
          const Eigen::Vector2d xy =
              ctx.filter.observation * means_[static_cast<std::size_t>(k)][j];
          if (fov_binaries(state, xy, ctx.camera).inside) {
            other_noise_[static_cast<std::size_t>(k) - 1][j].push_back(
                noise.covariance);
          }
        }
      }
    }
  }

  std::size_t targets() const { return n_; }
  std::span<const Eigen::Matrix4d> initial_covariances() const {
    return initial_covs_;
  }

  /// Advances the target covariances through stage k (1-based) given the
  /// agent's post-move state; returns the stage's added trace.
  double stage(int k, const veh::AgentState& own, Eigen::Matrix4d* covs) const {
    const auto self_noise = planning_noise(std::max(0.0, own.position.z()),
                                           ctx_.cfg, ctx_.detection);
    const auto& stage_means = means_[static_cast<std::size_t>(k)];
    double trace_sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      Eigen::Matrix4d p = kf::symmetrize<double>(
          ctx_.filter.transition * covs[j] * ctx_.filter.transition.transpose() +
          ctx_.filter.process_noise);
      for (const auto& noise : other_noise_[static_cast<std::size_t>(k) - 1][j]) {
        p = kf::posterior_covariance<double>(p, noise, ctx_.filter);
      }
      const Eigen::Vector2d xy = ctx_.filter.observation * stage_means[j];
      if (fov_binaries(own, xy, ctx_.camera).inside) {
        p = kf::posterior_covariance<double>(p, self_noise.covariance,
                                             ctx_.filter);
      }
      covs[j] = p;
      trace_sum += p.trace();
    }
    return trace_sum;
  }

 private:
  const RolloutContext& ctx_;
  std::size_t n_;
  std::vector<std::vector<Eigen::Vector4d>> means_;
  std::vector<Eigen::Matrix4d> initial_covs_;
  std::vector<std::vector<std::vector<Eigen::Matrix2d>>> other_noise_;
};

Plan replay_plan(int agent_id, const veh::AgentState& own,
                 std::vector<veh::ControlInput> controls,
                 const HorizonEvaluator& evaluator, const RolloutContext& ctx,
                 bool degraded) {
  Plan plan;
  plan.agent_id = agent_id;
  plan.created_step = ctx.step;
  plan.degraded = degraded;
  plan.controls = std::move(controls);
  plan.states.reserve(plan.controls.size() + 1);
  plan.states.push_back(own);

  std::vector<Eigen::Matrix4d> covs(evaluator.initial_covariances().begin(),
                                    evaluator.initial_covariances().end());
  double objective = 0.0;
  for (std::size_t k = 0; k < plan.controls.size(); ++k) {
    plan.states.push_back(
        veh::step(plan.states.back(), plan.controls[k], ctx.vehicle));
    objective += evaluator.stage(static_cast<int>(k) + 1, plan.states.back(),
                                 covs.data());
  }
  plan.objective = objective;
  return plan;
}

}  // namespace

double rollout(std::span<const veh::ControlInput> controls,
               const veh::AgentState& own,
               std::span<const kf::TargetEstimate> targets,
               std::span<const Plan> others, const RolloutContext& ctx) {
  if (static_cast<int>(controls.size()) != ctx.cfg.horizon) {
    throw std::invalid_argument("rollout: control count must equal horizon");
  }
  HorizonEvaluator evaluator(targets, others, ctx);
  std::vector<Eigen::Matrix4d> covs(evaluator.initial_covariances().begin(),
                                    evaluator.initial_covariances().end());
  veh::AgentState state = own;
  double objective = 0.0;
  for (int k = 1; k <= ctx.cfg.horizon; ++k) {
    state = veh::step(state, controls[static_cast<std::size_t>(k) - 1],
                      ctx.vehicle);
    objective += evaluator.stage(k, state, covs.data());
  }
  return objective;
}

bool feasible(std::span<const veh::AgentState> states,
              std::span<const veh::ControlInput> controls,
              std::span<const Plan> others, const RolloutContext& ctx) {
  const int horizon = ctx.cfg.horizon;
  if (static_cast<int>(states.size()) != horizon + 1 ||
      static_cast<int>(controls.size()) != horizon) {
    throw std::invalid_argument("feasible: need K+1 states and K controls");
  }
  for (int k = 1; k <= horizon; ++k) {
    const auto& state = states[static_cast<std::size_t>(k)];
    if (!veh::validate(state, controls[static_cast<std::size_t>(k) - 1],
                       ctx.vehicle)
             .ok()) {
      return false;
    }
    for (const auto& other : others) {
      const auto& other_state = plan_state_at(other, ctx.step + k);
      if ((state.position - other_state.position).norm() <
          ctx.cfg.safety_distance) {
        return false;
      }
    }
  }
  return true;
}

Plan hover_plan(int agent_id, const veh::AgentState& state,
                const RolloutContext& ctx) {
  Plan plan;
  plan.agent_id = agent_id;
  plan.created_step = ctx.step;
  plan.controls.assign(static_cast<std::size_t>(ctx.cfg.horizon),
                       veh::ControlInput{});
  plan.states.reserve(plan.controls.size() + 1);
  plan.states.push_back(state);
  for (const auto& u : plan.controls) {
    plan.states.push_back(veh::step(plan.states.back(), u, ctx.vehicle));
  }
  return plan;
}

Plan solve(int agent_id, const veh::AgentState& own,
           std::span<const kf::TargetEstimate> cluster,
           std::span<const Plan> others, const RolloutContext& ctx) {
  const int horizon = ctx.cfg.horizon;
  if (horizon < 1) {
    throw std::invalid_argument("solve: horizon must be >= 1");
  }
  if (cluster.empty()) {
    return hover_plan(agent_id, own, ctx);
  }
  const std::vector<double> levels =
      ctx.cfg.lattice.empty() ? default_lattice(ctx.vehicle) : ctx.cfg.lattice;
  if (levels.empty()) {
    throw std::invalid_argument("solve: empty control lattice");
  }
  const double gamma = ctx.vehicle.force_to_accel();
  for (const double level : levels) {
    if (std::abs(gamma * level) > ctx.vehicle.max_accel * (1.0 + 1e-12)) {
      throw std::invalid_argument("solve: lattice level exceeds input bounds");
    }
  }

  HorizonEvaluator evaluator(cluster, others, ctx);
  const std::size_t n_targets = evaluator.targets();
  const auto n_levels = levels.size();

  std::vector<std::vector<Eigen::Vector3d>> other_pos(
      static_cast<std::size_t>(horizon));
  for (int k = 1; k <= horizon; ++k) {
    auto& positions = other_pos[static_cast<std::size_t>(k) - 1];
    positions.reserve(others.size());
    for (const auto& other : others) {
      positions.push_back(plan_state_at(other, ctx.step + k).position);
    }
  }

  const auto stage_clear = [&](const veh::AgentState& state,
                               const veh::ControlInput& u, int k) {
    if (!veh::validate(state, u, ctx.vehicle).ok()) return false;
    for (const auto& pos : other_pos[static_cast<std::size_t>(k) - 1]) {
      if ((state.position - pos).norm() < ctx.cfg.safety_distance) return false;
    }
    return true;
  };

  struct Incumbent {
    bool found = false;
    double objective = std::numeric_limits<double>::infinity();
    double energy = std::numeric_limits<double>::infinity();
    std::vector<veh::ControlInput> controls;
  };
  Incumbent best;

  // Seed with the hover candidate when it belongs to the lattice; its
  // energy 0 is unique, so the (J, energy, lexicographic) tie-break order
  // is preserved while the bound prunes strictly worse subtrees early.
  const bool zero_in_lattice =
      std::find(levels.begin(), levels.end(), 0.0) != levels.end();
  if (zero_in_lattice) {
    std::vector<veh::ControlInput> zero(static_cast<std::size_t>(horizon));
    std::vector<Eigen::Matrix4d> covs(evaluator.initial_covariances().begin(),
                                      evaluator.initial_covariances().end());
    veh::AgentState state = own;
    double objective = 0.0;
    bool ok = true;
    for (int k = 1; k <= horizon && ok; ++k) {
      state = veh::step(state, zero[static_cast<std::size_t>(k) - 1],
                        ctx.vehicle);
      ok = stage_clear(state, zero[static_cast<std::size_t>(k) - 1], k);
      if (ok) objective += evaluator.stage(k, state, covs.data());
    }
    if (ok) {
      best.found = true;
      best.objective = objective;
      best.energy = 0.0;
      best.controls = std::move(zero);
    }
  }

  std::vector<veh::AgentState> state_stack(static_cast<std::size_t>(horizon) + 1);
  state_stack[0] = own;
  std::vector<std::vector<Eigen::Matrix4d>> cov_stack(
      static_cast<std::size_t>(horizon) + 1,
      std::vector<Eigen::Matrix4d>(n_targets));
  std::copy(evaluator.initial_covariances().begin(),
            evaluator.initial_covariances().end(), cov_stack[0].begin());
  std::vector<double> partial_objective(static_cast<std::size_t>(horizon) + 1,
                                        0.0);
  std::vector<double> partial_energy(static_cast<std::size_t>(horizon) + 1, 0.0);
  std::vector<veh::ControlInput> control_stack(
      static_cast<std::size_t>(horizon));
  std::int64_t leaves = 0;
  bool out_of_budget = false;

  const auto dfs = [&](auto&& self, int depth) -> void {
    for (std::size_t ix = 0; ix < n_levels && !out_of_budget; ++ix) {
      for (std::size_t iy = 0; iy < n_levels && !out_of_budget; ++iy) {
        for (std::size_t iz = 0; iz < n_levels && !out_of_budget; ++iz) {
          veh::ControlInput u;
          u.force = Eigen::Vector3d(levels[ix], levels[iy], levels[iz]);
          const veh::AgentState next =
              veh::step(state_stack[static_cast<std::size_t>(depth)], u,
                        ctx.vehicle);
          if (!stage_clear(next, u, depth + 1)) continue;

          auto& covs = cov_stack[static_cast<std::size_t>(depth) + 1];
          covs = cov_stack[static_cast<std::size_t>(depth)];
          const double trace =
              evaluator.stage(depth + 1, next, covs.data());
          const double objective =
              partial_objective[static_cast<std::size_t>(depth)] + trace;
          // Strictly worse partial sums can never win or tie: every later
          // stage adds a non-negative trace.
          if (best.found && objective > best.objective) continue;
          const double energy =
              partial_energy[static_cast<std::size_t>(depth)] +
              u.force.squaredNorm();
          control_stack[static_cast<std::size_t>(depth)] = u;

          if (depth + 1 == horizon) {
            ++leaves;
            if (ctx.cfg.max_candidates > 0 && leaves > ctx.cfg.max_candidates) {
              out_of_budget = true;
              return;
            }
            if (!best.found || objective < best.objective ||
                (objective == best.objective && energy < best.energy)) {
              best.found = true;
              best.objective = objective;
              best.energy = energy;
              best.controls.assign(control_stack.begin(), control_stack.end());
            }
          } else {
            state_stack[static_cast<std::size_t>(depth) + 1] = next;
            partial_objective[static_cast<std::size_t>(depth) + 1] = objective;
            partial_energy[static_cast<std::size_t>(depth) + 1] = energy;
            self(self, depth + 1);
          }
        }
      }
    }
  };
  dfs(dfs, 0);

  if (best.found) {
    return replay_plan(agent_id, own, std::move(best.controls), evaluator, ctx,
                       /*degraded=*/false);
  }

  // Degraded mode: nothing satisfies every constraint, so pick the candidate
  // maximizing the minimum inter-agent distance over the horizon (ties by
  // energy, then lexicographic order).
  struct Safest {
    bool found = false;
    double min_distance = -std::numeric_limits<double>::infinity();
    double energy = std::numeric_limits<double>::infinity();
    std::vector<veh::ControlInput> controls;
  };
  Safest safest;
  std::int64_t safe_leaves = 0;
  bool safe_out_of_budget = false;

  const auto dfs_safe = [&](auto&& self, int depth, double running_min,
                            double energy_so_far) -> void {
    for (std::size_t ix = 0; ix < n_levels && !safe_out_of_budget; ++ix) {
      for (std::size_t iy = 0; iy < n_levels && !safe_out_of_budget; ++iy) {
        for (std::size_t iz = 0; iz < n_levels && !safe_out_of_budget; ++iz) {
          veh::ControlInput u;
          u.force = Eigen::Vector3d(levels[ix], levels[iy], levels[iz]);
          const veh::AgentState next =
              veh::step(state_stack[static_cast<std::size_t>(depth)], u,
                        ctx.vehicle);
          double min_distance = running_min;
          for (const auto& pos : other_pos[static_cast<std::size_t>(depth)]) {
            min_distance =
                std::min(min_distance, (next.position - pos).norm());
          }
          // The running minimum only shrinks with depth.
          if (safest.found && min_distance < safest.min_distance) continue;
          const double energy = energy_so_far + u.force.squaredNorm();
          control_stack[static_cast<std::size_t>(depth)] = u;

          if (depth + 1 == horizon) {
            ++safe_leaves;
            if (ctx.cfg.max_candidates > 0 &&
                safe_leaves > ctx.cfg.max_candidates) {
              safe_out_of_budget = true;
              return;
            }
            if (!safest.found || min_distance > safest.min_distance ||
                (min_distance == safest.min_distance &&
                 energy < safest.energy)) {
              safest.found = true;
              safest.min_distance = min_distance;
              safest.energy = energy;
              safest.controls.assign(control_stack.begin(),
                                     control_stack.end());
            }
          } else {
            state_stack[static_cast<std::size_t>(depth) + 1] = next;
            self(self, depth + 1, min_distance, energy);
          }
        }
      }
    }
  };
  dfs_safe(dfs_safe, 0, std::numeric_limits<double>::infinity(), 0.0);

  return replay_plan(agent_id, own, std::move(safest.controls), evaluator, ctx,
                     /*degraded=*/true);
}

}  // namespace seatrack::planner
