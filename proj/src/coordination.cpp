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

#include "seatrack/coordination.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace seatrack::coord {

namespace {

nlohmann::json message_to_json(const FleetMessage& message) {
  nlohmann::json doc;
  doc["sender"] = message.sender;
  doc["step"] = message.step;
  if (message.kind == MessageKind::kPlan) {
    doc["kind"] = "plan";
    const auto& plan = std::get<planner::Plan>(message.payload);
    nlohmann::json controls = nlohmann::json::array();
    for (const auto& u : plan.controls) {
      controls.push_back({u.force.x(), u.force.y(), u.force.z()});
    }
    doc["payload"] = {{"agent_id", plan.agent_id},
                      {"created_step", plan.created_step},
                      {"objective", plan.objective},
                      {"degraded", plan.degraded},
                      {"controls", std::move(controls)}};
  } else {
    doc["kind"] = "estimates";
    nlohmann::json estimates = nlohmann::json::array();
    for (const auto& est :
         std::get<std::vector<kf::TargetEstimate>>(message.payload)) {
      estimates.push_back({{"target_id", est.target_id},
                           {"mean", {est.mean[0], est.mean[1], est.mean[2],
                                     est.mean[3]}},
                           {"trace", est.covariance.trace()}});
    }
    doc["payload"] = std::move(estimates);
  }
  return doc;
}

}  // namespace

void MessageBus::publish(FleetMessage message) {
  const std::lock_guard<std::mutex> lock(mutex_);
  const auto it = last_step_.find(message.sender);
  if (it != last_step_.end() && message.step < it->second) {
    throw std::logic_error("message bus: step regression for sender " +
                           std::to_string(message.sender));
  }
  last_step_[message.sender] = message.step;
  if (trace_ != nullptr) {
    *trace_ << message_to_json(message).dump() << '\n';
  }
  log_.push_back(std::move(message));
}

std::vector<FleetMessage> MessageBus::history() const {
  const std::lock_guard<std::mutex> lock(mutex_);
  return log_;
}

std::size_t MessageBus::size() const {
  const std::lock_guard<std::mutex> lock(mutex_);
  return log_.size();
}

std::vector<planner::Plan> planning_round(
    std::span<const veh::AgentState> states,
    const std::vector<EstimateBank>& banks,
    const cluster::ClusterAssignment& assignment, const RoundContext& ctx,
    int step, const std::vector<planner::Plan>& previous, MessageBus& bus) {
  const std::size_t n_agents = states.size();
  if (banks.size() != n_agents || previous.size() != n_agents ||
      assignment.agent_to_group.size() != n_agents) {
    throw std::invalid_argument("planning_round: fleet size mismatch");
  }

  std::vector<planner::Plan> plans = previous;
  for (std::size_t i = 0; i < n_agents; ++i) {
    std::vector<planner::Plan> others;
    others.reserve(n_agents - 1);
    for (std::size_t j = 0; j < n_agents; ++j) {
      if (j != i) others.push_back(plans[j]);
    }
    if (ctx.on_before_solve) {
      ctx.on_before_solve(static_cast<int>(i), others);
    }

    std::vector<kf::TargetEstimate> cluster_targets;
    const int group = assignment.agent_to_group[i];
    for (const int target_id : assignment.groups[static_cast<std::size_t>(group)]) {
      const auto& bank = banks[i];
      const auto it = std::find_if(bank.begin(), bank.end(),
                                   [target_id](const kf::TargetEstimate& est) {
                                     return est.target_id == target_id;
                                   });
      if (it == bank.end()) {
        throw std::invalid_argument("planning_round: target " +
                                    std::to_string(target_id) +
                                    " missing from bank");
      }
      cluster_targets.push_back(*it);
    }

    planner::RolloutContext rctx = ctx.rollout;
    rctx.step = step;
    plans[i] = planner::solve(static_cast<int>(i), states[i], cluster_targets,
                              others, rctx);

    FleetMessage message;
    message.kind = MessageKind::kPlan;
    message.sender = static_cast<int>(i);
    message.step = step;
    message.payload = plans[i];
    bus.publish(std::move(message));
  }
  return plans;
}

void exchange_and_fuse(std::vector<EstimateBank>& banks, int step,
                       MessageBus& bus) {
  if (banks.empty()) return;
  const std::size_t n_targets = banks.front().size();
  for (const auto& bank : banks) {
    if (bank.size() != n_targets) {
      throw std::invalid_argument("exchange_and_fuse: bank size mismatch");
    }
  }

  for (std::size_t i = 0; i < banks.size(); ++i) {
    FleetMessage message;
    message.kind = MessageKind::kEstimateSnapshot;
    message.sender = static_cast<int>(i);
    message.step = step;
    message.payload = banks[i];
    bus.publish(std::move(message));
  }

  for (std::size_t j = 0; j < n_targets; ++j) {
    std::vector<kf::TargetEstimate> collected;
    collected.reserve(banks.size());
    for (const auto& bank : banks) {
      collected.push_back(bank[j]);
    }
    const kf::TargetEstimate fused = kf::fuse<double>(collected);
    for (auto& bank : banks) {
      bank[j] = fused;
    }
  }
}

}  // namespace seatrack::coord
