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

#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <variant>
#include <vector>

#include "seatrack/clustering.hpp"
#include "seatrack/estimation.hpp"
#include "seatrack/planner.hpp"
#include "seatrack/vehicle.hpp"

namespace seatrack::coord {

enum class MessageKind { kPlan, kEstimateSnapshot };

/// Fleet broadcast: either a plan or a full estimate snapshot for one step.
struct FleetMessage {
  MessageKind kind = MessageKind::kPlan;
  int sender = -1;
  int step = 0;
  std::variant<planner::Plan, std::vector<kf::TargetEstimate>> payload;
};

/// In-process broadcast bus. Publishing is thread-safe and FIFO per sender;
/// a sender's step numbers must be monotone non-decreasing. An optional
/// trace sink receives one JSON line per message.
class MessageBus {
 public:
  void publish(FleetMessage message);
  std::vector<FleetMessage> history() const;
  std::size_t size() const;
  void set_trace(std::ostream* sink) { trace_ = sink; }

 private:
  mutable std::mutex mutex_;
  std::vector<FleetMessage> log_;
  std::map<int, int> last_step_;
  std::ostream* trace_ = nullptr;
};

using EstimateBank = std::vector<kf::TargetEstimate>;

/// Context shared by every solve of a planning round. `on_before_solve`
/// (optional) observes the exact plan set handed to each agent, in fleet
/// order excluding the agent itself.
struct RoundContext {
  planner::RolloutContext rollout;
  std::function<void(int agent_id, const std::vector<planner::Plan>&)>
      on_before_solve;
};

/// Sequential planning protocol: agents solve in ascending id order; agent i
/// sees the plans already produced this round for agents < i and the
/// previous round's plans for agents > i. Every plan is broadcast on the
/// bus. Deterministic for identical inputs.
std::vector<planner::Plan> planning_round(
    std::span<const veh::AgentState> states,
    const std::vector<EstimateBank>& banks,
    const cluster::ClusterAssignment& assignment, const RoundContext& ctx,
    int step, const std::vector<planner::Plan>& previous, MessageBus& bus);

/// Broadcasts every agent's posterior bank, fuses per target across agents
/// (ascending id order), and installs the fused estimate into every bank;
/// afterwards all banks are elementwise identical.
void exchange_and_fuse(std::vector<EstimateBank>& banks, int step,
                       MessageBus& bus);

}  // namespace seatrack::coord
