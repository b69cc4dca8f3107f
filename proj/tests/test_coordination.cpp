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

#include <sstream>
#include <thread>

#include <doctest.h>

using namespace seatrack;

namespace {

veh::AgentState agent_at(double x, double y, double z = 50.0) {
  veh::AgentState state;
  state.position = Eigen::Vector3d(x, y, z);
  return state;
}

kf::TargetEstimate estimate(int id, double x, double y, double trace_scale) {
  kf::TargetEstimate est;
  est.target_id = id;
  est.mean << x, y, 0.0, 0.0;
  est.covariance = (trace_scale / 4.0) * Eigen::Matrix4d::Identity();
  return est;
}

coord::RoundContext make_round_context() {
  coord::RoundContext ctx;
  ctx.rollout.cfg.horizon = 2;
  ctx.rollout.cfg.lattice = planner::default_lattice(ctx.rollout.vehicle);
  return ctx;
}

coord::FleetMessage plan_message(int sender, int step) {
  coord::FleetMessage message;
  message.kind = coord::MessageKind::kPlan;
  message.sender = sender;
  message.step = step;
  planner::Plan plan;
  plan.agent_id = sender;
  plan.created_step = step;
  plan.states.push_back(agent_at(0, 0));
  message.payload = plan;
  return message;
}

}  // namespace

TEST_CASE("bus preserves publish order and rejects step regressions") {
  coord::MessageBus bus;
  bus.publish(plan_message(0, 1));
  bus.publish(plan_message(1, 1));
  bus.publish(plan_message(0, 2));
  CHECK(bus.size() == 3);
  const auto history = bus.history();
  CHECK(history[0].sender == 0);
  CHECK(history[1].sender == 1);
  CHECK(history[2].step == 2);
  CHECK_THROWS_AS(bus.publish(plan_message(0, 1)), std::logic_error);
  // Repeating the same step is fine (plan + estimate share a step).
  CHECK_NOTHROW(bus.publish(plan_message(1, 1)));
}

TEST_CASE("bus accepts concurrent publishers without loss") {
  coord::MessageBus bus;
  const auto writer = [&bus](int sender) {
    for (int step = 0; step < 200; ++step) {
      bus.publish(plan_message(sender, step));
    }
  };
  std::thread a(writer, 0);
  std::thread b(writer, 1);
  a.join();
  b.join();
  CHECK(bus.size() == 400);
  // FIFO per sender.
  int last0 = -1, last1 = -1;
  for (const auto& message : bus.history()) {
    int& last = message.sender == 0 ? last0 : last1;
    CHECK(message.step > last);
    last = message.step;
  }
}

TEST_CASE("bus trace emits one JSON line per message") {
  coord::MessageBus bus;
  std::ostringstream trace;
  bus.set_trace(&trace);
  bus.publish(plan_message(0, 1));
  coord::FleetMessage snapshot;
  snapshot.kind = coord::MessageKind::kEstimateSnapshot;
  snapshot.sender = 1;
  snapshot.step = 1;
  snapshot.payload = std::vector<kf::TargetEstimate>{estimate(0, 1, 2, 4.0)};
  bus.publish(std::move(snapshot));

  const std::string text = trace.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("\"kind\":\"plan\"") != std::string::npos);
  CHECK(text.find("\"kind\":\"estimates\"") != std::string::npos);
}

TEST_CASE("exchange_and_fuse installs identical banks everywhere") {
  coord::MessageBus bus;

  SUBCASE("single agent banks are unchanged") {
    std::vector<coord::EstimateBank> banks{{estimate(0, 1.0, 2.0, 4.0)}};
    const auto before = banks;
    coord::exchange_and_fuse(banks, 1, bus);
    CHECK(banks[0][0].mean == before[0][0].mean);
    CHECK(banks[0][0].covariance == before[0][0].covariance);
    CHECK(bus.size() == 1);
  }

  SUBCASE("identical estimates keep both the mean and the covariance") {
    std::vector<coord::EstimateBank> banks{{estimate(0, 3.0, -1.0, 4.0)},
                                           {estimate(0, 3.0, -1.0, 4.0)}};
    coord::exchange_and_fuse(banks, 1, bus);
    CHECK((banks[0][0].mean.head<2>() - Eigen::Vector2d(3.0, -1.0)).norm() <
          1e-14);
    CHECK((banks[0][0].covariance - Eigen::Matrix4d::Identity())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK(banks[0][0].mean == banks[1][0].mean);
    CHECK(banks[0][0].covariance == banks[1][0].covariance);
  }

  SUBCASE("inverse-trace weights are observable in the installed bank") {
    std::vector<coord::EstimateBank> banks{{estimate(0, 1.0, 0.0, 1.0)},
                                           {estimate(0, 0.0, 1.0, 3.0)}};
    coord::exchange_and_fuse(banks, 1, bus);
    CHECK(banks[0][0].mean[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(banks[0][0].mean[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(banks[1][0].mean == banks[0][0].mean);
  }

  SUBCASE("mismatched banks are rejected") {
    std::vector<coord::EstimateBank> banks{
        {estimate(0, 0, 0, 1.0)}, {estimate(0, 0, 0, 1.0), estimate(1, 0, 0, 1.0)}};
    CHECK_THROWS_AS(coord::exchange_and_fuse(banks, 1, bus),
                    std::invalid_argument);
  }
}

TEST_CASE("planning rounds run sequentially with fresh-then-stale plans") {
  const auto ctx = make_round_context();
  coord::MessageBus bus;

  const std::vector<veh::AgentState> states{
      agent_at(0.0, 0.0), agent_at(20.0, 0.0), agent_at(-20.0, 0.0)};
  const coord::EstimateBank bank{estimate(0, 0.0, 0.0, 4.0),
                                 estimate(1, 22.0, 0.0, 4.0),
                                 estimate(2, -22.0, 0.0, 4.0)};
  std::vector<coord::EstimateBank> banks{bank, bank, bank};

  const kf::FilterParams filter(1.0);
  const auto assignment =
      cluster::make_assignment(bank, states, filter, cluster::ClusterParams{});

  std::vector<planner::Plan> bootstrap;
  planner::RolloutContext bctx = ctx.rollout;
  bctx.step = 0;
  for (int i = 0; i < 3; ++i) {
    bootstrap.push_back(
        planner::hover_plan(i, states[static_cast<std::size_t>(i)], bctx));
  }

  SUBCASE("agent i sees exactly i fresh and N-1-i stale plans") {
    auto instrumented = ctx;
    std::vector<std::pair<int, int>> observed;  // (fresh, stale) per agent
    instrumented.on_before_solve =
        [&observed](int, const std::vector<planner::Plan>& others) {
          int fresh = 0, stale = 0;
          for (const auto& plan : others) {
            (plan.created_step == 1 ? fresh : stale) += 1;
          }
          observed.emplace_back(fresh, stale);
        };
    coord::planning_round(states, banks, assignment, instrumented, 1,
                          bootstrap, bus);
    REQUIRE(observed.size() == 3);
    CHECK(observed[0] == std::pair<int, int>{0, 2});
    CHECK(observed[1] == std::pair<int, int>{1, 1});
    CHECK(observed[2] == std::pair<int, int>{2, 0});
  }

  SUBCASE("the second agent checks against the first agent's fresh plan") {
    auto instrumented = ctx;
    std::vector<planner::Plan> fresh_plans;
    std::vector<planner::Plan> seen_by_agent1;
    instrumented.on_before_solve =
        [&](int agent_id, const std::vector<planner::Plan>& others) {
          if (agent_id == 1) seen_by_agent1 = others;
        };
    fresh_plans = coord::planning_round(states, banks, assignment,
                                        instrumented, 1, bootstrap, bus);
    REQUIRE(seen_by_agent1.size() == 2);
    CHECK(seen_by_agent1[0].created_step == 1);
    CHECK(seen_by_agent1[0].agent_id == 0);
    REQUIRE(seen_by_agent1[0].controls.size() ==
            fresh_plans[0].controls.size());
    for (std::size_t k = 0; k < fresh_plans[0].controls.size(); ++k) {
      CHECK(seen_by_agent1[0].controls[k].force ==
            fresh_plans[0].controls[k].force);
    }
  }

  SUBCASE("a single agent plans against nobody") {
    const std::vector<veh::AgentState> solo{states[0]};
    std::vector<coord::EstimateBank> solo_banks{banks[0]};
    const auto solo_assignment = cluster::make_assignment(
        solo_banks[0], solo, filter, cluster::ClusterParams{});
    auto instrumented = ctx;
    int observed_others = -1;
    instrumented.on_before_solve =
        [&observed_others](int, const std::vector<planner::Plan>& others) {
          observed_others = static_cast<int>(others.size());
        };
    const auto plans = coord::planning_round(
        solo, solo_banks, solo_assignment, instrumented, 1,
        {planner::hover_plan(0, solo[0], bctx)}, bus);
    CHECK(observed_others == 0);
    CHECK(plans.size() == 1);
  }

  SUBCASE("two executions produce bit-identical plan lists") {
    coord::MessageBus bus_a, bus_b;
    const auto run = [&](coord::MessageBus& target) {
      return coord::planning_round(states, banks, assignment, ctx, 1,
                                   bootstrap, target);
    };
    const auto a = run(bus_a);
    const auto b = run(bus_b);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].objective == b[i].objective);
      CHECK(a[i].degraded == b[i].degraded);
      for (std::size_t k = 0; k < a[i].controls.size(); ++k) {
        CHECK(a[i].controls[k].force == b[i].controls[k].force);
      }
      for (std::size_t k = 0; k < a[i].states.size(); ++k) {
        CHECK(a[i].states[k].position == b[i].states[k].position);
        CHECK(a[i].states[k].velocity == b[i].states[k].velocity);
      }
    }
  }

  SUBCASE("every plan is broadcast on the bus") {
    coord::MessageBus counting;
    coord::planning_round(states, banks, assignment, ctx, 1, bootstrap,
                          counting);
    CHECK(counting.size() == 3);
    for (const auto& message : counting.history()) {
      CHECK(message.kind == coord::MessageKind::kPlan);
      CHECK(message.step == 1);
    }
  }
}
