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

#include "seatrack/sim/export.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>

#include <nlohmann/json.hpp>

#include "seatrack/version.hpp"

namespace seatrack::sim {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

nlohmann::json finite_or_null(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

double number_or_infinity(const nlohmann::json& value) {
  if (value.is_null()) return std::numeric_limits<double>::infinity();
  return value.get<double>();
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (result.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buffer, result.ptr);
}

void write_truth_csv(const sea::TruthTable& table,
                     const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << "step,castaway_id,x,y,z\n";
  for (std::size_t step = 0; step < table.positions.size(); ++step) {
    const auto& row = table.positions[step];
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << step << ',' << j << ',' << format_double(row[j].x()) << ','
          << format_double(row[j].y()) << ',' << format_double(row[j].z())
          << '\n';
    }
  }
  finish_write(out, path);
}

nlohmann::json episode_summary_json(const EpisodeLog& log,
                                    const SimConfig& cfg) {
  nlohmann::json rmse = nlohmann::json::array();
  for (const double value : log.metrics.rmse) rmse.push_back(value);
  return nlohmann::json{
      {"kind", "episode"},
      {"version", kVersion},
      {"seed", log.seed},
      {"config", config_to_json(cfg)},
      {"metrics",
       {{"steps", log.metrics.steps},
        {"avg_trace", log.metrics.avg_trace},
        {"rmse", std::move(rmse)},
        {"avg_rmse", log.metrics.avg_rmse},
        {"min_separation", finite_or_null(log.metrics.min_separation)},
        {"min_altitude", log.metrics.min_altitude},
        {"state_violations", log.metrics.state_violations}}}};
}

EpisodeMetrics parse_episode_metrics(const nlohmann::json& doc) {
  const auto& m = doc.at("metrics");
  EpisodeMetrics metrics;
  metrics.steps = m.at("steps").get<int>();
  metrics.avg_trace = m.at("avg_trace").get<double>();
  for (const auto& value : m.at("rmse")) {
    metrics.rmse.push_back(value.get<double>());
  }
  metrics.avg_rmse = m.at("avg_rmse").get<double>();
  metrics.min_separation = number_or_infinity(m.at("min_separation"));
  metrics.min_altitude = m.at("min_altitude").get<double>();
  metrics.state_violations = m.at("state_violations").get<int>();
  return metrics;
}

nlohmann::json mc_summary_json(const MonteCarloSummary& summary,
                               const SimConfig& base) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : summary.results) {
    results.push_back({{"agents", r.n_agents},
                       {"castaways", r.n_castaways},
                       {"runs", r.runs},
                       {"mean_avg_trace", r.mean_avg_trace},
                       {"mean_rmse", r.mean_rmse},
                       {"min_separation", finite_or_null(r.min_separation)},
                       {"mean_min_separation",
                        finite_or_null(r.mean_min_separation)},
                       {"min_altitude", finite_or_null(r.min_altitude)}});
  }
  return nlohmann::json{{"kind", "monte_carlo"},
                        {"version", kVersion},
                        {"base_seed", summary.base_seed},
                        {"runs", summary.runs_per_cell},
                        {"config", config_to_json(base)},
                        {"results", std::move(results)}};
}

MonteCarloSummary parse_mc_summary(const nlohmann::json& doc) {
  MonteCarloSummary summary;
  summary.base_seed = doc.at("base_seed").get<std::uint64_t>();
  summary.runs_per_cell = doc.at("runs").get<int>();
  for (const auto& r : doc.at("results")) {
    SweepResult result;
    result.n_agents = r.at("agents").get<int>();
    result.n_castaways = r.at("castaways").get<int>();
    result.runs = r.at("runs").get<int>();
    result.mean_avg_trace = r.at("mean_avg_trace").get<double>();
    result.mean_rmse = r.at("mean_rmse").get<double>();
    result.min_separation = number_or_infinity(r.at("min_separation"));
    result.mean_min_separation =
        number_or_infinity(r.at("mean_min_separation"));
    result.min_altitude = number_or_infinity(r.at("min_altitude"));
    summary.results.push_back(result);
  }
  return summary;
}

void write_mc_summary(const MonteCarloSummary& summary, const SimConfig& base,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "summary.json";
  auto out = open_for_write(path);
  out << mc_summary_json(summary, base).dump(2) << '\n';
  finish_write(out, path);
}

void write_episode(const EpisodeLog& log, const SimConfig& cfg,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    const auto path = dir / "steps.csv";
    auto out = open_for_write(path);
    out << "step";
    for (int j = 0; j < log.n_castaways; ++j) {
      out << ",cast" << j << "_x,cast" << j << "_y,cast" << j << "_z";
    }
    for (int i = 0; i < log.n_agents; ++i) {
      out << ",agent" << i << "_x,agent" << i << "_y,agent" << i << "_z"
          << ",agent" << i << "_vx,agent" << i << "_vy,agent" << i << "_vz";
    }
    for (int j = 0; j < log.n_castaways; ++j) {
      out << ",target" << j << "_mx,target" << j << "_my,target" << j
          << "_mvx,target" << j << "_mvy,target" << j << "_trace";
    }
    for (int i = 0; i < log.n_agents; ++i) {
      out << ",agent" << i << "_group";
    }
    out << ",min_separation\n";

    for (const auto& record : log.steps) {
      out << record.step;
      for (const auto& truth : record.truths) {
        out << ',' << format_double(truth.x()) << ','
            << format_double(truth.y()) << ',' << format_double(truth.z());
      }
      for (const auto& agent : record.agents) {
        out << ',' << format_double(agent.position.x()) << ','
            << format_double(agent.position.y()) << ','
            << format_double(agent.position.z()) << ','
            << format_double(agent.velocity.x()) << ','
            << format_double(agent.velocity.y()) << ','
            << format_double(agent.velocity.z());
      }
      for (const auto& est : record.fused) {
        out << ',' << format_double(est.mean[0]) << ','
            << format_double(est.mean[1]) << ',' << format_double(est.mean[2])
            << ',' << format_double(est.mean[3]) << ','
            << format_double(est.covariance.trace());
      }
      for (const int group : record.agent_group) {
        out << ',' << group;
      }
      out << ','
          << (std::isfinite(record.min_separation)
                  ? format_double(record.min_separation)
                  : std::string("inf"))
          << '\n';
    }
    finish_write(out, path);
  }

  {
    const auto path = dir / "measurements.csv";
    auto out = open_for_write(path);
    out << "step,agent_id,target_id,y_x,y_y\n";
    for (const auto& record : log.steps) {
      for (const auto& m : record.measurements) {
        out << m.step << ',' << m.agent_id << ',' << m.target_id << ','
            << format_double(m.value.x()) << ',' << format_double(m.value.y())
            << '\n';
      }
    }
    finish_write(out, path);
  }

  {
    const auto path = dir / "plans.csv";
    auto out = open_for_write(path);
    out << "step,agent_id,J";
    const int horizon = cfg.planner.horizon;
    for (int k = 0; k < horizon; ++k) {
      out << ",u" << k << "_x,u" << k << "_y,u" << k << "_z";
    }
    out << ",degraded\n";
    for (const auto& record : log.steps) {
      for (const auto& plan : record.plans) {
        out << record.step << ',' << plan.agent_id << ','
            << format_double(plan.objective);
        for (const auto& u : plan.controls) {
          out << ',' << format_double(u.force.x()) << ','
              << format_double(u.force.y()) << ','
              << format_double(u.force.z());
        }
        out << ',' << (plan.degraded ? 1 : 0) << '\n';
      }
    }
    finish_write(out, path);
  }

  {
    const auto path = dir / "truths.csv";
    auto out = open_for_write(path);
    out << "step,castaway_id,x,y,z\n";
    for (std::size_t j = 0; j < log.initial_truths.size(); ++j) {
      const auto& p = log.initial_truths[j];
      out << 0 << ',' << j << ',' << format_double(p.x()) << ','
          << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
    }
    for (const auto& record : log.steps) {
      for (std::size_t j = 0; j < record.truths.size(); ++j) {
        const auto& p = record.truths[j];
        out << record.step << ',' << j << ',' << format_double(p.x()) << ','
            << format_double(p.y()) << ',' << format_double(p.z()) << '\n';
      }
    }
    finish_write(out, path);
  }

  {
    const auto path = dir / "estimates.csv";
    auto out = open_for_write(path);
    out << "step,agent_id,target_id,mx,my,mvx,mvy,trace\n";
    for (const auto& record : log.steps) {
      for (int i = 0; i < log.n_agents; ++i) {
        for (const auto& est : record.fused) {
          out << record.step << ',' << i << ',' << est.target_id << ','
              << format_double(est.mean[0]) << ',' << format_double(est.mean[1])
              << ',' << format_double(est.mean[2]) << ','
              << format_double(est.mean[3]) << ','
              << format_double(est.covariance.trace()) << '\n';
        }
      }
    }
    finish_write(out, path);
  }

  {
    const auto path = dir / "assignments.csv";
    auto out = open_for_write(path);
    out << "step,agent_id,group_id,group_size\n";
    for (const auto& record : log.steps) {
      for (std::size_t i = 0; i < record.agent_group.size(); ++i) {
        out << record.step << ',' << i << ',' << record.agent_group[i] << ','
            << record.agent_group_size[i] << '\n';
      }
    }
    finish_write(out, path);
  }

  {
    const auto path = dir / "summary.json";
    auto out = open_for_write(path);
    out << episode_summary_json(log, cfg).dump(2) << '\n';
    finish_write(out, path);
  }
}

}  // namespace seatrack::sim
