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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seatrack/sim/config.hpp"
#include "seatrack/sim/episode.hpp"
#include "seatrack/sim/export.hpp"
#include "seatrack/sim/monte_carlo.hpp"
#include "seatrack/version.hpp"

namespace {

seatrack::sim::SimConfig resolve_config(const std::string& config_path) {
  if (config_path.empty()) return seatrack::sim::default_config();
  return seatrack::sim::load_config_file(config_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV maritime target tracking simulator"};
  app.set_version_flag("--version", std::string(seatrack::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* simulate = app.add_subcommand("simulate", "Run a single episode");
  simulate->add_option("--config", config_path, "JSON configuration file");
  simulate->add_option("--out", out_dir, "Output directory");
  simulate->add_option("--seed", seed, "Episode seed (overrides config)")
      ->each([&](const std::string&) { seed_given = true; });
  bool trace_bus = false;
  simulate->add_flag("--trace-bus", trace_bus,
                     "Write the message-bus JSON trace");

  auto* montecarlo =
      app.add_subcommand("montecarlo", "Run a Monte Carlo sweep");
  int runs = 30;
  std::vector<int> sweep_agents;
  std::vector<int> sweep_targets;
  unsigned workers = 0;
  bool per_run_logs = false;
  montecarlo->add_option("--config", config_path, "JSON configuration file");
  montecarlo->add_option("--out", out_dir, "Output directory");
  montecarlo->add_option("--seed", seed, "Base seed (overrides config)")
      ->each([&](const std::string&) { seed_given = true; });
  montecarlo->add_option("--runs", runs, "Episodes per sweep cell");
  montecarlo->add_option("--sweep-agents", sweep_agents, "Agent counts")
      ->delimiter(',');
  montecarlo->add_option("--sweep-targets", sweep_targets, "Castaway counts")
      ->delimiter(',');
  montecarlo->add_option("--workers", workers,
                         "Worker threads (0 = hardware concurrency)");
  montecarlo->add_flag("--per-run-logs", per_run_logs,
                       "Write the full file set for every run");

  CLI11_PARSE(app, argc, argv);

  try {
    seatrack::sim::SimConfig cfg = resolve_config(config_path);
    if (seed_given) cfg.seed = seed;
    const std::filesystem::path out(out_dir);

    if (simulate->parsed()) {
      std::filesystem::create_directories(out);
      std::ofstream trace;
      std::ostream* trace_sink = nullptr;
      if (trace_bus) {
        trace.open(out / "bus_trace.jsonl", std::ios::binary);
        if (!trace) {
          std::cerr << "error: cannot write " << (out / "bus_trace.jsonl")
                    << '\n';
          return 1;
        }
        trace_sink = &trace;
      }
      const auto log = seatrack::sim::run_episode(cfg, cfg.seed, trace_sink);
      seatrack::sim::write_episode(log, cfg, out);
      std::cout << "episode seed " << cfg.seed << ": " << log.metrics.steps
                << " steps, avg trace "
                << seatrack::sim::format_double(log.metrics.avg_trace)
                << ", avg rmse "
                << seatrack::sim::format_double(log.metrics.avg_rmse) << '\n';
      return 0;
    }

    std::function<void(const seatrack::sim::EpisodeLog&, int, int, int)>
        per_run;
    if (per_run_logs) {
      per_run = [&](const seatrack::sim::EpisodeLog& log, int n, int c,
                    int run) {
        seatrack::sim::SimConfig run_cfg = cfg;
        run_cfg.n_agents = n;
        run_cfg.n_castaways = c;
        run_cfg.seed = log.seed;
        const auto run_dir = out /
                             ("n" + std::to_string(n) + "_c" +
                              std::to_string(c)) /
                             ("run_" + std::to_string(run));
        seatrack::sim::write_episode(log, run_cfg, run_dir);
      };
    }
    const auto summary = seatrack::sim::run_monte_carlo(
        cfg, runs, sweep_agents, sweep_targets, workers, per_run);
    seatrack::sim::write_mc_summary(summary, cfg, out);
    for (const auto& r : summary.results) {
      std::cout << "N=" << r.n_agents << " C=" << r.n_castaways << " runs="
                << r.runs << ": mean avg trace "
                << seatrack::sim::format_double(r.mean_avg_trace)
                << ", mean rmse "
                << seatrack::sim::format_double(r.mean_rmse)
                << ", min separation "
                << seatrack::sim::format_double(r.min_separation) << '\n';
    }
    return 0;
  } catch (const seatrack::sim::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
