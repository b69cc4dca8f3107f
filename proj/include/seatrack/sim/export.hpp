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

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "seatrack/sea_world.hpp"
#include "seatrack/sim/config.hpp"
#include "seatrack/sim/episode.hpp"
#include "seatrack/sim/monte_carlo.hpp"

namespace seatrack::sim {

/// Shortest round-trip decimal representation (std::to_chars); byte-stable
/// for identical inputs.
std::string format_double(double value);

/// Writes the full per-run file set into `dir`: steps.csv (one row per
/// step), measurements.csv, plans.csv, truths.csv, estimates.csv,
/// assignments.csv, and summary.json. I/O failures carry the path.
void write_episode(const EpisodeLog& log, const SimConfig& cfg,
                   const std::filesystem::path& dir);

/// Long-format trajectory table: step, castaway_id, x, y, z.
void write_truth_csv(const sea::TruthTable& table,
                     const std::filesystem::path& path);

nlohmann::json episode_summary_json(const EpisodeLog& log, const SimConfig& cfg);
nlohmann::json mc_summary_json(const MonteCarloSummary& summary,
                               const SimConfig& base);

void write_mc_summary(const MonteCarloSummary& summary, const SimConfig& base,
                      const std::filesystem::path& dir);

/// Inverse of the summary writers, for round-trip checks.
EpisodeMetrics parse_episode_metrics(const nlohmann::json& doc);
MonteCarloSummary parse_mc_summary(const nlohmann::json& doc);

}  // namespace seatrack::sim
