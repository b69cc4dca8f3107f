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

#include "seatrack/sim/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace seatrack::sim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

/// Collects field-level problems so a bad config is reported in one pass.
struct Issues {
  std::vector<std::string> messages;

  void add(const std::string& path, const std::string& what) {
    messages.push_back(path + ": " + what);
  }
  bool empty() const { return messages.empty(); }
};

void require_keys(const nlohmann::json& obj, const std::string& path,
                  const std::set<std::string>& allowed, Issues& issues) {
  if (!obj.is_object()) {
    issues.add(path, "expected an object");
    return;
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      issues.add(path + "." + key, "unknown key");
    }
  }
}

template <class T>
bool read_number(const nlohmann::json& obj, const std::string& path,
                 const char* key, T& out, Issues& issues) {
  if (!obj.contains(key)) return false;
  const auto& value = obj.at(key);
  if (!value.is_number()) {
    issues.add(path + "." + key, "expected a number");
    return false;
  }
  out = value.get<T>();
  return true;
}

bool read_bool_uint(const nlohmann::json& obj, const std::string& path,
                    const char* key, std::uint64_t& out, Issues& issues) {
  if (!obj.contains(key)) return false;
  const auto& value = obj.at(key);
  if (!value.is_number_unsigned()) {
    issues.add(path + "." + key, "expected an unsigned integer");
    return false;
  }
  out = value.get<std::uint64_t>();
  return true;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> details)
    : std::runtime_error([&details] {
        std::ostringstream msg;
        msg << "invalid configuration (" << details.size() << " problem"
            << (details.size() == 1 ? "" : "s") << ")";
        for (const auto& d : details) msg << "\n  - " << d;
        return msg.str();
      }()),
      details_(std::move(details)) {}

int SimConfig::steps() const {
  return static_cast<int>(std::llround(duration / dt));
}

SimConfig default_config() {
  SimConfig cfg;
  cfg.waves.emplace_back(Eigen::Vector2d(-400.0, -250.0), /*wavelength=*/50.0,
                         /*wave_height=*/1.0, /*decay_rate=*/0.001,
                         /*water_depth=*/500.0);
  cfg.planner.lattice = planner::default_lattice(cfg.vehicle);
  return cfg;
}

void validate_config(const SimConfig& cfg) {
  Issues issues;
  if (cfg.n_agents < 1) issues.add("agents", "need at least one agent");
  if (cfg.n_castaways < 1) issues.add("castaways", "need at least one castaway");
  if (!(cfg.dt > 0.0)) issues.add("dt", "must be > 0");
  if (!(cfg.duration > 0.0)) issues.add("duration", "must be > 0");
  if (cfg.duration > 0.0 && cfg.dt > 0.0) {
    const double ratio = cfg.duration / cfg.dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9) {
      issues.add("duration", "must be an integral number of steps");
    }
  }
  if (cfg.waves.empty()) issues.add("waves", "need at least one wave source");
  if (!(cfg.zeta > 0.0)) issues.add("sensing.zeta", "must be > 0");
  if ((cfg.process_noise_diag.array() < 0.0).any()) {
    issues.add("filter.q_diag", "must be non-negative");
  }
  if ((cfg.initial_cov_diag.array() < 0.0).any()) {
    issues.add("filter.p0_diag", "must be non-negative");
  }
  if (!(cfg.clustering.split_distance > 0.0)) {
    issues.add("clustering.split_distance", "must be > 0");
  }
  if (!(cfg.clustering.angle_threshold > 0.0) ||
      !(cfg.clustering.angle_threshold < std::numbers::pi)) {
    issues.add("clustering.angle_threshold_deg", "must be in (0, 180)");
  }
  if (cfg.clustering.horizon < 1) {
    issues.add("clustering.horizon", "must be >= 1");
  }
  if (cfg.planner.horizon < 1) issues.add("planner.horizon", "must be >= 1");
  if (!(cfg.planner.safety_distance > 0.0)) {
    issues.add("planner.safety_distance", "must be > 0");
  }
  if (!(cfg.planner.noise_scale > 0.0)) {
    issues.add("planner.lambda", "must be > 0");
  }
  if (cfg.planner.r_floor < 0.0 || cfg.planner.r_floor > 1.0) {
    issues.add("planner.r_floor", "must be in [0, 1]");
  }
  if (cfg.planner.max_candidates < 0) {
    issues.add("planner.max_candidates", "must be >= 0");
  }
  try {
    cfg.vehicle.check();
  } catch (const std::exception& e) {
    issues.add("vehicle", e.what());
  }
  if (!cfg.planner.lattice.empty()) {
    const double gamma = cfg.vehicle.force_to_accel();
    for (const double level : cfg.planner.lattice) {
      if (std::abs(gamma * level) > cfg.vehicle.max_accel * (1.0 + 1e-12)) {
        issues.add("planner.lattice",
                   "level " + std::to_string(level) +
                       " violates the acceleration bound");
        break;
      }
    }
  }
  if (!(cfg.placement.agent_radius > 0.0)) {
    issues.add("placement.agent_radius", "must be > 0");
  }
  if (!(cfg.placement.agent_altitude >= cfg.vehicle.min_altitude)) {
    issues.add("placement.agent_altitude",
               "must be at or above the altitude floor");
  }
  if (cfg.placement.castaway_spread < 0.0) {
    issues.add("placement.castaway_spread", "must be >= 0");
  }
  if (!cfg.placement.castaway_positions.empty() &&
      static_cast<int>(cfg.placement.castaway_positions.size()) !=
          cfg.n_castaways) {
    issues.add("placement.castaway_positions",
               "size must match the castaway count");
  }
  if (!(cfg.placement.report_noise_std >= 0.0)) {
    issues.add("placement.report_noise_std", "must be >= 0");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues.messages));
}

SimConfig load_config(const nlohmann::json& doc) {
  Issues issues;
  SimConfig cfg = default_config();

  require_keys(doc, "$",
               {"seed", "agents", "castaways", "duration", "dt", "waves",
                "camera", "detection", "sensing", "filter", "clustering",
                "planner", "vehicle", "placement"},
               issues);
  if (!issues.empty()) throw ConfigError(std::move(issues.messages));

  read_bool_uint(doc, "$", "seed", cfg.seed, issues);
  read_number(doc, "$", "agents", cfg.n_agents, issues);
  read_number(doc, "$", "castaways", cfg.n_castaways, issues);
  read_number(doc, "$", "duration", cfg.duration, issues);
  read_number(doc, "$", "dt", cfg.dt, issues);

  if (doc.contains("waves")) {
    const auto& waves = doc.at("waves");
    if (!waves.is_array() || waves.empty()) {
      issues.add("$.waves", "expected a non-empty array");
    } else {
      cfg.waves.clear();
      for (std::size_t i = 0; i < waves.size(); ++i) {
        const std::string path = "$.waves[" + std::to_string(i) + "]";
        const auto& w = waves[i];
        require_keys(w, path,
                     {"origin", "wavelength", "height", "decay", "depth",
                      "gravity", "max_steepness"},
                     issues);
        Eigen::Vector2d origin(0.0, 0.0);
        if (w.contains("origin")) {
          const auto& o = w.at("origin");
          if (!o.is_array() || o.size() != 2 || !o[0].is_number() ||
              !o[1].is_number()) {
            issues.add(path + ".origin", "expected [x, y]");
          } else {
            origin = Eigen::Vector2d(o[0].get<double>(), o[1].get<double>());
          }
        }
        double wavelength = 50.0, height = 1.0, decay = 0.001, depth = 500.0,
               gravity = 9.81, max_steepness = 0.2;
        read_number(w, path, "wavelength", wavelength, issues);
        read_number(w, path, "height", height, issues);
        read_number(w, path, "decay", decay, issues);
        read_number(w, path, "depth", depth, issues);
        read_number(w, path, "gravity", gravity, issues);
        read_number(w, path, "max_steepness", max_steepness, issues);
        try {
          cfg.waves.emplace_back(origin, wavelength, height, decay, depth,
                                 gravity, max_steepness);
        } catch (const std::exception& e) {
          issues.add(path, e.what());
        }
      }
    }
  }

  if (doc.contains("camera")) {
    const auto& cam = doc.at("camera");
    require_keys(cam, "$.camera", {"horizontal_fov_deg", "vertical_fov_deg"},
                 issues);
    double h_deg = cfg.camera.horizontal_fov / kDegToRad;
    double v_deg = cfg.camera.vertical_fov / kDegToRad;
    read_number(cam, "$.camera", "horizontal_fov_deg", h_deg, issues);
    read_number(cam, "$.camera", "vertical_fov_deg", v_deg, issues);
    try {
      cfg.camera = sensing::CameraSpec(h_deg * kDegToRad, v_deg * kDegToRad);
    } catch (const std::exception& e) {
      issues.add("$.camera", e.what());
    }
  }

  if (doc.contains("detection")) {
    const auto& det = doc.at("detection");
    require_keys(det, "$.detection", {"alpha1", "alpha2", "p_min"}, issues);
    double a1 = cfg.detection.alpha1;
    double a2 = cfg.detection.alpha2;
    double p_min = cfg.detection.p_min;
    read_number(det, "$.detection", "alpha1", a1, issues);
    read_number(det, "$.detection", "alpha2", a2, issues);
    read_number(det, "$.detection", "p_min", p_min, issues);
    try {
      cfg.detection = sensing::DetectionProfile(a1, a2, p_min);
    } catch (const std::exception& e) {
      issues.add("$.detection", e.what());
    }
  }

  if (doc.contains("sensing")) {
    const auto& sens = doc.at("sensing");
    require_keys(sens, "$.sensing", {"zeta"}, issues);
    read_number(sens, "$.sensing", "zeta", cfg.zeta, issues);
  }

  if (doc.contains("filter")) {
    const auto& filter = doc.at("filter");
    require_keys(filter, "$.filter", {"q_diag", "p0_diag"}, issues);
    const auto read_diag = [&](const char* key, Eigen::Vector4d& out) {
      if (!filter.contains(key)) return;
      const auto& arr = filter.at(key);
      if (!arr.is_array() || arr.size() != 4) {
        issues.add(std::string("$.filter.") + key, "expected 4 numbers");
        return;
      }
      for (int i = 0; i < 4; ++i) {
        if (!arr[static_cast<std::size_t>(i)].is_number()) {
          issues.add(std::string("$.filter.") + key, "expected 4 numbers");
          return;
        }
        out[i] = arr[static_cast<std::size_t>(i)].get<double>();
      }
    };
    read_diag("q_diag", cfg.process_noise_diag);
    read_diag("p0_diag", cfg.initial_cov_diag);
  }

  if (doc.contains("clustering")) {
    const auto& clus = doc.at("clustering");
    require_keys(clus, "$.clustering",
                 {"split_distance", "angle_threshold_deg", "horizon"}, issues);
    read_number(clus, "$.clustering", "split_distance",
                cfg.clustering.split_distance, issues);
    double angle_deg = cfg.clustering.angle_threshold / kDegToRad;
    if (read_number(clus, "$.clustering", "angle_threshold_deg", angle_deg,
                    issues)) {
      cfg.clustering.angle_threshold = angle_deg * kDegToRad;
    }
    read_number(clus, "$.clustering", "horizon", cfg.clustering.horizon,
                issues);
  }

  if (doc.contains("planner")) {
    const auto& plan = doc.at("planner");
    require_keys(plan, "$.planner",
                 {"horizon", "safety_distance", "lambda", "r_floor", "lattice",
                  "max_candidates"},
                 issues);
    read_number(plan, "$.planner", "horizon", cfg.planner.horizon, issues);
    read_number(plan, "$.planner", "safety_distance",
                cfg.planner.safety_distance, issues);
    read_number(plan, "$.planner", "lambda", cfg.planner.noise_scale, issues);
    read_number(plan, "$.planner", "r_floor", cfg.planner.r_floor, issues);
    read_number(plan, "$.planner", "max_candidates",
                cfg.planner.max_candidates, issues);
    if (plan.contains("lattice")) {
      const auto& arr = plan.at("lattice");
      if (!arr.is_array() || arr.empty()) {
        issues.add("$.planner.lattice", "expected a non-empty array");
      } else {
        cfg.planner.lattice.clear();
        for (const auto& level : arr) {
          if (!level.is_number()) {
            issues.add("$.planner.lattice", "expected numbers");
            break;
          }
          cfg.planner.lattice.push_back(level.get<double>());
        }
      }
    }
  }

  if (doc.contains("vehicle")) {
    const auto& vehicle = doc.at("vehicle");
    require_keys(vehicle, "$.vehicle",
                 {"mass", "drag", "max_speed_xy", "max_speed_z", "max_accel",
                  "min_altitude", "workspace"},
                 issues);
    read_number(vehicle, "$.vehicle", "mass", cfg.vehicle.mass, issues);
    read_number(vehicle, "$.vehicle", "drag", cfg.vehicle.drag, issues);
    read_number(vehicle, "$.vehicle", "max_speed_xy", cfg.vehicle.max_speed_xy,
                issues);
    read_number(vehicle, "$.vehicle", "max_speed_z", cfg.vehicle.max_speed_z,
                issues);
    read_number(vehicle, "$.vehicle", "max_accel", cfg.vehicle.max_accel,
                issues);
    read_number(vehicle, "$.vehicle", "min_altitude",
                cfg.vehicle.min_altitude, issues);
    if (vehicle.contains("workspace")) {
      const auto& box = vehicle.at("workspace");
      require_keys(box, "$.vehicle.workspace", {"min", "max"}, issues);
      const auto read_corner = [&](const char* key, Eigen::Vector3d& out) {
        if (!box.contains(key)) return;
        const auto& arr = box.at(key);
        if (!arr.is_array() || arr.size() != 3) {
          issues.add(std::string("$.vehicle.workspace.") + key,
                     "expected [x, y, z]");
          return;
        }
        for (int i = 0; i < 3; ++i) {
          out[i] = arr[static_cast<std::size_t>(i)].get<double>();
        }
      };
      Eigen::Vector3d lo = cfg.vehicle.workspace.min();
      Eigen::Vector3d hi = cfg.vehicle.workspace.max();
      read_corner("min", lo);
      read_corner("max", hi);
      cfg.vehicle.workspace = Eigen::AlignedBox3d(lo, hi);
    }
  }

  if (doc.contains("placement")) {
    const auto& place = doc.at("placement");
    require_keys(place, "$.placement",
                 {"agent_radius", "agent_altitude", "castaway_spread",
                  "castaway_positions", "report_noise_std"},
                 issues);
    read_number(place, "$.placement", "agent_radius",
                cfg.placement.agent_radius, issues);
    read_number(place, "$.placement", "agent_altitude",
                cfg.placement.agent_altitude, issues);
    read_number(place, "$.placement", "castaway_spread",
                cfg.placement.castaway_spread, issues);
    read_number(place, "$.placement", "report_noise_std",
                cfg.placement.report_noise_std, issues);
    if (place.contains("castaway_positions")) {
      const auto& arr = place.at("castaway_positions");
      if (!arr.is_array()) {
        issues.add("$.placement.castaway_positions", "expected an array");
      } else {
        cfg.placement.castaway_positions.clear();
        for (const auto& p : arr) {
          if (!p.is_array() || p.size() != 3) {
            issues.add("$.placement.castaway_positions",
                       "expected [x, y, z] entries");
            break;
          }
          cfg.placement.castaway_positions.emplace_back(
              p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        }
      }
    }
  }

  // The vehicle dt mirrors the simulation dt; a planner lattice is derived
  // from the (possibly updated) vehicle limits when none was given.
  cfg.vehicle.dt = cfg.dt;
  if (!doc.contains("planner") || !doc.at("planner").contains("lattice")) {
    cfg.planner.lattice = planner::default_lattice(cfg.vehicle);
  }

  if (!issues.empty()) throw ConfigError(std::move(issues.messages));
  validate_config(cfg);
  return cfg;
}

SimConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError({"cannot open config file: " + path.string()});
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError({"config parse error in " + path.string() + ": " +
                       e.what()});
  }
  return load_config(doc);
}

nlohmann::json config_to_json(const SimConfig& cfg) {
  nlohmann::json waves = nlohmann::json::array();
  for (const auto& w : cfg.waves) {
    waves.push_back({{"origin", {w.origin.x(), w.origin.y()}},
                     {"wavelength", w.wavelength},
                     {"height", w.wave_height},
                     {"decay", w.decay_rate},
                     {"depth", w.water_depth},
                     {"gravity", w.gravity}});
  }
  return nlohmann::json{
      {"seed", cfg.seed},
      {"agents", cfg.n_agents},
      {"castaways", cfg.n_castaways},
      {"duration", cfg.duration},
      {"dt", cfg.dt},
      {"waves", std::move(waves)},
      {"camera",
       {{"horizontal_fov_deg", cfg.camera.horizontal_fov / kDegToRad},
        {"vertical_fov_deg", cfg.camera.vertical_fov / kDegToRad}}},
      {"detection",
       {{"alpha1", cfg.detection.alpha1},
        {"alpha2", cfg.detection.alpha2},
        {"p_min", cfg.detection.p_min}}},
      {"sensing", {{"zeta", cfg.zeta}}},
      {"filter",
       {{"q_diag",
         {cfg.process_noise_diag[0], cfg.process_noise_diag[1],
          cfg.process_noise_diag[2], cfg.process_noise_diag[3]}},
        {"p0_diag",
         {cfg.initial_cov_diag[0], cfg.initial_cov_diag[1],
          cfg.initial_cov_diag[2], cfg.initial_cov_diag[3]}}}},
      {"clustering",
       {{"split_distance", cfg.clustering.split_distance},
        {"angle_threshold_deg", cfg.clustering.angle_threshold / kDegToRad},
        {"horizon", cfg.clustering.horizon}}},
      {"planner",
       {{"horizon", cfg.planner.horizon},
        {"safety_distance", cfg.planner.safety_distance},
        {"lambda", cfg.planner.noise_scale},
        {"r_floor", cfg.planner.r_floor},
        {"lattice", cfg.planner.lattice},
        {"max_candidates", cfg.planner.max_candidates}}},
      {"vehicle",
       {{"mass", cfg.vehicle.mass},
        {"drag", cfg.vehicle.drag},
        {"max_speed_xy", cfg.vehicle.max_speed_xy},
        {"max_speed_z", cfg.vehicle.max_speed_z},
        {"max_accel", cfg.vehicle.max_accel},
        {"min_altitude", cfg.vehicle.min_altitude},
        {"workspace",
         {{"min",
           {cfg.vehicle.workspace.min().x(), cfg.vehicle.workspace.min().y(),
            cfg.vehicle.workspace.min().z()}},
          {"max",
           {cfg.vehicle.workspace.max().x(), cfg.vehicle.workspace.max().y(),
            cfg.vehicle.workspace.max().z()}}}}}},
      {"placement", [&cfg] {
         nlohmann::json placement{
             {"agent_radius", cfg.placement.agent_radius},
             {"agent_altitude", cfg.placement.agent_altitude},
             {"castaway_spread", cfg.placement.castaway_spread},
             {"report_noise_std", cfg.placement.report_noise_std}};
         if (!cfg.placement.castaway_positions.empty()) {
           nlohmann::json positions = nlohmann::json::array();
           for (const auto& p : cfg.placement.castaway_positions) {
             positions.push_back({p.x(), p.y(), p.z()});
           }
           placement["castaway_positions"] = std::move(positions);
         }
         return placement;
       }()}};
}

}  // namespace seatrack::sim
