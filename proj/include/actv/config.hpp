#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "actv/costmap.hpp"
#include "actv/events.hpp"
#include "actv/motion.hpp"
#include "actv/plan.hpp"
#include "actv/sim.hpp"
#include "actv/tfilter.hpp"

namespace actv {

struct EnergyConfig {
  double activity_power_w = 50.0;
  double network_activity_power_w = 80.0;
  int network_cameras = 32;
  double detector_power_w = 153.0;
  double detector_fps = 14.79;
  double workday_h = 10.0;
  double events_per_camera = 300.0;

  EnergyModel single() const;
  EnergyModel network() const;
};

struct PlanConfig {
  double w1 = 0.5;
  double w2 = 0.5;
  double lambda = 1.0;
  double epsilon = 0.015;
  double staleness_s = 5.0;
  bool include_moving = false;
  int minute = 540;
};

struct CameraMount {
  std::string camera_id;
  Homography to_world;
};

struct CostmapConfig {
  std::string static_map;  // YAML path; empty = blank map of the size below
  int width = 64;
  int height = 64;
  double resolution = 0.25;
  double origin_x = 0.0;
  double origin_y = 0.0;
  double full_scale = 1.0;
  std::vector<CameraMount> cameras;  // empty = camera_id with block (u, v) -> (u, v) meters
};

struct Config {
  std::uint64_t seed = 1;
  std::string camera_id = "cam0";
  int days = 1;
  std::string store_dir = "store";
  BandParams bands;
  MotionParams motion;
  GateParams events;
  EnergyConfig energy;
  PlanConfig plan;
  CostmapConfig costmap;
  Scenario scenario;

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

// Unknown keys anywhere are rejected. `scenario` is an inline object or a
// path to a scenario JSON file, resolved against `base_dir`.
Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_to_json(const Config& c);

}  // namespace actv
