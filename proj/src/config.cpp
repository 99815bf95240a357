#include "actv/config.hpp"

#include <cmath>
#include <set>

#include "actv/error.hpp"
#include "actv/pgm.hpp"

namespace actv {

EnergyModel EnergyConfig::single() const {
  return {activity_power_w, detector_power_w, detector_fps, 1, workday_h};
}

EnergyModel EnergyConfig::network() const {
  return {network_activity_power_w, detector_power_w, detector_fps, network_cameras, workday_h};
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  std::set<std::string> k(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!k.count(it.key())) throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where.empty() ? key : where + "." + key, "wrong type");
  }
}

void check(bool ok, const std::string& field, const char* what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

void Config::validate() const {
  check(days >= 1, "days", "must be >= 1");
  check(!camera_id.empty(), "camera_id", "must be non-empty");
  check(!store_dir.empty(), "store_dir", "must be non-empty");
  check(bands.T_L1 > 0, "bands.T_L1", "must be > 0");
  check(bands.T_L2 > 0, "bands.T_L2", "must be > 0");
  check(bands.T_S1 > 0, "bands.T_S1", "must be > 0");
  check(bands.T_S2 > 0, "bands.T_S2", "must be > 0");
  check(bands.frame_rate > 0, "bands.frame_rate", "must be > 0");
  check(bands.shortterm_rate > 0, "bands.shortterm_rate", "must be > 0");
  try {
    bands.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("bands", e.what());
  }
  check(motion.block_size > 0, "motion.block_size", "must be > 0");
  check(motion.noise_floor >= 0, "motion.noise_floor", "must be >= 0");
  check(events.k_sigma >= 0, "events.k_sigma", "must be >= 0");
  check(events.cooldown_s >= 0, "events.cooldown_s", "must be >= 0");
  check(events.min_threshold >= 0, "events.min_threshold", "must be >= 0");
  check(events.reinvoke_every_s >= 0, "events.reinvoke_every_s", "must be >= 0");
  check(energy.activity_power_w > 0, "energy.activity_power_w", "must be > 0");
  check(energy.network_activity_power_w > 0, "energy.network_activity_power_w", "must be > 0");
  check(energy.network_cameras >= 1, "energy.network_cameras", "must be >= 1");
  check(energy.detector_power_w > 0, "energy.detector_power_w", "must be > 0");
  check(energy.detector_fps > 0, "energy.detector_fps", "must be > 0");
  check(energy.workday_h > 0, "energy.workday_h", "must be > 0");
  check(energy.events_per_camera >= 0, "energy.events_per_camera", "must be >= 0");
  check(plan.w1 >= 0, "plan.w1", "must be >= 0");
  check(plan.w2 >= 0, "plan.w2", "must be >= 0");
  check(plan.w1 + plan.w2 > 0, "plan.w2", "w1 + w2 must be > 0");
  check(plan.lambda > 0, "plan.lambda", "must be > 0");
  check(plan.epsilon >= 0, "plan.epsilon", "must be >= 0");
  check(plan.staleness_s >= 0, "plan.staleness_s", "must be >= 0");
  check(plan.minute >= 0 && plan.minute < 1440, "plan.minute", "must lie in [0, 1439]");
  check(costmap.width > 0, "costmap.width", "must be > 0");
  check(costmap.height > 0, "costmap.height", "must be > 0");
  check(costmap.resolution > 0, "costmap.resolution", "must be > 0");
  check(costmap.full_scale > 0, "costmap.full_scale", "must be > 0");
  for (const auto& c : costmap.cameras) check(!c.camera_id.empty(), "costmap.cameras.cam", "must be non-empty");
  try {
    scenario.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("scenario", e.what());
  }
}

Config config_from_json(const json& j, const std::filesystem::path& base_dir) {
  Config c;
  reject_unknown(j, {"seed", "camera_id", "days", "store_dir", "bands", "motion", "events", "energy", "plan", "costmap",
                     "scenario"},
                 "");
  read(j, "seed", c.seed, "");
  read(j, "camera_id", c.camera_id, "");
  read(j, "days", c.days, "");
  read(j, "store_dir", c.store_dir, "");
  if (j.contains("bands")) {
    const auto& b = j["bands"];
    reject_unknown(b, {"T_L1", "T_L2", "T_S1", "T_S2", "frame_rate", "shortterm_rate"}, "bands");
    read(b, "T_L1", c.bands.T_L1, "bands");
    read(b, "T_L2", c.bands.T_L2, "bands");
    read(b, "T_S1", c.bands.T_S1, "bands");
    read(b, "T_S2", c.bands.T_S2, "bands");
    read(b, "frame_rate", c.bands.frame_rate, "bands");
    read(b, "shortterm_rate", c.bands.shortterm_rate, "bands");
  }
  if (j.contains("motion")) {
    const auto& m = j["motion"];
    reject_unknown(m, {"block_size", "noise_floor"}, "motion");
    read(m, "block_size", c.motion.block_size, "motion");
    read(m, "noise_floor", c.motion.noise_floor, "motion");
  }
  if (j.contains("events")) {
    const auto& e = j["events"];
    reject_unknown(e, {"k_sigma", "cooldown_s", "min_threshold", "min_days", "reinvoke_every_s"}, "events");
    read(e, "k_sigma", c.events.k_sigma, "events");
    read(e, "cooldown_s", c.events.cooldown_s, "events");
    read(e, "min_threshold", c.events.min_threshold, "events");
    read(e, "min_days", c.events.min_days, "events");
    read(e, "reinvoke_every_s", c.events.reinvoke_every_s, "events");
  }
  if (j.contains("energy")) {
    const auto& e = j["energy"];
    reject_unknown(e, {"activity_power_w", "network_activity_power_w", "network_cameras", "detector_power_w",
                       "detector_fps", "workday_h", "events_per_camera"},
                   "energy");
    read(e, "activity_power_w", c.energy.activity_power_w, "energy");
    read(e, "network_activity_power_w", c.energy.network_activity_power_w, "energy");
    read(e, "network_cameras", c.energy.network_cameras, "energy");
    read(e, "detector_power_w", c.energy.detector_power_w, "energy");
    read(e, "detector_fps", c.energy.detector_fps, "energy");
    read(e, "workday_h", c.energy.workday_h, "energy");
    read(e, "events_per_camera", c.energy.events_per_camera, "energy");
  }
  if (j.contains("plan")) {
    const auto& p = j["plan"];
    reject_unknown(p, {"w1", "w2", "lambda", "epsilon", "staleness_s", "include_moving", "minute"}, "plan");
    read(p, "w1", c.plan.w1, "plan");
    read(p, "w2", c.plan.w2, "plan");
    read(p, "lambda", c.plan.lambda, "plan");
    read(p, "epsilon", c.plan.epsilon, "plan");
    read(p, "staleness_s", c.plan.staleness_s, "plan");
    read(p, "include_moving", c.plan.include_moving, "plan");
    read(p, "minute", c.plan.minute, "plan");
  }
  if (j.contains("costmap")) {
    const auto& m = j["costmap"];
    reject_unknown(m, {"static_map", "width", "height", "resolution", "origin", "full_scale", "cameras"}, "costmap");
    read(m, "static_map", c.costmap.static_map, "costmap");
    if (!c.costmap.static_map.empty() && std::filesystem::path(c.costmap.static_map).is_relative() && !base_dir.empty()) {
      c.costmap.static_map = (base_dir / c.costmap.static_map).string();
    }
    read(m, "width", c.costmap.width, "costmap");
    read(m, "height", c.costmap.height, "costmap");
    read(m, "resolution", c.costmap.resolution, "costmap");
    read(m, "full_scale", c.costmap.full_scale, "costmap");
    if (m.contains("origin")) {
      std::vector<double> o;
      read(m, "origin", o, "costmap");
      check(o.size() == 2, "costmap.origin", "expected [x, y]");
      c.costmap.origin_x = o[0];
      c.costmap.origin_y = o[1];
    }
    if (m.contains("cameras")) {
      check(m["cameras"].is_array(), "costmap.cameras", "expected an array");
      for (const auto& cam : m["cameras"]) {
        reject_unknown(cam, {"cam", "homography"}, "costmap.cameras");
        CameraMount mount;
        read(cam, "cam", mount.camera_id, "costmap.cameras");
        std::vector<double> h;
        read(cam, "homography", h, "costmap.cameras");
        check(h.size() == 9, "costmap.cameras.homography", "expected 9 numbers");
        std::copy(h.begin(), h.end(), mount.to_world.h.begin());
        c.costmap.cameras.push_back(std::move(mount));
      }
    }
  }
  if (j.contains("scenario")) {
    json sj = j["scenario"];
    if (sj.is_string()) {
      std::filesystem::path p = sj.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      try {
        sj = json::parse(read_file(p));
      } catch (const json::exception& e) {
        throw ConfigError("scenario", "cannot parse " + p.string() + ": " + e.what());
      } catch (const Error& e) {
        throw ConfigError("scenario", e.what());
      }
    }
    try {
      c.scenario = scenario_from_json(sj);
    } catch (const InvalidParameter& e) {
      throw ConfigError("scenario", e.what());
    }
  }
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw ConfigError("config", "cannot read config file " + path.string());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("config", "invalid JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

nlohmann::ordered_json config_to_json(const Config& c) {
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["camera_id"] = c.camera_id;
  j["days"] = c.days;
  j["store_dir"] = c.store_dir;
  j["bands"] = {{"T_L1", c.bands.T_L1}, {"T_L2", c.bands.T_L2}, {"T_S1", c.bands.T_S1},
                {"T_S2", c.bands.T_S2}, {"frame_rate", c.bands.frame_rate}, {"shortterm_rate", c.bands.shortterm_rate}};
  j["motion"] = {{"block_size", c.motion.block_size}, {"noise_floor", c.motion.noise_floor}};
  j["events"] = {{"k_sigma", c.events.k_sigma},
                 {"cooldown_s", c.events.cooldown_s},
                 {"min_threshold", c.events.min_threshold},
                 {"min_days", c.events.min_days},
                 {"reinvoke_every_s", c.events.reinvoke_every_s}};
  j["energy"] = {{"activity_power_w", c.energy.activity_power_w},
                 {"network_activity_power_w", c.energy.network_activity_power_w},
                 {"network_cameras", c.energy.network_cameras},
                 {"detector_power_w", c.energy.detector_power_w},
                 {"detector_fps", c.energy.detector_fps},
                 {"workday_h", c.energy.workday_h},
                 {"events_per_camera", c.energy.events_per_camera}};
  j["plan"] = {{"w1", c.plan.w1},
               {"w2", c.plan.w2},
               {"lambda", c.plan.lambda},
               {"epsilon", c.plan.epsilon},
               {"staleness_s", c.plan.staleness_s},
               {"include_moving", c.plan.include_moving},
               {"minute", c.plan.minute}};
  auto cams = nlohmann::ordered_json::array();
  for (const auto& m : c.costmap.cameras) cams.push_back({{"cam", m.camera_id}, {"homography", m.to_world.h}});
  j["costmap"] = {{"static_map", c.costmap.static_map},
                  {"width", c.costmap.width},
                  {"height", c.costmap.height},
                  {"resolution", c.costmap.resolution},
                  {"origin", {c.costmap.origin_x, c.costmap.origin_y}},
                  {"full_scale", c.costmap.full_scale},
                  {"cameras", cams}};
  j["scenario"] = scenario_to_json(c.scenario);
  return j;
}

}  // namespace actv
