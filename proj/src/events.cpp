#include "actv/events.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "actv/error.hpp"
#include "text.hpp"

namespace actv {

std::string_view to_string(TriggerBand b) {
  switch (b) {
    case TriggerBand::in_place:
      return "in-place";
    case TriggerBand::moving:
      return "moving";
    case TriggerBand::both:
      break;
  }
  return "both";
}

void GateParams::validate() const {
  if (!(k_sigma >= 0.0)) throw InvalidParameter("events.k_sigma must be >= 0");
  if (!(cooldown_s >= 0.0)) throw InvalidParameter("events.cooldown_s must be >= 0");
  if (!(min_threshold >= 0.0)) throw InvalidParameter("events.min_threshold must be >= 0");
  if (!(reinvoke_every_s >= 0.0)) throw InvalidParameter("events.reinvoke_every_s must be >= 0");
  if (!(tick_s > 0.0)) throw InvalidParameter("events.tick_s must be > 0");
}

EventGate::EventGate(std::string camera_id, GateParams params)
    : camera_id_(std::move(camera_id)), params_(params) {
  params_.validate();
  cooldown_ticks_ = std::max(1, static_cast<int>(std::lround(params_.cooldown_s / params_.tick_s)));
  tick_ms_ = std::max<std::int64_t>(1, std::llround(params_.tick_s * 1000.0));
}

void EventGate::close() {
  log_.back().end_ms = last_fire_ms_ + tick_ms_;
  open_ = false;
  quiet_ticks_ = 0;
}

GateDecision EventGate::detect(const MotionFrame& m_S1, const MotionFrame& m_S2, const ActivityStats& stats) {
  GateDecision d;
  d.activity = scalar_activity(m_S1, m_S2);
  d.threshold = stats.days_observed < params_.min_days ? params_.min_threshold
                                                       : stats.mean + params_.k_sigma * stats.std;
  d.fire = d.activity > d.threshold;
  const std::int64_t t = m_S1.timestamp_ms;

  if (d.fire) {
    quiet_ticks_ = 0;
    last_fire_ms_ = t;
    if (!open_) {
      ActivityEvent e;
      e.camera_id = camera_id_;
      e.start_ms = t;
      e.peak = d.activity;
      const bool s1 = m_S1.mean_density() > d.threshold;
      const bool s2 = m_S2.mean_density() > d.threshold;
      if (s1 && s2) {
        e.band = TriggerBand::both;
      } else if (s1 || s2) {
        e.band = s1 ? TriggerBand::in_place : TriggerBand::moving;
      } else {
        e.band = m_S1.mean_density() >= m_S2.mean_density() ? TriggerBand::in_place : TriggerBand::moving;
      }
      e.mean = stats.mean;
      e.std = stats.std;
      e.k_sigma = params_.k_sigma;
      e.threshold = d.threshold;
      log_.push_back(std::move(e));
      open_ = true;
      d.opened = true;
      d.invoke = true;
      last_invoke_ms_ = t;
    } else {
      log_.back().peak = std::max(log_.back().peak, d.activity);
      if (params_.reinvoke_every_s > 0.0 &&
          t - last_invoke_ms_ >= std::llround(params_.reinvoke_every_s * 1000.0)) {
        d.invoke = true;
        last_invoke_ms_ = t;
      }
    }
  } else if (open_) {
    if (++quiet_ticks_ >= cooldown_ticks_) close();
  }
  return d;
}

void EventGate::finish() {
  if (open_) close();
}

std::vector<std::uint8_t> DetectorStub::detect(std::int64_t timestamp_ms) const {
  if (!truth_) return {};
  const std::int64_t minute = timestamp_ms / kMsPerMinute;
  auto it = std::lower_bound(truth_->minute_index.begin(), truth_->minute_index.end(), minute);
  if (it == truth_->minute_index.end() || *it != minute) return {};
  const auto& row = truth_->minute_block_activity[static_cast<std::size_t>(it - truth_->minute_index.begin())];
  std::vector<std::uint8_t> mask(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) mask[k] = row[k] > 0.0f ? 1 : 0;
  return mask;
}

GateRun gate_pipeline(std::span<const BandSample> stream, const IsochronalStore& store, const DetectorStub& detector,
                      const GateParams& params) {
  EventGate gate(store.camera_id(), params);
  GateRun run;
  std::map<int, ActivityStats> cache;
  for (const auto& s : stream) {
    const std::int64_t ms = s.m_S1.timestamp_ms;
    const int minute = static_cast<int>(((ms / kMsPerMinute) % kMinutesPerDay + kMinutesPerDay) % kMinutesPerDay);
    auto it = cache.find(minute);
    if (it == cache.end()) it = cache.emplace(minute, activity_stats(store.query(minute))).first;
    const GateDecision d = gate.detect(s.m_S1, s.m_S2, it->second);
    if (d.invoke) {
      ++run.detector_invocations;
      for (auto v : detector.detect(ms)) run.persons_reported += v;
    }
    ++run.frames_processed;
  }
  gate.finish();
  run.events = gate.log();
  return run;
}

double duty_cycle(std::span<const ActivityEvent> events, double workday_h) {
  if (!(workday_h > 0.0)) throw InvalidParameter("duty_cycle: workday must be > 0 hours");
  double total_ms = 0.0;
  for (const auto& e : events) total_ms += static_cast<double>(e.duration_ms());
  return total_ms / (workday_h * 3'600'000.0);
}

EnergyMode parse_energy_mode(std::string_view s) {
  if (s == "activity") return EnergyMode::activity;
  if (s == "hybrid") return EnergyMode::hybrid;
  if (s == "continuous") return EnergyMode::continuous;
  throw InvalidParameter("energy mode must be activity, hybrid or continuous, got '" + std::string(s) + "'");
}

void EnergyModel::validate() const {
  if (!(activity_power_w > 0.0) || !(detector_power_w > 0.0) || !(detector_fps > 0.0) || cameras <= 0 ||
      !(workday_h > 0.0)) {
    throw InvalidParameter("energy model: all fields must be positive");
  }
}

double energy_estimate(const EnergyModel& m, EnergyMode mode, double events_per_camera) {
  m.validate();
  if (events_per_camera < 0.0) throw InvalidParameter("energy_estimate: events must be >= 0");
  const double activity = m.activity_power_w * m.workday_h;
  switch (mode) {
    case EnergyMode::activity:
      return activity;
    case EnergyMode::hybrid:
      return activity + m.cameras * events_per_camera * (1.0 / m.detector_fps) / 3600.0 * m.detector_power_w;
    case EnergyMode::continuous:
      return activity + m.cameras * m.detector_power_w * m.workday_h;
  }
  throw InvalidParameter("energy_estimate: invalid mode");
}

std::string energy_table_csv(const EnergyModel& single, const EnergyModel& network, double events_per_camera) {
  std::string out = "detection,cpus_single,gpus_single,energy_wh_single,cpus_network,gpus_network,energy_wh_network\n";
  struct Row {
    const char* name;
    EnergyMode mode;
    int gpus_single;
    int gpus_network;
  };
  const Row rows[] = {{"Activity", EnergyMode::activity, 0, 0},
                      {"Hybrid", EnergyMode::hybrid, 1, 1},
                      {"Object", EnergyMode::continuous, 1, network.cameras}};
  for (const auto& r : rows) {
    out += r.name;
    out += ",1," + std::to_string(r.gpus_single) + ',';
    detail::append_double(out, energy_estimate(single, r.mode, events_per_camera));
    out += ",1," + std::to_string(r.gpus_network) + ',';
    detail::append_double(out, energy_estimate(network, r.mode, events_per_camera));
    out += '\n';
  }
  return out;
}

std::string event_jsonl(const ActivityEvent& e) {
  nlohmann::ordered_json j;
  j["cam"] = e.camera_id;
  j["start_ms"] = e.start_ms;
  j["end_ms"] = e.end_ms;
  j["peak"] = e.peak;
  j["band"] = std::string(to_string(e.band));
  return j.dump();
}

}  // namespace actv
