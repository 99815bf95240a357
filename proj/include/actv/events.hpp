#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actv/isochron.hpp"
#include "actv/motion.hpp"
#include "actv/sim.hpp"

namespace actv {

enum class TriggerBand { in_place, moving, both };
std::string_view to_string(TriggerBand b);

struct ActivityEvent {
  std::string camera_id;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = -1;  // exclusive; -1 while open
  double peak = 0.0;
  TriggerBand band = TriggerBand::both;
  double mean = 0.0;  // threshold context at trigger time
  double std = 0.0;
  double k_sigma = 0.0;
  double threshold = 0.0;

  bool closed() const { return end_ms >= 0; }
  std::int64_t duration_ms() const { return closed() ? end_ms - start_ms : 0; }
};

struct GateParams {
  double k_sigma = 2.0;
  double cooldown_s = 3.0;
  double min_threshold = 0.012;    // used while the slot has fewer than min_days observations
  std::uint32_t min_days = 3;
  double reinvoke_every_s = 0.0;   // 0 = one detector call per event
  double tick_s = 1.0;             // short-term sample period

  void validate() const;
};

struct GateDecision {
  bool fire = false;
  double activity = 0.0;
  double threshold = 0.0;
  bool opened = false;   // this decision opened a new event
  bool invoke = false;   // the expensive detector should run on this frame
};

// Single-writer event detector with hysteresis: an event opens on the first
// firing decision and closes after `cooldown` consecutive non-firing ones.
class EventGate {
 public:
  EventGate(std::string camera_id, GateParams params);

  GateDecision detect(const MotionFrame& m_S1, const MotionFrame& m_S2, const ActivityStats& stats);
  // Closes any open event at its last firing tick.
  void finish();

  const std::vector<ActivityEvent>& log() const { return log_; }
  bool event_open() const { return open_; }

 private:
  void close();

  std::string camera_id_;
  GateParams params_;
  int cooldown_ticks_;
  std::int64_t tick_ms_;
  bool open_ = false;
  int quiet_ticks_ = 0;
  std::int64_t last_fire_ms_ = 0;
  std::int64_t last_invoke_ms_ = 0;
  std::vector<ActivityEvent> log_;
};

// Stand-in for an expensive object detector. Returns the blocks with planted
// activity in the ground truth minute when a truth is attached, else nothing.
class DetectorStub {
 public:
  explicit DetectorStub(const GroundTruth* truth = nullptr) : truth_(truth) {}
  std::vector<std::uint8_t> detect(std::int64_t timestamp_ms) const;

 private:
  const GroundTruth* truth_;
};

struct BandSample {
  MotionFrame m_S1;
  MotionFrame m_S2;
};

struct GateRun {
  std::vector<ActivityEvent> events;
  std::uint64_t detector_invocations = 0;
  std::uint64_t frames_processed = 0;
  std::uint64_t persons_reported = 0;
};

GateRun gate_pipeline(std::span<const BandSample> stream, const IsochronalStore& store, const DetectorStub& detector,
                      const GateParams& params);

// Sum of event durations over the workday.
double duty_cycle(std::span<const ActivityEvent> events, double workday_h);

enum class EnergyMode { activity, hybrid, continuous };
EnergyMode parse_energy_mode(std::string_view s);

struct EnergyModel {
  double activity_power_w = 50.0;
  double detector_power_w = 153.0;
  double detector_fps = 14.79;
  int cameras = 1;
  double workday_h = 10.0;

  void validate() const;
};

// Watt-hours per workday.
double energy_estimate(const EnergyModel& model, EnergyMode mode, double events_per_camera);

// Activity/Hybrid/Object rows for a single-camera and a multi-camera model.
std::string energy_table_csv(const EnergyModel& single, const EnergyModel& network, double events_per_camera);

std::string event_jsonl(const ActivityEvent& e);

}  // namespace actv
