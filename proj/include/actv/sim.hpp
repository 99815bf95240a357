#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "actv/motion.hpp"

namespace actv {

// 1440-sample non-negative intensity over minutes of the day.
// Templates: "flat" (constant level), "office" (rise from 06:00, mid-day
// lull near 12:30, peak 16:30, zero by 21:00), "university" (hourly peaks
// 08:00-18:00 over a low base).
std::vector<double> gen_daily_profile(std::string_view template_name, double level = 1.0);

// Polyline in block coordinates; block (bx, by) spans [bx, bx+1) x [by, by+1).
using BlockPath = std::vector<std::pair<double, double>>;

struct WalkerSpec {
  BlockPath path;
  double speed_bps = 1.0;   // blocks per second
  double density = 1.0;     // deposited per frame while in a block
  double start_s = 0.0;     // seconds after the daily window opens
  double period_s = 0.0;    // 0 = single traversal per day
  double end_s = -1.0;      // < 0 = until the window closes
};

struct DwellerSpec {
  int bx = 0;
  int by = 0;
  double start_s = 0.0;
  double duration_s = 60.0;
  double density = 1.0;
};

struct Scenario {
  int grid_w = 8;
  int grid_h = 8;
  double frame_rate = 30.0;
  double start_hour = 0.0;   // daily window opens at this clock hour
  double day_hours = 24.0;   // simulated hours per day
  std::string profile = "flat";
  double profile_level = 1.0;
  double events_per_day = 0.0;  // expected planted events per day (scaled by profile_level)
  bool exact_event_count = false;
  double event_duration_s = 10.0;
  double min_event_gap_s = 20.0;  // between events on the same path
  double event_density = 1.0;
  std::vector<BlockPath> event_paths;  // empty = corridor along the middle row
  std::vector<WalkerSpec> walkers;
  std::vector<DwellerSpec> dwellers;
  double noise_sigma = 0.02;
  int block_size = 16;  // pixel mode only
  std::uint64_t seed = 1;

  void validate() const;
  std::vector<BlockPath> effective_event_paths() const;
  std::int64_t frames_per_day() const;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

enum class BlockLabel : std::uint8_t { none = 0, moving = 1, in_place = 2 };

struct PlantedEvent {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  int path = 0;
};

struct GroundTruth {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<PlantedEvent> events;
  std::vector<std::uint8_t> walkable;          // blocks on any walker or event path
  std::vector<BlockLabel> labels;              // per block
  std::vector<std::int64_t> minute_index;      // absolute minute of each row below
  std::vector<std::vector<float>> minute_block_activity;  // planted (noise-free) mean density

  // Rows of minute_block_activity are written only when some block is nonzero.
  nlohmann::json to_json() const;
};
GroundTruth ground_truth_from_json(const nlohmann::json& j);

// Deterministic frame-by-frame generator. Feature mode emits MotionFrames
// directly; pixel mode renders bright discs into GrayFrames so the motion
// detector is exercised.
class StreamGenerator {
 public:
  StreamGenerator(Scenario scenario, int days);

  bool next(MotionFrame& out);
  bool next_pixels(GrayFrame& out);

  std::int64_t tick() const { return tick_; }
  std::int64_t total_frames() const { return frames_per_day_ * days_; }
  const Scenario& scenario() const { return sc_; }
  // Complete once the stream is exhausted; minute rows fill in as frames are emitted.
  const GroundTruth& ground_truth() const { return gt_; }

 private:
  struct Traversal {
    const BlockPath* path;
    double t0_s;  // absolute seconds since stream start
    double speed_bps;
    double density;
    double length;
  };
  struct Position {
    double x, y;
    int dir_bin;
  };

  void schedule_day(int day);
  bool position_at(const Traversal& tr, double t_s, Position& pos) const;
  std::int64_t timestamp_ms(std::int64_t tick) const;
  void sort_pending();
  void advance_active(double t_s);
  void deposit_actors(double t_s, MotionFrame& f, int day);
  void record_minute(const MotionFrame& planted);

  Scenario sc_;
  int days_;
  std::int64_t frames_per_day_;
  std::vector<BlockPath> event_paths_;
  std::vector<double> profile_;
  std::int64_t tick_ = 0;
  int scheduled_day_ = -1;
  std::vector<Traversal> traversals_;  // sorted by t0_s
  std::size_t next_traversal_ = 0;
  std::vector<std::size_t> active_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 pixel_rng_;
  GroundTruth gt_;
  std::int64_t cur_minute_ = INT64_MIN;
  std::vector<double> minute_acc_;
  int minute_frames_ = 0;
};

struct FeatureStream {
  std::vector<MotionFrame> frames;
  GroundTruth truth;
};

// Materializes the whole stream; for long runs iterate StreamGenerator instead.
FeatureStream gen_stream(const Scenario& scenario, int days);

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace actv
