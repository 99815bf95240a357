#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actv/motion.hpp"
#include "actv/tfilter.hpp"

namespace actv {

inline constexpr int kMinutesPerDay = 1440;

struct SlotSnapshot {
  MotionFrame mean;
  MotionFrame std;
  std::uint32_t days_observed = 0;
  double activity_mean = 0.0;
  double activity_std = 0.0;
};

// Per-block flag: 1 where the stored mean density ever exceeds epsilon.
struct BinaryProfile {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<std::uint8_t> flags;

  bool at(int bx, int by) const { return flags[static_cast<std::size_t>(by) * grid_w + bx] != 0; }
  bool any() const;
  bool operator==(const BinaryProfile&) const = default;
};

// Long-term store: one slot per minute of day holding the F_L2-filtered mean
// motion frame and a running variance, updated once per day per slot. Each
// slot also tracks the same statistics for the scalar gate activity.
class IsochronalStore {
 public:
  IsochronalStore(std::string camera_id, int grid_w, int grid_h, double alpha_L2);

  // Mean follows b' = a b'_prev + (1 - a) b; the first observation of a slot
  // initializes it. Variance is an EMA (same alpha) of the squared deviation
  // of the sample from the new mean. The MinuteSample overload includes the
  // within-minute spread through its mean-square frame. The MotionFrame
  // overload uses the frame's mean density as the scalar activity.
  void update(int minute, const MotionFrame& sample);
  void update(int minute, const MinuteSample& sample);

  SlotSnapshot query(int minute) const;
  BinaryProfile binarize(double epsilon) const;

  const std::string& camera_id() const { return camera_id_; }
  int grid_w() const { return grid_w_; }
  int grid_h() const { return grid_h_; }
  double alpha() const { return alpha_; }
  std::uint32_t days_observed(int minute) const;
  const MotionFrame& mean(int minute) const;
  const MotionFrame& variance(int minute) const;
  double activity_mean(int minute) const;
  double activity_variance(int minute) const;

  // Binary layout, little-endian:
  //   "ISO1" | u16 version | u16 id_len | id utf-8 | u16 grid_w | u16 grid_h |
  //   f64 alpha | 1440 x (mean K*9 f64, var K*9 f64, activity mean f64,
  //   activity var f64, u32 days) | u32 crc32
  std::string serialize() const;
  static IsochronalStore deserialize(const std::string& bytes);
  void persist(const std::filesystem::path& path) const;
  static IsochronalStore load(const std::filesystem::path& path);

  bool operator==(const IsochronalStore&) const = default;

 private:
  void check_minute(int minute) const;
  void check_grid(const MotionFrame& f) const;
  void apply(int minute, const MotionFrame& x, const MotionFrame* mean_sq, double act, double act_sq);

  std::string camera_id_;
  int grid_w_;
  int grid_h_;
  double alpha_;
  std::vector<MotionFrame> means_;
  std::vector<MotionFrame> vars_;
  std::vector<double> act_means_;
  std::vector<double> act_vars_;
  std::vector<std::uint32_t> days_;
};

inline constexpr std::uint16_t kStoreVersion = 1;

// Scalar activity statistics used for event thresholds and profile export.
struct ActivityStats {
  double mean = 0.0;
  double std = 0.0;
  std::uint32_t days_observed = 0;
};
ActivityStats activity_stats(const SlotSnapshot& slot);

// CSV: minute,mean_activity,std_activity
std::string profile_csv(const IsochronalStore& store);

}  // namespace actv
