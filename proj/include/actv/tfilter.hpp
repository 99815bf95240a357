#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "actv/exec.hpp"
#include "actv/motion.hpp"

namespace actv {

// alpha = 0.1^(1 / (rate_r * duration_T)): the coefficient whose zero-input
// response falls to 10% after rate_r * duration_T samples.
double alpha_from_decay(double rate_r, double duration_T);

struct DecaySpec {
  double rate_r = 1.0;
  double duration_T = 1.0;

  double alpha() const { return alpha_from_decay(rate_r, duration_T); }
  double samples() const { return rate_r * duration_T; }
};

// b' = alpha * b'_prev + (1 - alpha) * b, component-wise.
MotionBlock ema_step(const MotionBlock& state, const MotionBlock& input, double alpha);

// max(0, input - ema_step(state, input, alpha)), component-wise.
MotionBlock highpass_step(const MotionBlock& state, const MotionBlock& input, double alpha);

// Time constants of the four filter bands. T_L2 is in days, the rest in seconds.
struct BandParams {
  double T_L1 = 1800.0;
  double T_L2 = 10.0;
  double T_S1 = 20.0;
  double T_S2 = 1.0;
  double frame_rate = 30.0;
  double shortterm_rate = 1.0;

  void validate() const;
  double alpha_L1() const { return alpha_from_decay(frame_rate, T_L1); }
  double alpha_L2() const { return alpha_from_decay(1.0, T_L2); }
  double alpha_S1() const { return alpha_from_decay(shortterm_rate, T_S1); }
  // Frame-rate ticks averaged into one short-term update.
  int frames_per_update() const;
  // FIR window length in short-term samples, ceil(shortterm_rate * T_S2).
  int fir_window() const;
};

// Per-block max of the two short-term bands, averaged over blocks: the
// scalar signal the event gate thresholds.
double scalar_activity(const MotionFrame& m_S1, const MotionFrame& m_S2);

struct BandOutputs {
  MotionFrame m_L1;  // frame-rate, stationary noise removed
  MotionFrame m_S1;  // short-term in-place
  MotionFrame m_S2;  // short-term moving
  bool shortterm_updated = false;
};

// Operation accounting. One multiply = one filter application to a full
// motion frame, counted per fully-updated (short-term) tick. state_frames is
// the number of persistent MotionFrame-shaped IIR memories; the isochronal
// store, the FIR window and the down-sampling accumulator are shared by both
// implementations and not counted.
struct FilterCounters {
  std::uint64_t multiplies = 0;
  std::uint64_t full_ticks = 0;
  int state_frames = 0;
};

// Per-minute aggregate of the short-term-rate M_L1 signal; the input of the
// daily isochronal update. The activity moments describe the gated scalar
// signal (scalar_activity of the short-term bands) over the same minute.
struct MinuteSample {
  std::int64_t minute_index = 0;  // absolute minutes since stream epoch
  int samples = 0;
  MotionFrame mean;
  MotionFrame mean_sq;
  double activity_mean = 0.0;
  double activity_mean_sq = 0.0;

  int minute_of_day() const { return static_cast<int>(((minute_index % 1440) + 1440) % 1440); }
  std::int64_t day() const { return minute_index >= 0 ? minute_index / 1440 : (minute_index - 1439) / 1440; }
};

namespace detail {

// Ring buffer FIR mean over the last `window` frames.
class FirMean {
 public:
  FirMean(int window, int grid_w, int grid_h);
  void push(const MotionFrame& f);
  // Mean of the buffered frames, oldest to newest, into out.
  void mean_into(Exec exec, MotionFrame& out) const;
  int window() const { return window_; }
  int filled() const { return static_cast<int>(ring_.size()); }

 private:
  int window_;
  std::deque<MotionFrame> ring_;
};

// Running per-minute mean and mean-square of the short-term samples.
class MinuteFeed {
 public:
  MinuteFeed(int grid_w, int grid_h);
  void add(Exec exec, const MotionFrame& u, double activity);
  std::vector<MinuteSample> take_completed();
  std::optional<MinuteSample> flush();

 private:
  void close_current();

  int grid_w_;
  int grid_h_;
  bool open_ = false;
  MinuteSample cur_;
  std::vector<MinuteSample> done_;
};

}  // namespace detail

// Cascade filter: F_L1 high-pass at frame rate, then at each short-term tick
// F_S1 low-pass, the band-pass reusing F_S1's output, the F_S2 FIR mean, and
// the isochronal minute feed. 4 filter applications, 2 IIR memories.
class CascadeFilter {
 public:
  CascadeFilter(int grid_w, int grid_h, BandParams params, Exec exec = Exec::parallel);

  // `tick` is the chronological frame index; short-term stages update when
  // (tick + 1) is a multiple of frames_per_update().
  BandOutputs step(const MotionFrame& input, std::int64_t tick);
  // Same as step(), reusing the frames already held by `out`.
  void step(const MotionFrame& input, std::int64_t tick, BandOutputs& out);

  const FilterCounters& counters() const { return counters_; }
  const BandParams& params() const { return params_; }
  std::vector<MinuteSample> take_minute_samples() { return feed_.take_completed(); }
  std::optional<MinuteSample> flush_minute_sample() { return feed_.flush(); }

 private:
  BandParams params_;
  Exec exec_;
  double alpha_L1_;
  double alpha_S1_;
  int frames_per_update_;
  MotionFrame lp_L1_;
  MotionFrame lp_S1_;
  MotionFrame down_acc_;
  int down_count_ = 0;
  MotionFrame u_;
  MotionFrame diff_;
  MotionFrame m_S2_;
  detail::FirMean fir_S2_;
  detail::MinuteFeed feed_;
  FilterCounters counters_;
};

// Non-cascaded filter computing the same bands with five independent filter
// applications: the band-pass keeps its own T_S1 low-pass memory instead of
// reusing the in-place band. 5 filter applications, 3 IIR memories.
class ReferenceFilter {
 public:
  ReferenceFilter(int grid_w, int grid_h, BandParams params, Exec exec = Exec::serial);

  BandOutputs step(const MotionFrame& input, std::int64_t tick);
  void step(const MotionFrame& input, std::int64_t tick, BandOutputs& out);

  const FilterCounters& counters() const { return counters_; }
  std::vector<MinuteSample> take_minute_samples() { return feed_.take_completed(); }
  std::optional<MinuteSample> flush_minute_sample() { return feed_.flush(); }

 private:
  BandParams params_;
  Exec exec_;
  double alpha_L1_;
  double alpha_S1_;
  int frames_per_update_;
  MotionFrame lp_L1_;
  MotionFrame lp_inplace_;
  MotionFrame lp_bandpass_;
  MotionFrame down_acc_;
  int down_count_ = 0;
  MotionFrame u_;
  MotionFrame diff_;
  MotionFrame m_S1_;
  MotionFrame m_S2_;
  detail::FirMean fir_S2_;
  detail::MinuteFeed feed_;
  FilterCounters counters_;
};

}  // namespace actv
