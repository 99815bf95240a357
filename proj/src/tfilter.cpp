#include "actv/tfilter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "actv/error.hpp"
#include "actv/kernels.hpp"

namespace actv {

double alpha_from_decay(double rate_r, double duration_T) {
  if (!(rate_r > 0.0) || !(duration_T > 0.0) || !std::isfinite(rate_r) || !std::isfinite(duration_T)) {
    throw InvalidParameter("alpha_from_decay: rate and duration must be positive");
  }
  return std::pow(0.1, 1.0 / (rate_r * duration_T));
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidParameter("alpha must lie in [0, 1]");
}

void check_grid(const MotionFrame& state, const MotionFrame& input) {
  if (!state.same_grid(input) || state.blocks.size() != input.blocks.size()) {
    throw RejectedInput("filter input grid " + std::to_string(input.grid_w) + "x" + std::to_string(input.grid_h) +
                        " does not match state grid " + std::to_string(state.grid_w) + "x" +
                        std::to_string(state.grid_h));
  }
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : (a - b + 1) / b; }

}  // namespace

MotionBlock ema_step(const MotionBlock& state, const MotionBlock& input, double alpha) {
  check_alpha(alpha);
  const double beta = 1.0 - alpha;
  MotionBlock out;
  for (int c = 0; c < kBlockComponents; ++c) out.component(c) = alpha * state.component(c) + beta * input.component(c);
  return out;
}

MotionBlock highpass_step(const MotionBlock& state, const MotionBlock& input, double alpha) {
  const MotionBlock lp = ema_step(state, input, alpha);
  MotionBlock out;
  for (int c = 0; c < kBlockComponents; ++c) out.component(c) = std::max(0.0, input.component(c) - lp.component(c));
  return out;
}

double scalar_activity(const MotionFrame& m_S1, const MotionFrame& m_S2) {
  if (!m_S1.same_grid(m_S2) || m_S1.blocks.size() != m_S2.blocks.size()) {
    throw RejectedInput("scalar activity: band grids differ");
  }
  if (m_S1.blocks.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < m_S1.blocks.size(); ++k) s += std::max(m_S1.blocks[k].density, m_S2.blocks[k].density);
  return s / static_cast<double>(m_S1.blocks.size());
}

void BandParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter(std::string("bands.") + name + " must be > 0");
  };
  positive(T_L1, "T_L1");
  positive(T_L2, "T_L2");
  positive(T_S1, "T_S1");
  positive(T_S2, "T_S2");
  positive(frame_rate, "frame_rate");
  positive(shortterm_rate, "shortterm_rate");
  if (!(T_S1 > T_S2)) throw InvalidParameter("bands.T_S1 must exceed bands.T_S2");
  if (!(T_L1 > T_S1)) throw InvalidParameter("bands.T_L1 must exceed bands.T_S1");
  if (shortterm_rate > frame_rate) throw InvalidParameter("bands.shortterm_rate must not exceed frame_rate");
}

int BandParams::frames_per_update() const {
  return std::max(1, static_cast<int>(std::lround(frame_rate / shortterm_rate)));
}

int BandParams::fir_window() const {
  return std::max(1, static_cast<int>(std::ceil(shortterm_rate * T_S2 - 1e-9)));
}

namespace detail {

FirMean::FirMean(int window, int, int) : window_(window) {
  if (window <= 0) throw InvalidParameter("FIR window must be >= 1");
}

void FirMean::push(const MotionFrame& f) {
  if (static_cast<int>(ring_.size()) == window_) {
    MotionFrame recycled = std::move(ring_.front());
    ring_.pop_front();
    recycled.blocks = f.blocks;
    recycled.timestamp_ms = f.timestamp_ms;
    ring_.push_back(std::move(recycled));
  } else {
    ring_.push_back(f);
  }
}

void FirMean::mean_into(Exec exec, MotionFrame& out) const {
  if (ring_.empty()) {
    kernels::fill_zero(exec, out.blocks);
    return;
  }
  if (ring_.size() == 1) {
    out.blocks = ring_.front().blocks;
    return;
  }
  out.blocks = ring_.front().blocks;
  for (std::size_t i = 1; i < ring_.size(); ++i) kernels::accumulate(exec, out.blocks, ring_[i].blocks);
  kernels::scale_into(exec, out.blocks, 1.0 / static_cast<double>(ring_.size()), out.blocks);
}

MinuteFeed::MinuteFeed(int grid_w, int grid_h) : grid_w_(grid_w), grid_h_(grid_h) {}

void MinuteFeed::close_current() {
  const double inv = 1.0 / static_cast<double>(cur_.samples);
  kernels::scale_into(Exec::serial, cur_.mean.blocks, inv, cur_.mean.blocks);
  kernels::scale_into(Exec::serial, cur_.mean_sq.blocks, inv, cur_.mean_sq.blocks);
  cur_.activity_mean *= inv;
  cur_.activity_mean_sq *= inv;
  done_.push_back(std::move(cur_));
  open_ = false;
}

void MinuteFeed::add(Exec exec, const MotionFrame& u, double activity) {
  const std::int64_t minute = floor_div(u.timestamp_ms, kMsPerMinute);
  if (open_ && minute != cur_.minute_index) close_current();
  if (!open_) {
    cur_ = MinuteSample{};
    cur_.minute_index = minute;
    cur_.mean = MotionFrame::zeros(grid_w_, grid_h_, minute * kMsPerMinute);
    cur_.mean_sq = MotionFrame::zeros(grid_w_, grid_h_, minute * kMsPerMinute);
    open_ = true;
  }
  kernels::accumulate(exec, cur_.mean.blocks, u.blocks);
  kernels::accumulate_squares(exec, cur_.mean_sq.blocks, u.blocks);
  cur_.activity_mean += activity;
  cur_.activity_mean_sq += activity * activity;
  ++cur_.samples;
}

std::vector<MinuteSample> MinuteFeed::take_completed() {
  std::vector<MinuteSample> out;
  out.swap(done_);
  return out;
}

std::optional<MinuteSample> MinuteFeed::flush() {
  if (open_) close_current();
  if (done_.empty()) return std::nullopt;
  MinuteSample s = std::move(done_.back());
  done_.pop_back();
  return s;
}

}  // namespace detail

CascadeFilter::CascadeFilter(int grid_w, int grid_h, BandParams params, Exec exec)
    : params_(params),
      exec_(exec),
      alpha_L1_((params.validate(), params.alpha_L1())),
      alpha_S1_(params.alpha_S1()),
      frames_per_update_(params.frames_per_update()),
      lp_L1_(MotionFrame::zeros(grid_w, grid_h)),
      lp_S1_(MotionFrame::zeros(grid_w, grid_h)),
      down_acc_(MotionFrame::zeros(grid_w, grid_h)),
      u_(MotionFrame::zeros(grid_w, grid_h)),
      diff_(MotionFrame::zeros(grid_w, grid_h)),
      m_S2_(MotionFrame::zeros(grid_w, grid_h)),
      fir_S2_(params.fir_window(), grid_w, grid_h),
      feed_(grid_w, grid_h) {
  counters_.state_frames = 2;
}

BandOutputs CascadeFilter::step(const MotionFrame& input, std::int64_t tick) {
  BandOutputs out;
  step(input, tick, out);
  return out;
}

namespace {

void prepare(BandOutputs& out, const MotionFrame& input) {
  for (MotionFrame* f : {&out.m_L1, &out.m_S1, &out.m_S2}) {
    if (!f->same_grid(input) || f->blocks.size() != input.blocks.size()) {
      *f = MotionFrame::zeros(input.grid_w, input.grid_h);
    }
    f->timestamp_ms = input.timestamp_ms;
  }
  out.shortterm_updated = false;
}

}  // namespace

void CascadeFilter::step(const MotionFrame& input, std::int64_t tick, BandOutputs& out) {
  check_grid(lp_L1_, input);
  prepare(out, input);
  kernels::highpass_update(exec_, lp_L1_.blocks, input.blocks, alpha_L1_, out.m_L1.blocks);
  kernels::accumulate(exec_, down_acc_.blocks, out.m_L1.blocks);
  ++down_count_;

  if ((tick + 1) % frames_per_update_ == 0) {
    kernels::scale_into(exec_, down_acc_.blocks, 1.0 / down_count_, u_.blocks);
    u_.timestamp_ms = input.timestamp_ms;
    kernels::fill_zero(exec_, down_acc_.blocks);
    down_count_ = 0;

    kernels::ema_update(exec_, lp_S1_.blocks, u_.blocks, alpha_S1_);   // F_S1
    kernels::difference(exec_, u_.blocks, lp_S1_.blocks, diff_.blocks);  // band-pass high side reuses F_S1
    fir_S2_.push(diff_);
    fir_S2_.mean_into(exec_, m_S2_);                                     // F_S2
    kernels::clamp_nonneg(exec_, m_S2_.blocks);
    feed_.add(exec_, u_, scalar_activity(lp_S1_, m_S2_));                // isochronal feed (F_L2 input)

    counters_.multiplies += 4;
    ++counters_.full_ticks;
    out.shortterm_updated = true;
  }
  out.m_S1.blocks = lp_S1_.blocks;
  out.m_S2.blocks = m_S2_.blocks;
}

ReferenceFilter::ReferenceFilter(int grid_w, int grid_h, BandParams params, Exec exec)
    : params_(params),
      exec_(exec),
      alpha_L1_((params.validate(), params.alpha_L1())),
      alpha_S1_(params.alpha_S1()),
      frames_per_update_(params.frames_per_update()),
      lp_L1_(MotionFrame::zeros(grid_w, grid_h)),
      lp_inplace_(MotionFrame::zeros(grid_w, grid_h)),
      lp_bandpass_(MotionFrame::zeros(grid_w, grid_h)),
      down_acc_(MotionFrame::zeros(grid_w, grid_h)),
      u_(MotionFrame::zeros(grid_w, grid_h)),
      diff_(MotionFrame::zeros(grid_w, grid_h)),
      m_S1_(MotionFrame::zeros(grid_w, grid_h)),
      m_S2_(MotionFrame::zeros(grid_w, grid_h)),
      fir_S2_(params.fir_window(), grid_w, grid_h),
      feed_(grid_w, grid_h) {
  counters_.state_frames = 3;
}

BandOutputs ReferenceFilter::step(const MotionFrame& input, std::int64_t tick) {
  BandOutputs out;
  step(input, tick, out);
  return out;
}

void ReferenceFilter::step(const MotionFrame& input, std::int64_t tick, BandOutputs& out) {
  check_grid(lp_L1_, input);
  prepare(out, input);
  kernels::highpass_update(exec_, lp_L1_.blocks, input.blocks, alpha_L1_, out.m_L1.blocks);
  kernels::accumulate(exec_, down_acc_.blocks, out.m_L1.blocks);
  ++down_count_;

  if ((tick + 1) % frames_per_update_ == 0) {
    kernels::scale_into(exec_, down_acc_.blocks, 1.0 / down_count_, u_.blocks);
    u_.timestamp_ms = input.timestamp_ms;
    kernels::fill_zero(exec_, down_acc_.blocks);
    down_count_ = 0;

    // in-place band
    kernels::ema_update(exec_, lp_inplace_.blocks, u_.blocks, alpha_S1_);
    m_S1_.blocks = lp_inplace_.blocks;
    // band-pass: independent T_S1 high-pass, then the F_S2 low side
    kernels::ema_update(exec_, lp_bandpass_.blocks, u_.blocks, alpha_S1_);
    kernels::difference(exec_, u_.blocks, lp_bandpass_.blocks, diff_.blocks);
    fir_S2_.push(diff_);
    fir_S2_.mean_into(exec_, m_S2_);
    kernels::clamp_nonneg(exec_, m_S2_.blocks);
    feed_.add(exec_, u_, scalar_activity(m_S1_, m_S2_));

    counters_.multiplies += 5;
    ++counters_.full_ticks;
    out.shortterm_updated = true;
  }
  out.m_S1.blocks = m_S1_.blocks;
  out.m_S2.blocks = m_S2_.blocks;
}

}  // namespace actv
