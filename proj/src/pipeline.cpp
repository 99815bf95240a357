#include "actv/pipeline.hpp"

namespace actv {

ActivityPipeline::ActivityPipeline(IsochronalStore& store, BandParams bands, GateParams gate, Exec exec,
                                   const DetectorStub* detector)
    : store_(store),
      filter_(store.grid_w(), store.grid_h(), bands, exec),
      gate_(store.camera_id(), gate),
      detector_(detector) {}

void ActivityPipeline::apply(const MinuteSample& s) {
  store_.update(s.minute_of_day(), s);
  ++minute_updates_;
  if (s.minute_index == stats_minute_) stats_minute_ = INT64_MIN;
}

const ActivityStats& ActivityPipeline::stats_for(std::int64_t timestamp_ms) {
  const std::int64_t minute = timestamp_ms >= 0 ? timestamp_ms / kMsPerMinute : (timestamp_ms - kMsPerMinute + 1) / kMsPerMinute;
  if (minute != stats_minute_) {
    const int slot = static_cast<int>(((minute % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay);
    stats_ = activity_stats(store_.query(slot));
    stats_minute_ = minute;
  }
  return stats_;
}

void ActivityPipeline::step(const MotionFrame& frame, std::int64_t tick) {
  filter_.step(frame, tick, out_);
  ++run_.frames_processed;
  if (!out_.shortterm_updated) return;
  if (learning_) {
    for (const auto& s : filter_.take_minute_samples()) apply(s);
  } else {
    filter_.take_minute_samples();
  }
  if (!gating_) return;
  const GateDecision d = gate_.detect(out_.m_S1, out_.m_S2, stats_for(out_.m_S1.timestamp_ms));
  if (d.invoke) {
    ++run_.detector_invocations;
    if (detector_) {
      for (auto v : detector_->detect(out_.m_S1.timestamp_ms)) run_.persons_reported += v;
    }
  }
}

void ActivityPipeline::finish() {
  if (learning_) {
    for (const auto& s : filter_.take_minute_samples()) apply(s);
    if (auto s = filter_.flush_minute_sample()) apply(*s);
  }
  gate_.finish();
  run_.events = gate_.log();
}

}  // namespace actv
