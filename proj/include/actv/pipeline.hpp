#pragma once

#include <cstdint>
#include <vector>

#include "actv/events.hpp"
#include "actv/isochron.hpp"
#include "actv/tfilter.hpp"

namespace actv {

// Streaming composition of the cascade filter, the isochronal store and the
// event gate. Learning feeds completed minutes into the store; gating runs the
// detector on every short-term tick against the store's current statistics.
class ActivityPipeline {
 public:
  ActivityPipeline(IsochronalStore& store, BandParams bands, GateParams gate, Exec exec = Exec::parallel,
                   const DetectorStub* detector = nullptr);

  void set_learning(bool on) { learning_ = on; }
  void set_gating(bool on) { gating_ = on; }

  // `tick` is the chronological frame index.
  void step(const MotionFrame& frame, std::int64_t tick);
  // Flushes the partial minute (when learning) and closes any open event.
  void finish();

  const BandOutputs& bands() const { return out_; }
  const CascadeFilter& filter() const { return filter_; }
  const GateRun& run() const { return run_; }
  const std::vector<ActivityEvent>& events() const { return gate_.log(); }
  std::uint64_t minute_updates() const { return minute_updates_; }

 private:
  void apply(const MinuteSample& s);
  const ActivityStats& stats_for(std::int64_t timestamp_ms);

  IsochronalStore& store_;
  CascadeFilter filter_;
  EventGate gate_;
  const DetectorStub* detector_;
  bool learning_ = true;
  bool gating_ = false;
  BandOutputs out_;
  GateRun run_;
  std::uint64_t minute_updates_ = 0;
  std::int64_t stats_minute_ = INT64_MIN;
  ActivityStats stats_;
};

}  // namespace actv
