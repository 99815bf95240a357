#include <doctest.h>

#include <numeric>

#include "actv/error.hpp"
#include "actv/sim.hpp"

using namespace actv;

namespace {

Scenario small(double events_per_day = 6) {
  Scenario s;
  s.grid_w = 6;
  s.grid_h = 4;
  s.frame_rate = 2;
  s.start_hour = 9;
  s.day_hours = 0.5;
  s.events_per_day = events_per_day;
  s.exact_event_count = true;
  s.seed = 11;
  return s;
}

double truth_mass(const GroundTruth& g) {
  double m = 0;
  for (const auto& row : g.minute_block_activity) m += std::accumulate(row.begin(), row.end(), 0.0);
  return m;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("office profile shape") {
    const auto p = gen_daily_profile("office");
    REQUIRE(p.size() == 1440);
    for (int m = 0; m <= 360; ++m) CHECK(p[m] == 0.0);
    for (int m = 1260; m < 1440; ++m) CHECK(p[m] == 0.0);
    CHECK(p[750] < p[660]);
    CHECK(p[750] < p[810]);
    const auto peak = std::max_element(p.begin(), p.end()) - p.begin();
    CHECK(peak == 990);
    for (double v : p) CHECK(v >= 0.0);
  }

  TEST_CASE("university profile peaks on the hour") {
    const auto p = gen_daily_profile("university");
    for (int h = 9; h <= 17; ++h) {
      CHECK(p[60 * h] > p[60 * h + 30]);
      CHECK(p[60 * h] > p[60 * h - 30]);
    }
    CHECK(p[300] == 0.0);
    CHECK(p[1200] == 0.0);
  }

  TEST_CASE("profile level scales and zero level gives silence") {
    const auto a = gen_daily_profile("office", 1.0);
    const auto b = gen_daily_profile("office", 3.0);
    for (int m = 0; m < 1440; ++m) CHECK(b[m] == doctest::Approx(3.0 * a[m]));
    for (double v : gen_daily_profile("flat", 0.0)) CHECK(v == 0.0);
    CHECK_THROWS_AS(gen_daily_profile("mall"), InvalidParameter);
    CHECK_THROWS_AS(gen_daily_profile("flat", -1.0), InvalidParameter);
  }

  TEST_CASE("stream is deterministic under a fixed seed") {
    const auto a = gen_stream(small(), 2);
    const auto b = gen_stream(small(), 2);
    CHECK(a.frames == b.frames);
    CHECK(a.truth.to_json() == b.truth.to_json());
    auto other = small();
    other.seed = 12;
    CHECK(gen_stream(other, 2).frames != a.frames);
  }

  TEST_CASE("frame count and timestamps") {
    const auto s = small();
    const auto fs = gen_stream(s, 2);
    REQUIRE(fs.frames.size() == 2u * 3600u);
    CHECK(fs.frames.front().timestamp_ms == 9 * 3'600'000LL);
    CHECK(fs.frames[1].timestamp_ms - fs.frames[0].timestamp_ms == 500);
    CHECK(fs.frames[3600].timestamp_ms == 86'400'000LL + 9 * 3'600'000LL);
  }

  TEST_CASE("zero intensity and no noise give an all-zero stream") {
    auto s = small(0);
    s.noise_sigma = 0;
    const auto fs = gen_stream(s, 1);
    for (const auto& f : fs.frames) CHECK(f.mean_density() == 0.0);
    CHECK(fs.truth.events.empty());
    CHECK(truth_mass(fs.truth) == 0.0);
  }

  TEST_CASE("planted events match the noise-free frames") {
    auto s = small();
    s.noise_sigma = 0;
    const auto fs = gen_stream(s, 1);
    REQUIRE(fs.truth.events.size() == 6);
    for (std::size_t i = 1; i < fs.truth.events.size(); ++i) {
      CHECK(fs.truth.events[i].start_ms - fs.truth.events[i - 1].end_ms >= 20'000);
    }
    for (const auto& f : fs.frames) {
      bool inside = false;
      for (const auto& e : fs.truth.events) inside |= f.timestamp_ms >= e.start_ms && f.timestamp_ms < e.end_ms;
      CHECK((f.mean_density() > 0.0) == inside);
      if (inside) CHECK(f.mean_density() == doctest::Approx(1.0 / 24));
    }
    // corridor along the middle row
    for (int bx = 0; bx < 6; ++bx) {
      CHECK(fs.truth.walkable[2 * 6 + bx] == 1);
      CHECK(fs.truth.labels[2 * 6 + bx] == BlockLabel::moving);
      CHECK(fs.truth.walkable[bx] == 0);
    }
  }

  TEST_CASE("planted mass is linear in event density") {
    auto s = small();
    const double m1 = truth_mass(gen_stream(s, 1).truth);
    s.event_density = 2.5;
    const double m2 = truth_mass(gen_stream(s, 1).truth);
    CHECK(m1 > 0.0);
    CHECK(m2 == doctest::Approx(2.5 * m1).epsilon(1e-6));
  }

  TEST_CASE("dwellers are labelled in place") {
    auto s = small(0);
    s.noise_sigma = 0;
    s.dwellers.push_back({1, 1, 60, 30, 1.0});
    const auto fs = gen_stream(s, 1);
    CHECK(fs.truth.labels[1 * 6 + 1] == BlockLabel::in_place);
    for (const auto& f : fs.frames) {
      const double t = (f.timestamp_ms - 9 * 3'600'000LL) / 1000.0;
      const bool on = t >= 60 && t < 90;
      CHECK((f.at(1, 1).density > 0.0) == on);
      if (on) CHECK(f.at(1, 1).density == doctest::Approx(1.0).epsilon(0.2));
    }
  }

  TEST_CASE("ground truth json round-trips") {
    const auto fs = gen_stream(small(), 1);
    const auto back = ground_truth_from_json(fs.truth.to_json());
    CHECK(back.grid_w == fs.truth.grid_w);
    CHECK(back.events.size() == fs.truth.events.size());
    CHECK(back.walkable == fs.truth.walkable);
    CHECK(back.labels == fs.truth.labels);
    for (std::size_t i = 0; i < back.minute_index.size(); ++i) {
      auto it = std::find(fs.truth.minute_index.begin(), fs.truth.minute_index.end(), back.minute_index[i]);
      REQUIRE(it != fs.truth.minute_index.end());
      CHECK(back.minute_block_activity[i] == fs.truth.minute_block_activity[it - fs.truth.minute_index.begin()]);
    }
    CHECK_THROWS_AS(ground_truth_from_json(nlohmann::json::object()), InvalidParameter);
  }

  TEST_CASE("scenario json round-trips and rejects unknown keys") {
    auto s = small();
    s.walkers.push_back({{{0, 0.5}, {6, 0.5}}, 2.0, 1.0, 5, 60, -1});
    s.dwellers.push_back({2, 3, 10, 20, 0.5});
    const auto j = scenario_to_json(s);
    CHECK(scenario_to_json(scenario_from_json(j)) == j);
    auto bad = j;
    bad["speed"] = 1;
    CHECK_THROWS_AS(scenario_from_json(bad), InvalidParameter);
  }

  TEST_CASE("invalid scenarios are rejected") {
    auto s = small();
    s.frame_rate = 0;
    CHECK_THROWS_AS(gen_stream(s, 1), InvalidParameter);
    s = small();
    s.start_hour = 20;
    s.day_hours = 6;
    CHECK_THROWS_AS(gen_stream(s, 1), InvalidParameter);
    s = small();
    s.dwellers.push_back({9, 0, 0, 1, 1});
    CHECK_THROWS_AS(gen_stream(s, 1), InvalidParameter);
    CHECK_THROWS_AS(gen_stream(small(), 0), InvalidParameter);
  }

  TEST_CASE("pixel mode renders movers") {
    auto s = small();
    s.block_size = 8;
    StreamGenerator gen(s, 1);
    GrayFrame g;
    int lit = 0;
    while (gen.next_pixels(g)) {
      CHECK(g.width == 48);
      CHECK(g.height == 32);
      lit += std::any_of(g.pixels.begin(), g.pixels.end(), [](auto p) { return p > 0; });
    }
    // 6 events x 10 s x 2 fps
    CHECK(lit == doctest::Approx(120).epsilon(0.05));
  }
}
