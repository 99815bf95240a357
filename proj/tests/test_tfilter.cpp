#include <doctest.h>

#include "actv/error.hpp"
#include "actv/tfilter.hpp"
#include "oracles.hpp"

using namespace actv;

TEST_SUITE("tfilter") {
  TEST_CASE("alpha for the in-place band rounds to 0.89") {
    CHECK(std::abs(alpha_from_decay(1.0, 20.0) - 0.89) < 5e-3);
    CHECK(std::abs(alpha_from_decay(1.0, 20.0) - 0.8913) < 5e-4);
  }

  TEST_CASE("alpha agrees with the log10 form") {
    for (double r : {0.5, 1.0, 30.0}) {
      for (double T : {1.0, 20.0, 1800.0}) CHECK(alpha_from_decay(r, T) == doctest::Approx(oracle::alpha(r, T)).epsilon(1e-14));
    }
  }

  TEST_CASE("long-term coefficients follow the formula") {
    BandParams p;
    // 54000 frame samples for the high-pass, 10 daily samples for the store
    CHECK(std::abs(p.alpha_L1() - 0.999957) < 5e-7);
    CHECK(std::abs(p.alpha_L2() - 0.794328) < 5e-7);
    CHECK(std::abs(p.alpha_S1() - 0.891251) < 5e-7);
  }

  TEST_CASE("zero-input response falls to 10% after rT samples") {
    for (auto [r, T] : {std::pair{1.0, 10.0}, {1.0, 20.0}, {30.0, 60.0}, {2.0, 5.0}}) {
      const double a = alpha_from_decay(r, T);
      double b = 1.0;
      const int n = static_cast<int>(std::lround(r * T));
      for (int i = 0; i < n; ++i) b = oracle::ema(b, 0.0, a);
      CHECK(b == doctest::Approx(0.1).epsilon(1e-9));
    }
  }

  TEST_CASE("alpha rejects non-positive rate or duration") {
    CHECK_THROWS_AS(alpha_from_decay(0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(alpha_from_decay(1.0, -2.0), InvalidParameter);
    CHECK_THROWS_AS(alpha_from_decay(std::nan(""), 1.0), InvalidParameter);
  }

  TEST_CASE("ema_step and highpass_step act per component") {
    MotionBlock s, x;
    s.density = 2.0;
    x.density = 4.0;
    s.dir_hist[3] = 1.0;
    x.dir_hist[3] = 0.0;
    const auto y = ema_step(s, x, 0.5);
    CHECK(y.density == 3.0);
    CHECK(y.dir_hist[3] == 0.5);
    const auto h = highpass_step(s, x, 0.5);
    CHECK(h.density == 1.0);
    CHECK(h.dir_hist[3] == 0.0);
    CHECK_THROWS_AS(ema_step(s, x, 1.5), InvalidParameter);
  }

  TEST_CASE("high-pass impulse from rest leaves alpha times the input") {
    MotionBlock rest, in;
    in.density = 3.0;
    const double a = 0.8;
    CHECK(highpass_step(rest, in, a).density == doctest::Approx(a * 3.0).epsilon(1e-15));
  }

  TEST_CASE("band parameter validation") {
    BandParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.frames_per_update() == 30);
    CHECK(p.fir_window() == 1);
    p.T_S2 = 25.0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = BandParams{};
    p.T_L1 = 10.0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = BandParams{};
    p.shortterm_rate = 60.0;
    CHECK_THROWS_AS(p.validate(), InvalidParameter);
    p = BandParams{};
    p.shortterm_rate = 2.0;
    p.T_S2 = 1.6;
    CHECK(p.fir_window() == 4);
  }

  TEST_CASE("cascade bands match the scalar model component by component") {
    BandParams p;
    p.frame_rate = 4.0;
    p.T_L1 = 60.0;
    p.T_S1 = 5.0;
    p.T_S2 = 3.0;
    CascadeFilter f(3, 2, p, Exec::serial);
    std::vector<oracle::ScalarBands> model(6 * kBlockComponents,
                                           oracle::ScalarBands(oracle::alpha(4, 60), oracle::alpha(1, 5), 4, 3));
    std::mt19937_64 rng(11);
    for (long t = 0; t < 400; ++t) {
      auto in = oracle::random_frame(rng, 3, 2, t % 50 < 25 ? 2.0 : 0.2);
      in.timestamp_ms = t * 250;
      const auto out = f.step(in, t);
      bool updated = false;
      for (std::size_t k = 0; k < 6; ++k) {
        for (int c = 0; c < kBlockComponents; ++c) {
          auto& m = model[k * kBlockComponents + c];
          updated = m.step(in.blocks[k].component(c), t);
          CHECK(out.m_L1.blocks[k].component(c) == doctest::Approx(m.L1).epsilon(1e-12));
          CHECK(out.m_S1.blocks[k].component(c) == doctest::Approx(m.S1).epsilon(1e-12));
          CHECK(out.m_S2.blocks[k].component(c) == doctest::Approx(m.S2).epsilon(1e-12));
        }
      }
      CHECK(out.shortterm_updated == updated);
    }
  }

  TEST_CASE("counters: 4 against 5 multiplies per tick, 2 against 3 state frames") {
    BandParams p;
    p.frame_rate = 3.0;
    CascadeFilter c(2, 2, p, Exec::serial);
    ReferenceFilter r(2, 2, p, Exec::serial);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 300; ++t) {
      const auto f = oracle::random_frame(rng, 2, 2);
      c.step(f, t);
      r.step(f, t);
    }
    CHECK(c.counters().full_ticks == 100);
    CHECK(c.counters().multiplies == 400);
    CHECK(r.counters().multiplies == 500);
    CHECK(c.counters().state_frames == 2);
    CHECK(r.counters().state_frames == 3);
  }

  TEST_CASE("constant input decays out of the high-pass as alpha^n") {
    BandParams p;
    p.frame_rate = 2.0;
    p.T_L1 = 30.0;
    CascadeFilter f(1, 1, p, Exec::serial);
    const auto in = oracle::uniform_frame(1, 1, 5.0);
    const double a = p.alpha_L1();
    for (int t = 0; t < 200; ++t) {
      const auto out = f.step(in, t);
      CHECK(out.m_L1.blocks[0].density == doctest::Approx(5.0 * std::pow(a, t + 1)).epsilon(1e-10));
    }
  }

  TEST_CASE("minute samples hold the per-minute moments of the down-sampled signal") {
    BandParams p;
    p.frame_rate = 2.0;
    p.T_L1 = 100.0;
    CascadeFilter f(2, 1, p, Exec::serial);
    oracle::ScalarBands m0(oracle::alpha(2, 100), oracle::alpha(1, 20), 2, 1);
    oracle::ScalarBands m1 = m0;
    std::mt19937_64 rng(4);
    double s = 0, sq = 0, act = 0, act_sq = 0;
    int n = 0;
    std::vector<MinuteSample> got;
    std::vector<std::array<double, 4>> want;
    for (long t = 0; t < 2 * 60 * 3 + 2; ++t) {
      auto in = oracle::random_frame(rng, 2, 1);
      in.timestamp_ms = t * 500;
      const auto out = f.step(in, t);
      m0.step(in.blocks[0].density, t);
      if (!m1.step(in.blocks[1].density, t)) continue;
      const long minute = in.timestamp_ms / 60000;
      if (n > 0 && minute != static_cast<long>(want.size())) {
        want.push_back({s / n, sq / n, act / n, act_sq / n});
        s = sq = act = act_sq = 0;
        n = 0;
      }
      const double u0 = m0.fir.back() + m0.lp_S1;
      const double a = (std::max(m0.S1, m0.S2) + std::max(m1.S1, m1.S2)) / 2.0;
      CHECK(a == doctest::Approx(scalar_activity(out.m_S1, out.m_S2)).epsilon(1e-12));
      s += u0;
      sq += u0 * u0;
      act += a;
      act_sq += a * a;
      ++n;
      for (auto& ms : f.take_minute_samples()) got.push_back(std::move(ms));
    }
    REQUIRE(got.size() == 3);
    REQUIRE(want.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(got[i].minute_index == static_cast<std::int64_t>(i));
      CHECK(got[i].samples == 60);
      CHECK(got[i].mean.blocks[0].density == doctest::Approx(want[i][0]).epsilon(1e-12));
      CHECK(got[i].mean_sq.blocks[0].density == doctest::Approx(want[i][1]).epsilon(1e-12));
      CHECK(got[i].activity_mean == doctest::Approx(want[i][2]).epsilon(1e-12));
      CHECK(got[i].activity_mean_sq == doctest::Approx(want[i][3]).epsilon(1e-12));
    }
    const auto last = f.flush_minute_sample();
    REQUIRE(last.has_value());
    CHECK(last->minute_index == 3);
    CHECK(last->samples == 1);
  }

  TEST_CASE("reused output frames give the same bands as fresh ones") {
    BandParams p;
    p.frame_rate = 2.0;
    CascadeFilter a(3, 3, p, Exec::serial), b(3, 3, p, Exec::serial);
    std::mt19937_64 rng(8);
    BandOutputs reused;
    for (int t = 0; t < 50; ++t) {
      const auto in = oracle::random_frame(rng, 3, 3);
      const auto fresh = a.step(in, t);
      b.step(in, t, reused);
      CHECK(fresh.m_L1 == reused.m_L1);
      CHECK(fresh.m_S1 == reused.m_S1);
      CHECK(fresh.m_S2 == reused.m_S2);
    }
  }

  TEST_CASE("grid mismatch is rejected") {
    CascadeFilter f(2, 2, BandParams{}, Exec::serial);
    CHECK_THROWS_AS(f.step(MotionFrame::zeros(3, 2), 0), RejectedInput);
    CHECK_THROWS_AS(scalar_activity(MotionFrame::zeros(1, 2), MotionFrame::zeros(2, 1)), RejectedInput);
  }
}
