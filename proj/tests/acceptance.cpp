// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "actv/cli.hpp"
#include "actv/costmap.hpp"
#include "actv/events.hpp"
#include "actv/isochron.hpp"
#include "actv/pgm.hpp"
#include "actv/pipeline.hpp"
#include "actv/plan.hpp"
#include "actv/sim.hpp"
#include "actv/tfilter.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace actv;

namespace {

constexpr double kAlphaTol = 5e-4;
constexpr double kDecayTol = 1e-9;
constexpr double kCascadeTol = 1e-9;
constexpr double kSeparation = 3.0;
constexpr double kNoiseResidual = 0.01;
constexpr double kMinPearson = 0.9;
constexpr double kImpulseTol = 1e-6;
constexpr double kDuty = 0.083;
constexpr double kDutyTol = 0.005;
constexpr double kInvocationTol = 0.10;
constexpr double kMinRecall = 0.95;
constexpr double kPlanTol = 1e-9;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double frame_diff(const MotionFrame& a, const MotionFrame& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (int c = 0; c < kBlockComponents; ++c) {
      d = std::max(d, std::abs(a.blocks[k].component(c) - b.blocks[k].component(c)));
    }
  }
  return d;
}

Outcome filter_parameters() {
  const double a = alpha_from_decay(1, 20);
  bool ok = std::abs(a - 0.8913) <= kAlphaTol;
  double worst = 0;
  const std::pair<double, double> specs[] = {{1, 10}, {1, 20}, {30, 1800}, {1, 10}};
  for (auto [r, T] : specs) {
    const double al = alpha_from_decay(r, T);
    const auto n = static_cast<long>(std::llround(r * T));
    double y = 1.0;
    for (long i = 0; i < n; ++i) y = oracle::ema(y, 0.0, al);
    worst = std::max(worst, std::abs(y - 0.1));
  }
  ok = ok && worst <= kDecayTol;
  return {ok, fmt("alpha(1,20)=%.6f decay-law max error %.2e", a, worst)};
}

Outcome cascade() {
  BandParams p;
  p.frame_rate = 5;
  p.T_L1 = 30;
  p.T_S1 = 8;
  p.T_S2 = 3;
  double worst = 0;
  FilterCounters kc, kr;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    CascadeFilter cas(4, 4, p, Exec::serial);
    ReferenceFilter ref(4, 4, p, Exec::serial);
    for (int t = 0; t < 1000; ++t) {
      auto f = oracle::random_frame(rng, 4, 4, 3.0);
      const auto a = cas.step(f, t);
      const auto b = ref.step(f, t);
      worst = std::max({worst, frame_diff(a.m_L1, b.m_L1), frame_diff(a.m_S1, b.m_S1), frame_diff(a.m_S2, b.m_S2)});
    }
    kc = cas.counters();
    kr = ref.counters();
  }
  const double mc = static_cast<double>(kc.multiplies) / static_cast<double>(kc.full_ticks);
  const double mr = static_cast<double>(kr.multiplies) / static_cast<double>(kr.full_ticks);
  const bool ok = worst <= kCascadeTol && mc == 4.0 && mr == 5.0 && kc.state_frames == 2 && kr.state_frames == 3;
  return {ok, fmt("max |diff| %.2e, multiplies %.0f vs %.0f, state frames %d vs %d", worst, mc, mr, kc.state_frames,
                  kr.state_frames)};
}

Outcome band_separation() {
  Scenario sc;
  sc.grid_w = 8;
  sc.grid_h = 8;
  sc.frame_rate = 5;
  sc.day_hours = 0.25;
  sc.start_hour = 9;
  sc.seed = 4;
  sc.dwellers.push_back({2, 2, 0, 900, 1.0});
  sc.walkers.push_back({{{0, 6.5}, {8, 6.5}}, 1.0, 1.0, 0, 20, -1});
  BandParams bp;
  bp.frame_rate = sc.frame_rate;
  auto quiet = sc;
  quiet.noise_sigma = 0;
  StreamGenerator gen(sc, 1), clean(quiet, 1);
  CascadeFilter cf(8, 8, bp, Exec::serial);
  const auto& labels = gen.ground_truth().labels;
  MotionFrame f, planted;
  auto active = MotionFrame::zeros(8, 8);
  double dS1 = 0, dS2 = 0, wS1 = 0, wS2 = 0;
  for (std::int64_t t = 0; gen.next(f); ++t) {
    clean.next(planted);
    for (std::size_t k = 0; k < planted.size(); ++k) active.blocks[k].density += planted.blocks[k].density;
    const auto o = cf.step(f, t);
    if (!o.shortterm_updated) continue;
    if (f.timestamp_ms - 9 * 3'600'000LL >= 60'000) {
      for (std::size_t k = 0; k < active.size(); ++k) {
        if (active.blocks[k].density <= 0.0) continue;
        if (labels[k] == BlockLabel::in_place) {
          dS1 += o.m_S1.blocks[k].density;
          dS2 += o.m_S2.blocks[k].density;
        } else if (labels[k] == BlockLabel::moving) {
          wS1 += o.m_S1.blocks[k].density;
          wS2 += o.m_S2.blocks[k].density;
        }
      }
    }
    active = MotionFrame::zeros(8, 8);
  }
  const double dwell = dS1 / std::max(dS2, 1e-300);
  const double walk = wS2 / std::max(wS1, 1e-300);
  return {dwell >= kSeparation && walk >= kSeparation,
          fmt("dweller S1/S2 %.2f, walker S2/S1 %.2f (active samples after 60 s)", dwell, walk)};
}

Outcome noise_rejection() {
  BandParams bp;
  bp.frame_rate = 30;
  bp.T_L1 = 60;
  CascadeFilter cf(2, 2, bp, Exec::serial);
  auto f = MotionFrame::zeros(2, 2);
  f.at(1, 0).density = 5.0;
  for (auto& h : f.at(1, 0).dir_hist) h = 5.0 / kDirBins;
  const auto limit = static_cast<std::int64_t>(5 * bp.T_L1 * bp.frame_rate);
  double settle_s = -1;
  double final_ratio = 1;
  for (std::int64_t t = 0; t < limit; ++t) {
    f.timestamp_ms = t * 1000 / 30;
    const auto o = cf.step(f, t);
    final_ratio = o.m_L1.at(1, 0).density / 5.0;
    if (final_ratio < kNoiseResidual && settle_s < 0) settle_s = (t + 1) / bp.frame_rate;
    if (final_ratio >= kNoiseResidual) settle_s = -1;
  }
  return {settle_s >= 0 && settle_s <= 5 * bp.T_L1,
          fmt("m_L1 below 1%% after %.1f s (limit %.0f s), residual %.2e", settle_s, 5 * bp.T_L1, final_ratio)};
}

Outcome isochronal_learning() {
  Scenario sc;
  sc.grid_w = 8;
  sc.grid_h = 8;
  sc.frame_rate = 1;
  sc.start_hour = 6;
  sc.day_hours = 15;
  sc.profile = "office";
  sc.events_per_day = 8000;
  sc.exact_event_count = true;
  sc.min_event_gap_s = 5;
  for (int row = 0; row < 8; ++row) sc.event_paths.push_back({{0.0, row + 0.5}, {8.0, row + 0.5}});
  sc.seed = 5;
  BandParams bp;
  bp.frame_rate = 1;
  IsochronalStore store("cam0", 8, 8, bp.alpha_L2());
  ActivityPipeline pipe(store, bp, GateParams{}, Exec::parallel);
  StreamGenerator gen(sc, 10);
  MotionFrame f;
  for (std::int64_t t = 0; gen.next(f); ++t) pipe.step(f, t);
  pipe.finish();
  const auto profile = gen_daily_profile("office");
  std::vector<double> learned, expected;
  for (int m = 360; m < 1260; ++m) {
    learned.push_back(store.mean(m).mean_density());
    expected.push_back(profile[m]);
  }
  const double r = oracle::pearson(learned, expected);

  IsochronalStore imp("imp", 1, 1, bp.alpha_L2());
  imp.update(600, oracle::uniform_frame(1, 1, 0.0));
  imp.update(600, oracle::uniform_frame(1, 1, 1.0));
  const double peak = imp.mean(600).mean_density();
  for (int d = 0; d < 10; ++d) imp.update(600, oracle::uniform_frame(1, 1, 0.0));
  const double ratio = imp.mean(600).mean_density() / peak;
  return {r >= kMinPearson && std::abs(ratio - 0.1) <= kImpulseTol,
          fmt("pearson %.4f over 06:00-21:00, impulse ratio after 10 days %.9f", r, ratio)};
}

Outcome event_gating() {
  Scenario sc;
  sc.grid_w = 8;
  sc.grid_h = 8;
  sc.frame_rate = 5;
  sc.start_hour = 8;
  sc.day_hours = 10;
  sc.events_per_day = 300;
  sc.exact_event_count = true;
  sc.event_duration_s = 10;
  sc.seed = 1;
  const int history = 10;
  BandParams bp;
  bp.frame_rate = sc.frame_rate;
  GateParams gp;
  gp.k_sigma = 2;
  IsochronalStore store("cam0", 8, 8, bp.alpha_L2());
  ActivityPipeline pipe(store, bp, gp, Exec::parallel);
  StreamGenerator gen(sc, history + 1);
  const std::int64_t gate_from = history * sc.frames_per_day();
  MotionFrame f;
  for (std::int64_t t = 0; gen.next(f); ++t) {
    if (t == gate_from) {
      pipe.set_learning(false);
      pipe.set_gating(true);
    }
    pipe.step(f, t);
  }
  pipe.finish();
  const auto& detected = pipe.events();
  const std::int64_t day_ms = history * 86'400'000LL;
  int planted = 0, hit = 0;
  for (const auto& e : gen.ground_truth().events) {
    if (e.start_ms < day_ms) continue;
    ++planted;
    for (const auto& d : detected) {
      if (d.start_ms < e.end_ms && d.end_ms > e.start_ms) {
        ++hit;
        break;
      }
    }
  }
  const double duty = duty_cycle(detected, sc.day_hours);
  const double recall = planted ? static_cast<double>(hit) / planted : 0.0;
  const auto inv = pipe.run().detector_invocations;
  const bool ok = std::abs(duty - kDuty) <= kDutyTol && std::abs(static_cast<double>(inv) / 300.0 - 1.0) <= kInvocationTol &&
                  recall >= kMinRecall && planted == 300;
  return {ok, fmt("planted %d, events %zu, duty %.2f%%, invocations %llu, recall %.3f", planted, detected.size(),
                  100 * duty, static_cast<unsigned long long>(inv), recall)};
}

Outcome energy() {
  EnergyModel single;
  EnergyModel net;
  net.activity_power_w = 80;
  net.cameras = 32;
  const double hs = energy_estimate(single, EnergyMode::hybrid, 300);
  const double hn = energy_estimate(net, EnergyMode::hybrid, 300);
  const double cn = energy_estimate(net, EnergyMode::continuous, 300);
  const bool ok = std::abs(hs - 500.9) <= 0.1 && std::abs(hn - 828) <= 1 && std::abs(cn / 49460 - 1) <= 0.01;
  return {ok, fmt("hybrid 1 cam %.2f Wh, hybrid 32 cams %.2f Wh, continuous 32 cams %.0f Wh", hs, hn, cn)};
}

Outcome planner() {
  int graphs = 0, mismatches = 0;
  for (std::uint64_t seed = 0; graphs < 50; ++seed) {
    std::mt19937_64 rng(seed + 1000);
    const int n = std::uniform_int_distribution<int>(3, 10)(rng);
    auto frame = MotionFrame::zeros(4, 4);
    for (auto& b : frame.blocks) {
      b.density = std::bernoulli_distribution(0.85)(rng) ? std::uniform_real_distribution<double>(0.05, 2)(rng) : 0.0;
    }
    IsochronalStore store("cam", 4, 4, 0.5);
    store.update(100, frame);
    PathGraph g;
    for (int i = 0; i < n; ++i) g.nodes.push_back({"n" + std::to_string(i), 0, 0});
    std::vector<oracle::Edge> feasible;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (!std::bernoulli_distribution(0.45)(rng) || g.edges.size() >= 20) continue;
        GraphEdge e;
        e.id = "e" + std::to_string(g.edges.size());
        e.from = g.nodes[u].id;
        e.to = g.nodes[v].id;
        e.len_m = e.base_cost = std::uniform_real_distribution<double>(0.5, 10)(rng);
        double w = e.base_cost;
        bool ok = true;
        if (std::bernoulli_distribution(0.7)(rng)) {
          e.cam = "cam";
          e.blocks = {std::uniform_int_distribution<int>(0, 15)(rng)};
          w += frame.blocks[e.blocks[0]].density;
          ok = frame.blocks[e.blocks[0]].density > 0.015;
        }
        g.edges.push_back(e);
        if (ok) feasible.push_back({u, v, w});
      }
    }
    ++graphs;
    PlanQuery q;
    q.origin = "n0";
    q.goal = "n" + std::to_string(n - 1);
    q.minute = 100;
    const auto r = plan_path(g, q, {{"cam", &store}});
    const double best = oracle::brute_force_shortest(n, feasible, 0, n - 1);
    if (r.feasible != (best >= 0) || (r.feasible && std::abs(r.total_cost - best) > kPlanTol * std::max(1.0, best))) {
      ++mismatches;
    }
  }
  // diamond: the short C arm is never observed, so M' = 0 there
  const auto g = graph_from_json(nlohmann::json::parse(read_file(fs::path(ACTV_TEST_DATA) / "diamond_graph.json")));
  IsochronalStore store("cam0", 8, 8, 0.5);
  auto f = MotionFrame::zeros(8, 8);
  for (int bx = 0; bx < 8; ++bx) f.at(bx, 4).density = 0.4;
  store.update(600, f);
  PlanQuery q;
  q.origin = "A";
  q.goal = "D";
  q.minute = 600;
  const auto r = plan_path(g, q, {{"cam0", &store}});
  bool avoids = r.feasible;
  for (const auto& n : r.nodes) avoids = avoids && n != "C";
  return {mismatches == 0 && avoids,
          fmt("%d/%d random graphs match exhaustive search; diamond route %s", graphs - mismatches, graphs,
              r.feasible ? (r.nodes[0] + "-" + r.nodes[1] + "-" + r.nodes[2]).c_str() : "infeasible")};
}

Outcome costmap() {
  auto m = CostMap::blank(12, 10, 0.5, -1.0, -1.0);
  for (int cx = 0; cx < 12; ++cx) m.static_at(cx, 9) = kCostLethal;
  m.static_at(5, 5) = 90;
  const std::string before = encode_pgm(costmap_image(m));
  Homography h{{0.5, 0, 0, 0, 0.5, 0, 0, 0, 1}};
  auto zero = MotionFrame::zeros(6, 6);
  rasterize_activity(m, {{"cam0", h, zero}});
  const bool identical = encode_pgm(costmap_image(m)) == before && m.combined() == m.static_layer;

  // block (bx, by) center -> world (0.5 bx + 0.25, 0.5 by + 0.25) -> cell (bx + 2, by + 2)
  auto act = MotionFrame::zeros(6, 8);
  act.at(1, 3).density = 0.5;
  act.at(4, 7).density = 3.0;  // lands on the lethal row
  rasterize_activity(m, {{"cam0", h, act}});
  bool exact = true;
  for (int cy = 0; cy < m.height; ++cy) {
    for (int cx = 0; cx < m.width; ++cx) {
      const int want = (cx == 3 && cy == 5) ? 127 : (cx == 6 && cy == 9) ? 254 : 0;
      exact = exact && m.activity_at(cx, cy) == want;
    }
  }
  const auto c = m.combined();
  bool lethal = true;
  for (int cx = 0; cx < 12; ++cx) lethal = lethal && c[9 * 12 + cx] == kCostLethal;

  const auto dir = oracle::temp_dir("acceptance_costmap");
  write_costmap(dir / "map.yaml", m);
  const auto back = read_costmap(dir / "map.yaml");
  write_costmap(dir / "again.yaml", back);
  const bool round = back.static_layer == c && back.width == 12 && back.height == 10 && back.resolution == 0.5 &&
                     back.origin_x == -1.0 && read_file(dir / "map.pgm") == read_file(dir / "again.pgm");
  fs::remove_all(dir);
  return {identical && exact && lethal && round, fmt("zero-activity identical %d, mapped cells exact %d, lethal kept %d, "
                                                     "round trip %d",
                                                     identical, exact, lethal, round)};
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
  std::map<std::string, std::string> fa, fb;
  for (auto* p : {&a, &b}) {
    auto& m = p == &a ? fa : fb;
    for (const auto& e : fs::recursive_directory_iterator(*p)) {
      if (e.is_regular_file()) m[fs::relative(e.path(), *p).string()] = read_file(e.path());
    }
  }
  if (fa.size() != fb.size()) {
    why = "file sets differ";
    return false;
  }
  for (const auto& [k, v] : fa) {
    auto it = fb.find(k);
    if (it == fb.end() || it->second != v) {
      why = k + " differs";
      return false;
    }
  }
  why = std::to_string(fa.size()) + " files identical";
  return true;
}

Outcome determinism() {
  const auto root = oracle::temp_dir("acceptance_det");
  const std::string cfg = std::string(ACTV_TEST_DATA) + "/pipeline_config.json";
  const std::string graph = std::string(ACTV_TEST_DATA) + "/diamond_graph.json";
  for (const char* run_name : {"a", "b"}) {
    const std::string out = (root / run_name).string();
    const std::vector<std::vector<std::string>> steps = {
        {"simulate"},
        {"filter", "--input", out + "/stream.jsonl"},
        {"learn", "--input", out + "/stream.jsonl"},
        {"events", "--bands", out + "/bands.jsonl", "--truth", out + "/truth.json"},
        {"plan", "--graph", graph, "--origin", "A", "--goal", "D"},
    };
    for (const auto& s : steps) {
      std::vector<std::string> args = {"--config", cfg, "--out-dir", out};
      args.insert(args.end(), s.begin(), s.end());
      std::ostringstream o, e;
      if (run(args, o, e) != 0) {
        fs::remove_all(root);
        return {false, "step " + s[0] + " failed: " + e.str()};
      }
    }
  }
  std::string why;
  const bool ok = same_tree(root / "a", root / "b", why);
  fs::remove_all(root);
  return {ok, why};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"filter parameters", filter_parameters},
      {"cascade correctness and cost", cascade},
      {"band separation", band_separation},
      {"stationary noise rejection", noise_rejection},
      {"isochronal learning", isochronal_learning},
      {"event gating and duty cycle", event_gating},
      {"energy model", energy},
      {"planner optimality", planner},
      {"cost map export", costmap},
      {"determinism", determinism},
  };
  int failed = 0;
  int i = 0;
  for (const auto& [name, check] : criteria) {
    ++i;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", i, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
