#include "actv/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "actv/config.hpp"
#include "actv/costmap.hpp"
#include "actv/error.hpp"
#include "actv/events.hpp"
#include "actv/isochron.hpp"
#include "actv/pgm.hpp"
#include "actv/pipeline.hpp"
#include "actv/plan.hpp"
#include "actv/sim.hpp"
#include "actv/tfilter.hpp"
#include "text.hpp"

namespace actv {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// One-for-one mapping between override flags and config keys.
struct Override {
  const char* flag;
  const char* key;  // json pointer without the leading slash
  char type;        // d double, i int, u uint64, s string, p path, b flag
};

constexpr Override kOverrides[] = {
    {"--seed", "seed", 'u'},
    {"--camera-id", "camera_id", 's'},
    {"--days", "days", 'i'},
    {"--store-dir", "store_dir", 'p'},
    {"--t-l1", "bands/T_L1", 'd'},
    {"--t-l2", "bands/T_L2", 'd'},
    {"--t-s1", "bands/T_S1", 'd'},
    {"--t-s2", "bands/T_S2", 'd'},
    {"--frame-rate", "bands/frame_rate", 'd'},
    {"--shortterm-rate", "bands/shortterm_rate", 'd'},
    {"--block-size", "motion/block_size", 'i'},
    {"--noise-floor", "motion/noise_floor", 'd'},
    {"--k-sigma", "events/k_sigma", 'd'},
    {"--cooldown-s", "events/cooldown_s", 'd'},
    {"--min-threshold", "events/min_threshold", 'd'},
    {"--min-days", "events/min_days", 'i'},
    {"--reinvoke-every-s", "events/reinvoke_every_s", 'd'},
    {"--activity-power-w", "energy/activity_power_w", 'd'},
    {"--network-activity-power-w", "energy/network_activity_power_w", 'd'},
    {"--network-cameras", "energy/network_cameras", 'i'},
    {"--detector-power-w", "energy/detector_power_w", 'd'},
    {"--detector-fps", "energy/detector_fps", 'd'},
    {"--workday-h", "energy/workday_h", 'd'},
    {"--events-per-camera", "energy/events_per_camera", 'd'},
    {"--w1", "plan/w1", 'd'},
    {"--w2", "plan/w2", 'd'},
    {"--lambda", "plan/lambda", 'd'},
    {"--epsilon", "plan/epsilon", 'd'},
    {"--staleness-s", "plan/staleness_s", 'd'},
    {"--include-moving", "plan/include_moving", 'b'},
    {"--minute", "plan/minute", 'i'},
    {"--static-map", "costmap/static_map", 'p'},
    {"--full-scale", "costmap/full_scale", 'd'},
    {"--scenario", "scenario", 'p'},
};

std::string field_name(const char* key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '/', '.');
  return f;
}

json convert(const Override& o, const std::string& v) {
  try {
    std::size_t used = 0;
    switch (o.type) {
      case 'd': {
        const double d = std::stod(v, &used);
        if (used != v.size()) break;
        return d;
      }
      case 'i': {
        const long long i = std::stoll(v, &used);
        if (used != v.size()) break;
        return i;
      }
      case 'u': {
        if (!v.empty() && v[0] == '-') break;
        const unsigned long long u = std::stoull(v, &used);
        if (used != v.size()) break;
        return u;
      }
      case 'p':
        return fs::absolute(v).lexically_normal().string();
      default:
        return v;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(field_name(o.key), "invalid value '" + v + "' for " + o.flag);
}

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Writes line by line into a temp file renamed on commit().
class StreamFile {
 public:
  explicit StreamFile(fs::path path) : path_(std::move(path)), tmp_(path_) {
    tmp_ += ".tmp";
    os_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!os_) throw Error("cannot open " + tmp_.string() + " for writing");
  }
  std::ostream& os() { return os_; }
  void commit() {
    os_.close();
    if (!os_) throw Error("write failed for " + path_.string());
    fs::rename(tmp_, path_);
  }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream os_;
};

// Calls fn for every line of a JSON-lines motion file.
void for_each_frame(const fs::path& path, const std::function<void(const MotionFrame&, const std::string&)>& fn) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError("cannot open " + path.string());
  std::string line;
  std::string band;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    MotionFrame f;
    try {
      band.clear();
      f = parse_jsonl(line, &band);
    } catch (const Error& e) {
      throw LoadError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
    fn(f, band);
  }
}

struct Ctx {
  Config cfg;
  fs::path out_dir;
  std::ostream& out;

  fs::path store_dir() const {
    fs::path d = cfg.store_dir;
    return d.is_absolute() ? d : out_dir / d;
  }
  fs::path store_path(const std::string& cam) const { return store_dir() / (cam + ".iso"); }

  Scenario scenario() const {
    Scenario s = cfg.scenario;
    s.seed = derive_seed(cfg.seed, "simulate");
    return s;
  }
};

// Errors raised while checking inputs are validation failures (exit 2).
template <class F>
auto validating(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what, e.what());
  } catch (const json::exception& e) {
    throw ConfigError(what, e.what());
  }
}

void require_file(const std::string& what, const fs::path& p) {
  if (p.empty()) throw ConfigError(what, "a path is required");
  if (!fs::is_regular_file(p) && !fs::is_directory(p)) throw ConfigError(what, "no such file: " + p.string());
}

void check_band_grid(const Scenario& s, const BandParams& b) {
  if (std::abs(s.frame_rate - b.frame_rate) > 1e-9) {
    throw ConfigError("bands.frame_rate", "differs from scenario.frame_rate");
  }
}

// ---- simulate ----

int cmd_simulate(Ctx& c, const std::string& format) {
  if (format != "jsonl" && format != "pgm") throw ConfigError("--format", "expected jsonl or pgm");
  const Scenario sc = c.scenario();
  fs::create_directories(c.out_dir);
  StreamGenerator gen(sc, c.cfg.days);
  if (format == "jsonl") {
    StreamFile f(c.out_dir / "stream.jsonl");
    MotionFrame m;
    while (gen.next(m)) write_jsonl(f.os(), m);
    f.commit();
  } else {
    const fs::path dir = c.out_dir / "frames";
    fs::create_directories(dir);
    StreamFile index(dir / "index.csv");
    index.os() << "file,timestamp_ms\n";
    GrayFrame g;
    char name[32];
    while (gen.next_pixels(g)) {
      std::snprintf(name, sizeof name, "frame_%07lld.pgm", static_cast<long long>(gen.tick() - 1));
      write_pgm(dir / name, Image8{g.width, g.height, g.pixels});
      index.os() << name << ',' << g.timestamp_ms << '\n';
    }
    index.commit();
  }
  write_text(c.out_dir / "scenario.json", dump(ordered_json(scenario_to_json(sc))));
  write_text(c.out_dir / "truth.json", gen.ground_truth().to_json().dump() + "\n");
  c.out << "simulate: " << gen.tick() << " frames, " << gen.ground_truth().events.size() << " planted events\n";
  return 0;
}

// ---- filter ----

// Feeds motion frames from a JSON-lines stream, a PGM frame directory, or the
// configured scenario.
void for_each_input(const Ctx& c, const fs::path& input, const std::function<void(const MotionFrame&)>& fn) {
  if (input.empty()) {
    StreamGenerator gen(c.scenario(), c.cfg.days);
    MotionFrame m;
    while (gen.next(m)) fn(m);
  } else if (fs::is_directory(input)) {
    std::ifstream is(input / "index.csv");
    if (!is) throw LoadError("missing " + (input / "index.csv").string());
    std::string line;
    std::getline(is, line);
    GrayFrame prev;
    bool have_prev = false;
    while (std::getline(is, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw LoadError("malformed index line: " + line);
      const GrayFrame cur = read_pgm_frame(input / line.substr(0, comma), std::stoll(line.substr(comma + 1)));
      if (have_prev) fn(extract_motion(prev, cur, c.cfg.motion.block_size, c.cfg.motion.noise_floor));
      prev = cur;
      have_prev = true;
    }
  } else {
    for_each_frame(input, [&](const MotionFrame& f, const std::string&) { fn(f); });
  }
}

int cmd_filter(Ctx& c, const fs::path& input) {
  if (!input.empty()) require_file("--input", input);
  else check_band_grid(c.cfg.scenario, c.cfg.bands);
  fs::create_directories(c.out_dir);
  StreamFile f(c.out_dir / "bands.jsonl");
  std::unique_ptr<CascadeFilter> filter;
  BandOutputs o;
  std::int64_t tick = 0;
  for_each_input(c, input, [&](const MotionFrame& m) {
    if (!filter) filter = std::make_unique<CascadeFilter>(m.grid_w, m.grid_h, c.cfg.bands);
    filter->step(m, tick++, o);
    if (!o.shortterm_updated) return;
    write_jsonl(f.os(), o.m_S1, "S1");
    write_jsonl(f.os(), o.m_S2, "S2");
  });
  f.commit();
  ordered_json s;
  s["frames"] = tick;
  s["shortterm_ticks"] = filter ? filter->counters().full_ticks : 0;
  s["multiplies"] = filter ? filter->counters().multiplies : 0;
  s["state_frames"] = filter ? filter->counters().state_frames : 0;
  write_text(c.out_dir / "filter_summary.json", dump(s));
  c.out << "filter: " << tick << " frames\n";
  return 0;
}

// ---- learn ----

int cmd_learn(Ctx& c, const fs::path& input, bool resume) {
  if (!input.empty()) require_file("--input", input);
  else check_band_grid(c.cfg.scenario, c.cfg.bands);
  std::optional<IsochronalStore> store;
  const fs::path sp = c.store_path(c.cfg.camera_id);
  if (resume && fs::exists(sp)) store = validating("store", [&] { return IsochronalStore::load(sp); });

  std::unique_ptr<ActivityPipeline> pipe;
  std::int64_t tick = 0;
  for_each_input(c, input, [&](const MotionFrame& m) {
    if (!store) store.emplace(c.cfg.camera_id, m.grid_w, m.grid_h, c.cfg.bands.alpha_L2());
    if (!pipe) pipe = std::make_unique<ActivityPipeline>(*store, c.cfg.bands, c.cfg.events);
    pipe->step(m, tick++);
  });
  if (!pipe) throw Error("learn: input stream is empty");
  pipe->finish();
  fs::create_directories(c.store_dir());
  store->persist(sp);
  write_text(c.out_dir / "profile.csv", profile_csv(*store));
  ordered_json s;
  s["camera_id"] = c.cfg.camera_id;
  s["frames"] = tick;
  s["minute_updates"] = pipe->minute_updates();
  s["store"] = sp.filename().string();
  write_text(c.out_dir / "learn_summary.json", dump(s));
  c.out << "learn: " << pipe->minute_updates() << " minute updates -> " << sp.string() << "\n";
  return 0;
}

// ---- events ----

int cmd_events(Ctx& c, const fs::path& bands, const fs::path& truth_path) {
  require_file("--bands", bands);
  const fs::path sp = c.store_path(c.cfg.camera_id);
  require_file("store", sp);
  const IsochronalStore store = validating("store", [&] { return IsochronalStore::load(sp); });
  std::optional<GroundTruth> truth;
  if (!truth_path.empty()) {
    require_file("--truth", truth_path);
    truth = validating("--truth", [&] { return ground_truth_from_json(json::parse(read_file(truth_path))); });
  }
  GateParams gp = c.cfg.events;
  gp.tick_s = 1.0 / c.cfg.bands.shortterm_rate;
  gp.validate();
  DetectorStub detector(truth ? &*truth : nullptr);

  EventGate gate(store.camera_id(), gp);
  std::uint64_t ticks = 0, invocations = 0, persons = 0;
  MotionFrame s1;
  bool have_s1 = false;
  std::int64_t stats_minute = INT64_MIN;
  ActivityStats stats;
  for_each_frame(bands, [&](const MotionFrame& f, const std::string& band) {
    if (band == "S1") {
      s1 = f;
      have_s1 = true;
      return;
    }
    if (band != "S2" || !have_s1 || s1.timestamp_ms != f.timestamp_ms) {
      throw LoadError(bands.string() + ": expected S1/S2 line pairs");
    }
    have_s1 = false;
    const std::int64_t minute = f.timestamp_ms / kMsPerMinute;
    if (minute != stats_minute) {
      stats = activity_stats(store.query(static_cast<int>(((minute % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay)));
      stats_minute = minute;
    }
    const GateDecision d = gate.detect(s1, f, stats);
    ++ticks;
    if (d.invoke) {
      ++invocations;
      for (auto v : detector.detect(f.timestamp_ms)) persons += v;
    }
  });
  gate.finish();

  fs::create_directories(c.out_dir);
  std::string log;
  for (const auto& e : gate.log()) log += event_jsonl(e) + "\n";
  write_text(c.out_dir / "events.jsonl", log);
  write_text(c.out_dir / "energy.csv",
             energy_table_csv(c.cfg.energy.single(), c.cfg.energy.network(), c.cfg.energy.events_per_camera));
  const double duty = duty_cycle(gate.log(), c.cfg.energy.workday_h);
  ordered_json s;
  s["events"] = gate.log().size();
  s["shortterm_ticks"] = ticks;
  s["detector_invocations"] = invocations;
  s["persons_reported"] = persons;
  s["duty_cycle"] = duty;
  s["energy_hybrid_wh"] = energy_estimate(c.cfg.energy.single(), EnergyMode::hybrid, static_cast<double>(gate.log().size()));
  write_text(c.out_dir / "events_summary.json", dump(s));
  c.out << "events: " << gate.log().size() << " events, duty cycle " << duty << "\n";
  return 0;
}

// ---- plan / costmap helpers ----

// Last S1/S2 pair at or before `until_ms` (any time when until_ms < 0).
std::optional<LiveBands> read_live(const fs::path& bands, std::int64_t until_ms) {
  std::optional<LiveBands> live;
  MotionFrame s1;
  for_each_frame(bands, [&](const MotionFrame& f, const std::string& band) {
    if (until_ms >= 0 && f.timestamp_ms > until_ms) return;
    if (band == "S1") s1 = f;
    else if (band == "S2" && s1.timestamp_ms == f.timestamp_ms) live = LiveBands{s1, f};
  });
  return live;
}

int cmd_plan(Ctx& c, const fs::path& graph_path, const std::string& origin, const std::string& goal, bool realtime,
             std::int64_t time_ms, const fs::path& bands) {
  require_file("--graph", graph_path);
  const PathGraph g = validating("--graph", [&] { return graph_from_json(json::parse(read_file(graph_path))); });
  PlanQuery q;
  q.origin = origin;
  q.goal = goal;
  q.mode = realtime ? PlanMode::realtime : PlanMode::offline;
  q.minute = c.cfg.plan.minute;
  q.w1 = c.cfg.plan.w1;
  q.w2 = c.cfg.plan.w2;
  q.lambda = c.cfg.plan.lambda;
  q.epsilon = c.cfg.plan.epsilon;
  q.staleness_s = c.cfg.plan.staleness_s;
  q.include_moving = c.cfg.plan.include_moving;
  if (!g.node_index(origin)) throw ConfigError("--origin", "unknown node '" + origin + "'");
  if (!g.node_index(goal)) throw ConfigError("--goal", "unknown node '" + goal + "'");
  if (origin == goal) throw ConfigError("--goal", "must differ from --origin");

  std::map<std::string, IsochronalStore> owned;
  for (const auto& e : g.edges) {
    if (e.cam.empty() || owned.count(e.cam)) continue;
    const fs::path sp = c.store_path(e.cam);
    require_file("store", sp);
    owned.emplace(e.cam, validating("store", [&] { return IsochronalStore::load(sp); }));
  }
  StoreSet stores;
  for (const auto& [cam, s] : owned) stores[cam] = &s;

  LiveSet live;
  if (realtime) {
    require_file("--bands", bands);
    auto l = validating("--bands", [&] { return read_live(bands, time_ms); });
    if (time_ms < 0) time_ms = l ? l->m_S1.timestamp_ms : 0;
    if (l) live[c.cfg.camera_id] = std::move(*l);
  }
  q.time_ms = time_ms;
  validating("plan", [&] { q.validate(); });

  const PlanResult r = plan_path(g, q, stores, live);
  ordered_json j;
  j["origin"] = origin;
  j["goal"] = goal;
  j["mode"] = realtime ? "realtime" : "offline";
  if (realtime) j["time_ms"] = time_ms;
  else j["minute"] = q.minute;
  const ordered_json body = r.to_json();
  for (const auto& [k, v] : body.items()) j[k] = v;
  fs::create_directories(c.out_dir);
  write_text(c.out_dir / "plan.json", dump(j));
  if (r.feasible) {
    c.out << "plan:";
    for (const auto& n : r.nodes) c.out << ' ' << n;
    c.out << " (cost " << r.total_cost << ")\n";
  } else {
    c.out << "plan: no feasible path\n";
  }
  return 0;
}

int cmd_costmap(Ctx& c, const std::string& source, const fs::path& bands) {
  if (source != "store" && source != "bands") throw ConfigError("--source", "expected store or bands");
  const auto& mc = c.cfg.costmap;
  CostMap map = validating("costmap.static_map", [&] {
    if (mc.static_map.empty()) return CostMap::blank(mc.width, mc.height, mc.resolution, mc.origin_x, mc.origin_y);
    require_file("costmap.static_map", mc.static_map);
    return read_costmap(mc.static_map);
  });
  std::vector<CameraMount> mounts = mc.cameras;
  if (mounts.empty()) mounts.push_back({c.cfg.camera_id, Homography{}});

  std::vector<CameraActivity> cams;
  if (source == "store") {
    for (const auto& m : mounts) {
      const fs::path sp = c.store_path(m.camera_id);
      require_file("store", sp);
      const IsochronalStore s = validating("store", [&] { return IsochronalStore::load(sp); });
      cams.push_back({m.camera_id, m.to_world, s.mean(c.cfg.plan.minute)});
    }
  } else {
    require_file("--bands", bands);
    auto live = validating("--bands", [&] { return read_live(bands, -1); });
    if (!live) throw ConfigError("--bands", "no S1/S2 samples in " + bands.string());
    MotionFrame d = live->m_S1;
    for (std::size_t k = 0; k < d.blocks.size(); ++k) {
      d.blocks[k].density = std::max(d.blocks[k].density, live->m_S2->blocks[k].density);
    }
    const auto it = std::find_if(mounts.begin(), mounts.end(), [&](const CameraMount& m) { return m.camera_id == c.cfg.camera_id; });
    if (it == mounts.end()) throw ConfigError("costmap.cameras", "no mount for camera '" + c.cfg.camera_id + "'");
    cams.push_back({c.cfg.camera_id, it->to_world, d});
  }
  const ExportStats st = rasterize_activity(map, cams, mc.full_scale);
  fs::create_directories(c.out_dir);
  write_costmap(c.out_dir / "costmap.yaml", map);
  ordered_json s;
  s["source"] = source;
  s["splatted_blocks"] = st.splatted;
  s["out_of_bounds_blocks"] = st.out_of_bounds;
  write_text(c.out_dir / "costmap_summary.json", dump(s));
  if (st.out_of_bounds > 0) c.out << "costmap: warning: " << st.out_of_bounds << " blocks fell outside the map\n";
  c.out << "costmap: " << st.splatted << " blocks splatted\n";
  return 0;
}

// ---- bench ----

int cmd_bench(Ctx& c, const std::string& impl, int frames, int grid) {
  if (impl != "cascade" && impl != "reference" && impl != "both") {
    throw ConfigError("--impl", "expected cascade, reference or both");
  }
  if (frames < 1) throw ConfigError("--frames", "must be >= 1");
  if (grid < 1) throw ConfigError("--grid", "must be >= 1");
  std::mt19937_64 rng(derive_seed(c.cfg.seed, "bench"));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CascadeFilter cas(grid, grid, c.cfg.bands, Exec::serial);
  ReferenceFilter ref(grid, grid, c.cfg.bands, Exec::serial);
  MotionFrame f = MotionFrame::zeros(grid, grid);
  for (int t = 0; t < frames; ++t) {
    for (auto& b : f.blocks) {
      b.density = u(rng);
      for (auto& h : b.dir_hist) h = u(rng);
    }
    f.timestamp_ms = static_cast<std::int64_t>(t * 1000.0 / c.cfg.bands.frame_rate);
    cas.step(f, t);
    ref.step(f, t);
  }
  auto per_tick = [](const FilterCounters& k) {
    return k.full_ticks ? static_cast<double>(k.multiplies) / static_cast<double>(k.full_ticks) : 0.0;
  };
  const double ref_mult = per_tick(ref.counters());
  const double ref_state = ref.counters().state_frames;
  std::string t2 = "impl,multiplies_per_tick,state_frames,multiplies_ratio,memory_ratio\n";
  auto row = [&](const char* name, const FilterCounters& k) {
    t2 += name;
    t2 += ',';
    detail::append_double(t2, per_tick(k));
    t2 += ',' + std::to_string(k.state_frames) + ',';
    detail::append_double(t2, ref_mult > 0 ? per_tick(k) / ref_mult : 0.0);
    t2 += ',';
    detail::append_double(t2, ref_state > 0 ? k.state_frames / ref_state : 0.0);
    t2 += '\n';
  };
  if (impl != "reference") row("cascade", cas.counters());
  if (impl != "cascade") row("reference", ref.counters());
  fs::create_directories(c.out_dir);
  write_text(c.out_dir / "table2.csv", t2);
  write_text(c.out_dir / "table4.csv",
             energy_table_csv(c.cfg.energy.single(), c.cfg.energy.network(), c.cfg.energy.events_per_camera));
  c.out << t2;
  return 0;
}

Config build_config(const std::string& config_path, const CLI::App& app, const std::map<std::string, std::string>& values,
                    bool include_moving) {
  json j = json::object();
  fs::path base;
  if (!config_path.empty()) {
    std::string text;
    try {
      text = read_file(config_path);
    } catch (const Error&) {
      throw ConfigError("--config", "cannot read config file " + config_path);
    }
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("--config", "invalid JSON in " + config_path + ": " + e.what());
    }
    base = fs::path(config_path).parent_path();
  }
  if (!j.is_object()) throw ConfigError("--config", config_path + " must hold a JSON object");
  for (const auto& o : kOverrides) {
    const json::json_pointer ptr(std::string("/") + o.key);
    if (o.type == 'b') {
      if (include_moving) j[ptr] = true;
      continue;
    }
    if (app.get_option(o.flag)->count() == 0) continue;
    j[ptr] = convert(o, values.at(o.flag));
  }
  return config_from_json(j, base);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Activity detection, isochronal learning, event gating and activity-aware planning"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string out_dir = "out";
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out-dir", out_dir, "Artifact directory")->capture_default_str();
  std::map<std::string, std::string> values;
  bool include_moving = false;
  for (const auto& o : kOverrides) {
    if (o.type == 'b') {
      app.add_flag(o.flag, include_moving, std::string("Override ") + field_name(o.key));
    } else {
      app.add_option(o.flag, values[o.flag], std::string("Override ") + field_name(o.key));
    }
  }

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic stream and ground truth");
  std::string format = "jsonl";
  sim->add_option("--format", format, "jsonl or pgm")->capture_default_str();

  auto* filt = app.add_subcommand("filter", "Run the cascade filter and write short-term bands");
  std::string filter_input;
  filt->add_option("--input", filter_input, "stream.jsonl or a PGM frame directory (default: generate)");

  auto* learn = app.add_subcommand("learn", "Build the isochronal store");
  std::string learn_input;
  bool resume = false;
  learn->add_option("--input", learn_input, "stream.jsonl or a PGM frame directory (default: generate)");
  learn->add_flag("--resume", resume, "Continue from an existing store");

  auto* ev = app.add_subcommand("events", "Gate events from short-term bands");
  std::string ev_bands, ev_truth;
  ev->add_option("--bands", ev_bands, "bands.jsonl from filter")->required();
  ev->add_option("--truth", ev_truth, "truth.json for the detector stand-in");

  auto* plan = app.add_subcommand("plan", "Plan an activity-aware path");
  std::string graph, origin, goal, plan_bands;
  bool realtime = false;
  std::int64_t time_ms = -1;
  plan->add_option("--graph", graph, "Path graph JSON")->required();
  plan->add_option("--origin", origin, "Origin node")->required();
  plan->add_option("--goal", goal, "Goal node")->required();
  plan->add_flag("--realtime", realtime, "Use live bands (cost2)");
  plan->add_option("--time-ms", time_ms, "Query time for realtime mode (default: last band sample)");
  plan->add_option("--bands", plan_bands, "bands.jsonl for realtime mode");

  auto* cm = app.add_subcommand("costmap", "Export an activity-augmented cost map");
  std::string source = "store", cm_bands;
  cm->add_option("--source", source, "store or bands")->capture_default_str();
  cm->add_option("--bands", cm_bands, "bands.jsonl when --source bands");

  auto* bench = app.add_subcommand("bench", "Cascade vs reference counters and the energy table");
  std::string impl = "both";
  int frames = 1000, grid = 8;
  bench->add_option("--impl", impl, "cascade, reference or both")->capture_default_str();
  bench->add_option("--frames", frames, "Random frames")->capture_default_str();
  bench->add_option("--grid", grid, "Grid side in blocks")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Ctx c{build_config(config_path, app, values, include_moving), fs::path(out_dir), out};
    if (sim->parsed()) return cmd_simulate(c, format);
    if (filt->parsed()) return cmd_filter(c, filter_input);
    if (learn->parsed()) return cmd_learn(c, learn_input, resume);
    if (ev->parsed()) return cmd_events(c, ev_bands, ev_truth);
    if (plan->parsed()) return cmd_plan(c, graph, origin, goal, realtime, time_ms, plan_bands);
    if (cm->parsed()) return cmd_costmap(c, source, cm_bands);
    if (bench->parsed()) return cmd_bench(c, impl, frames, grid);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace actv
