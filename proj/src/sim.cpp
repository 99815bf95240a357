#include "actv/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "actv/error.hpp"

namespace actv {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, mixed with the seed through splitmix64
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

double piecewise_linear(const std::vector<std::pair<double, double>>& knots, double x) {
  if (x <= knots.front().first) return knots.front().second;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (x <= knots[i].first) {
      const auto [x0, y0] = knots[i - 1];
      const auto [x1, y1] = knots[i];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return knots.back().second;
}

}  // namespace

std::vector<double> gen_daily_profile(std::string_view template_name, double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) throw InvalidParameter("profile level must be >= 0");
  std::vector<double> p(1440, 0.0);
  if (template_name == "flat") {
    std::fill(p.begin(), p.end(), level);
  } else if (template_name == "office") {
    static const std::vector<std::pair<double, double>> knots = {
        {0, 0.0},     {360, 0.0},  {540, 0.9},    {660, 0.8}, {750, 0.45},
        {810, 0.75},  {990, 1.0},  {1260, 0.0},   {1440, 0.0}};
    for (int m = 0; m < 1440; ++m) p[m] = level * piecewise_linear(knots, m);
  } else if (template_name == "university") {
    for (int m = 480; m <= 1080; ++m) {
      double v = 0.25;
      for (int h = 8; h <= 18; ++h) {
        const double d = m - 60.0 * h;
        v += std::exp(-d * d / (2.0 * 36.0));
      }
      p[m] = level * v;
    }
  } else {
    throw InvalidParameter("unknown profile template '" + std::string(template_name) + "'");
  }
  return p;
}

void Scenario::validate() const {
  if (grid_w <= 0 || grid_h <= 0) throw InvalidParameter("scenario.grid_w/grid_h must be > 0");
  if (!(frame_rate > 0.0)) throw InvalidParameter("scenario.frame_rate must be > 0");
  if (!(day_hours > 0.0) || start_hour < 0.0 || start_hour + day_hours > 24.0 + 1e-9) {
    throw InvalidParameter("scenario: daily window must lie within one day");
  }
  gen_daily_profile(profile, profile_level);
  if (events_per_day < 0.0 || !(event_duration_s > 0.0) || min_event_gap_s < 0.0 || event_density < 0.0) {
    throw InvalidParameter("scenario: event parameters must be non-negative (duration > 0)");
  }
  if (noise_sigma < 0.0) throw InvalidParameter("scenario.noise_sigma must be >= 0");
  if (block_size <= 0) throw InvalidParameter("scenario.block_size must be > 0");
  auto check_path = [&](const BlockPath& path, const char* what) {
    if (path.size() < 2) throw InvalidParameter(std::string("scenario: ") + what + " path needs >= 2 points");
    for (auto [x, y] : path) {
      if (x < 0.0 || y < 0.0 || x > grid_w || y > grid_h) {
        throw InvalidParameter(std::string("scenario: ") + what + " path leaves the grid");
      }
    }
  };
  for (const auto& p : event_paths) check_path(p, "event");
  for (const auto& w : walkers) {
    check_path(w.path, "walker");
    if (!(w.speed_bps > 0.0) || w.density < 0.0 || w.period_s < 0.0) {
      throw InvalidParameter("scenario: walker speed must be > 0 and density >= 0");
    }
  }
  for (const auto& d : dwellers) {
    if (d.bx < 0 || d.by < 0 || d.bx >= grid_w || d.by >= grid_h) {
      throw InvalidParameter("scenario: dweller block outside the grid");
    }
    if (d.density < 0.0 || d.duration_s < 0.0) throw InvalidParameter("scenario: dweller density/duration < 0");
  }
}

std::vector<BlockPath> Scenario::effective_event_paths() const {
  if (!event_paths.empty()) return event_paths;
  const double y = grid_h / 2 + 0.5;
  return {BlockPath{{0.0, y}, {static_cast<double>(grid_w), y}}};
}

std::int64_t Scenario::frames_per_day() const {
  return static_cast<std::int64_t>(std::llround(day_hours * 3600.0 * frame_rate));
}

namespace {

BlockPath path_from_json(const nlohmann::json& j) {
  BlockPath p;
  for (const auto& pt : j) p.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
  return p;
}

nlohmann::json path_to_json(const BlockPath& p) {
  auto a = nlohmann::json::array();
  for (auto [x, y] : p) a.push_back({x, y});
  return a;
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const std::string& where) {
  std::set<std::string> k(known.begin(), known.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!k.count(it.key())) throw InvalidParameter(where + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    reject_unknown(j,
                   {"grid_w", "grid_h", "frame_rate", "start_hour", "day_hours", "profile", "profile_level",
                    "events_per_day", "exact_event_count", "event_duration_s", "min_event_gap_s", "event_density",
                    "event_paths", "walkers", "dwellers", "noise_sigma", "block_size", "seed"},
                   "scenario");
    read_key(j, "grid_w", s.grid_w);
    read_key(j, "grid_h", s.grid_h);
    read_key(j, "frame_rate", s.frame_rate);
    read_key(j, "start_hour", s.start_hour);
    read_key(j, "day_hours", s.day_hours);
    read_key(j, "profile", s.profile);
    read_key(j, "profile_level", s.profile_level);
    read_key(j, "events_per_day", s.events_per_day);
    read_key(j, "exact_event_count", s.exact_event_count);
    read_key(j, "event_duration_s", s.event_duration_s);
    read_key(j, "min_event_gap_s", s.min_event_gap_s);
    read_key(j, "event_density", s.event_density);
    read_key(j, "noise_sigma", s.noise_sigma);
    read_key(j, "block_size", s.block_size);
    read_key(j, "seed", s.seed);
    if (j.contains("event_paths")) {
      for (const auto& p : j["event_paths"]) s.event_paths.push_back(path_from_json(p));
    }
    if (j.contains("walkers")) {
      for (const auto& w : j["walkers"]) {
        reject_unknown(w, {"path", "speed_bps", "density", "start_s", "period_s", "end_s"}, "scenario.walkers");
        WalkerSpec ws;
        ws.path = path_from_json(w.at("path"));
        read_key(w, "speed_bps", ws.speed_bps);
        read_key(w, "density", ws.density);
        read_key(w, "start_s", ws.start_s);
        read_key(w, "period_s", ws.period_s);
        read_key(w, "end_s", ws.end_s);
        s.walkers.push_back(std::move(ws));
      }
    }
    if (j.contains("dwellers")) {
      for (const auto& d : j["dwellers"]) {
        reject_unknown(d, {"block", "start_s", "duration_s", "density"}, "scenario.dwellers");
        DwellerSpec ds;
        ds.bx = d.at("block").at(0).get<int>();
        ds.by = d.at("block").at(1).get<int>();
        read_key(d, "start_s", ds.start_s);
        read_key(d, "duration_s", ds.duration_s);
        read_key(d, "density", ds.density);
        s.dwellers.push_back(ds);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["grid_w"] = s.grid_w;
  j["grid_h"] = s.grid_h;
  j["frame_rate"] = s.frame_rate;
  j["start_hour"] = s.start_hour;
  j["day_hours"] = s.day_hours;
  j["profile"] = s.profile;
  j["profile_level"] = s.profile_level;
  j["events_per_day"] = s.events_per_day;
  j["exact_event_count"] = s.exact_event_count;
  j["event_duration_s"] = s.event_duration_s;
  j["min_event_gap_s"] = s.min_event_gap_s;
  j["event_density"] = s.event_density;
  j["noise_sigma"] = s.noise_sigma;
  j["block_size"] = s.block_size;
  j["seed"] = s.seed;
  auto paths = nlohmann::json::array();
  for (const auto& p : s.event_paths) paths.push_back(path_to_json(p));
  j["event_paths"] = paths;
  auto walkers = nlohmann::json::array();
  for (const auto& w : s.walkers) {
    walkers.push_back({{"path", path_to_json(w.path)},
                       {"speed_bps", w.speed_bps},
                       {"density", w.density},
                       {"start_s", w.start_s},
                       {"period_s", w.period_s},
                       {"end_s", w.end_s}});
  }
  j["walkers"] = walkers;
  auto dwellers = nlohmann::json::array();
  for (const auto& d : s.dwellers) {
    dwellers.push_back({{"block", {d.bx, d.by}},
                        {"start_s", d.start_s},
                        {"duration_s", d.duration_s},
                        {"density", d.density}});
  }
  j["dwellers"] = dwellers;
  return j;
}

nlohmann::json GroundTruth::to_json() const {
  nlohmann::json j;
  j["grid_w"] = grid_w;
  j["grid_h"] = grid_h;
  auto ev = nlohmann::json::array();
  for (const auto& e : events) ev.push_back({{"start_ms", e.start_ms}, {"end_ms", e.end_ms}, {"path", e.path}});
  j["events"] = ev;
  j["walkable"] = walkable;
  std::vector<int> lab;
  for (auto l : labels) lab.push_back(static_cast<int>(l));
  j["labels"] = lab;
  auto curve = nlohmann::json::array();
  for (std::size_t i = 0; i < minute_index.size(); ++i) {
    double s = 0.0;
    for (float v : minute_block_activity[i]) s += v;
    curve.push_back({minute_index[i], s / static_cast<double>(minute_block_activity[i].size())});
  }
  j["minute_activity"] = curve;
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < minute_index.size(); ++i) {
    const auto& row = minute_block_activity[i];
    if (std::any_of(row.begin(), row.end(), [](float v) { return v > 0.0f; })) rows.push_back({minute_index[i], row});
  }
  j["minute_blocks"] = rows;
  return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  GroundTruth g;
  try {
    g.grid_w = j.at("grid_w").get<int>();
    g.grid_h = j.at("grid_h").get<int>();
    for (const auto& e : j.at("events")) {
      g.events.push_back({e.at("start_ms").get<std::int64_t>(), e.at("end_ms").get<std::int64_t>(), e.at("path").get<int>()});
    }
    g.walkable = j.at("walkable").get<std::vector<std::uint8_t>>();
    for (int l : j.at("labels").get<std::vector<int>>()) g.labels.push_back(static_cast<BlockLabel>(l));
    if (j.contains("minute_blocks")) {
      for (const auto& r : j.at("minute_blocks")) {
        g.minute_index.push_back(r.at(0).get<std::int64_t>());
        g.minute_block_activity.push_back(r.at(1).get<std::vector<float>>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("ground truth: ") + e.what());
  }
  return g;
}

namespace {

double path_length(const BlockPath& p) {
  double len = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) len += std::hypot(p[i].first - p[i - 1].first, p[i].second - p[i - 1].second);
  return len;
}

int clamp_block(double v, int n) { return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1); }

int motion_bin(double dx, double dy) {
  double angle = std::atan2(-dy, dx);
  int bin = static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0)));
  return ((bin % kDirBins) + kDirBins) % kDirBins;
}

void mark_path(std::vector<std::uint8_t>& mask, const BlockPath& p, int gw, int gh) {
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double len = std::hypot(p[i].first - p[i - 1].first, p[i].second - p[i - 1].second);
    const int steps = std::max(1, static_cast<int>(std::ceil(len * 20.0)));
    for (int s = 0; s < steps; ++s) {
      const double f = static_cast<double>(s) / steps;
      const double x = p[i - 1].first + f * (p[i].first - p[i - 1].first);
      const double y = p[i - 1].second + f * (p[i].second - p[i - 1].second);
      mask[static_cast<std::size_t>(clamp_block(y, gh)) * gw + clamp_block(x, gw)] = 1;
    }
  }
}

}  // namespace

StreamGenerator::StreamGenerator(Scenario scenario, int days)
    : sc_(std::move(scenario)),
      days_(days),
      noise_rng_(derive_seed(sc_.seed, "noise")),
      pixel_rng_(derive_seed(sc_.seed, "pixels")) {
  if (days < 1) throw InvalidParameter("gen_stream: days must be >= 1");
  sc_.validate();
  frames_per_day_ = sc_.frames_per_day();
  event_paths_ = sc_.effective_event_paths();
  profile_ = gen_daily_profile(sc_.profile, sc_.profile_level);

  const std::size_t k = static_cast<std::size_t>(sc_.grid_w) * sc_.grid_h;
  gt_.grid_w = sc_.grid_w;
  gt_.grid_h = sc_.grid_h;
  gt_.walkable.assign(k, 0);
  gt_.labels.assign(k, BlockLabel::none);
  if (sc_.events_per_day > 0.0 && sc_.profile_level > 0.0) {
    for (const auto& p : event_paths_) mark_path(gt_.walkable, p, sc_.grid_w, sc_.grid_h);
  }
  for (const auto& w : sc_.walkers) {
    if (w.density > 0.0) mark_path(gt_.walkable, w.path, sc_.grid_w, sc_.grid_h);
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (gt_.walkable[i]) gt_.labels[i] = BlockLabel::moving;
  }
  for (const auto& d : sc_.dwellers) {
    if (d.density > 0.0 && d.duration_s > 0.0) {
      gt_.labels[static_cast<std::size_t>(d.by) * sc_.grid_w + d.bx] = BlockLabel::in_place;
    }
  }
  minute_acc_.assign(k, 0.0);
}

std::int64_t StreamGenerator::timestamp_ms(std::int64_t tick) const {
  const std::int64_t day = tick / frames_per_day_;
  const std::int64_t i = tick % frames_per_day_;
  return day * 86'400'000LL + static_cast<std::int64_t>(std::llround(sc_.start_hour * 3'600'000.0)) +
         static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 1000.0 / sc_.frame_rate));
}

void StreamGenerator::schedule_day(int day) {
  const double day0_s = day * 86400.0 + sc_.start_hour * 3600.0;
  const double window_s = sc_.day_hours * 3600.0;
  {
    // keep only traversals still running into the new day
    std::vector<Traversal> carry;
    for (std::size_t i : active_) carry.push_back(traversals_[i]);
    traversals_ = std::move(carry);
    active_.clear();
    for (std::size_t i = 0; i < traversals_.size(); ++i) active_.push_back(i);
    next_traversal_ = traversals_.size();
  }

  for (const auto& w : sc_.walkers) {
    const double len = path_length(w.path);
    const double end = w.end_s < 0.0 ? window_s : std::min(w.end_s, window_s);
    for (double t = w.start_s; t < end; t += w.period_s) {
      traversals_.push_back({&w.path, day0_s + t, w.speed_bps, w.density, len});
      if (w.period_s <= 0.0) break;
    }
  }

  std::mt19937_64 rng(derive_seed(sc_.seed, "events:" + std::to_string(day)));
  const double mean_count = sc_.events_per_day * sc_.profile_level;
  if (mean_count <= 0.0 || sc_.event_density <= 0.0) return sort_pending();
  // minute weights restricted to the window
  const int m0 = static_cast<int>(std::floor(sc_.start_hour * 60.0));
  const int m1 = static_cast<int>(std::ceil((sc_.start_hour + sc_.day_hours) * 60.0));
  std::vector<double> weights;
  for (int m = m0; m < m1 && m < 1440; ++m) weights.push_back(profile_[m]);
  double mass = 0.0;
  for (double w : weights) mass += w;
  if (mass <= 0.0) return sort_pending();

  int count;
  if (sc_.exact_event_count) {
    count = static_cast<int>(std::llround(mean_count));
  } else {
    std::poisson_distribution<int> pois(mean_count);
    count = pois(rng);
  }
  std::discrete_distribution<int> pick_minute(weights.begin(), weights.end());
  std::uniform_real_distribution<double> within(0.0, 60.0);
  std::uniform_int_distribution<int> pick_path(0, static_cast<int>(event_paths_.size()) - 1);
  const double latest = window_s - sc_.event_duration_s;
  const double spacing = sc_.event_duration_s + sc_.min_event_gap_s;
  // the minimum gap holds between events sharing a path
  std::vector<std::pair<double, int>> starts;
  for (int e = 0; e < count; ++e) {
    const int p = pick_path(rng);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double t = (m0 + pick_minute(rng)) * 60.0 + within(rng) - sc_.start_hour * 3600.0;
      if (t < 0.0 || t > latest) continue;
      bool clash = false;
      for (auto [s, sp] : starts) {
        if (sp == p && std::abs(s - t) < spacing) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      starts.emplace_back(t, p);
      break;
    }
  }
  std::sort(starts.begin(), starts.end());
  for (auto [t, p] : starts) {
    const double len = path_length(event_paths_[p]);
    const double speed = len / sc_.event_duration_s;
    // integer-ms boundaries so the recorded interval matches the emitted frames
    const auto start_ms = static_cast<std::int64_t>(std::llround((day0_s + t) * 1000.0));
    const auto dur_ms = static_cast<std::int64_t>(std::llround(sc_.event_duration_s * 1000.0));
    traversals_.push_back({&event_paths_[p], start_ms / 1000.0, speed, sc_.event_density, len});
    gt_.events.push_back({start_ms, start_ms + dur_ms, p});
  }
  sort_pending();
}

void StreamGenerator::sort_pending() {
  std::stable_sort(traversals_.begin() + static_cast<std::ptrdiff_t>(next_traversal_), traversals_.end(),
                   [](const Traversal& a, const Traversal& b) { return a.t0_s < b.t0_s; });
}

void StreamGenerator::advance_active(double t_s) {
  while (next_traversal_ < traversals_.size() && traversals_[next_traversal_].t0_s <= t_s) {
    active_.push_back(next_traversal_++);
  }
  std::erase_if(active_, [&](std::size_t i) {
    const Traversal& tr = traversals_[i];
    return t_s - tr.t0_s >= tr.length / tr.speed_bps;
  });
}

bool StreamGenerator::position_at(const Traversal& tr, double t_s, Position& pos) const {
  const double dt = t_s - tr.t0_s;
  if (dt < 0.0) return false;
  double s = dt * tr.speed_bps;
  if (s >= tr.length) return false;
  const BlockPath& p = *tr.path;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double dx = p[i].first - p[i - 1].first;
    const double dy = p[i].second - p[i - 1].second;
    const double seg = std::hypot(dx, dy);
    if (s <= seg || i + 1 == p.size()) {
      const double f = seg > 0.0 ? s / seg : 0.0;
      pos = {p[i - 1].first + f * dx, p[i - 1].second + f * dy, motion_bin(dx, dy)};
      return true;
    }
    s -= seg;
  }
  return false;
}

void StreamGenerator::deposit_actors(double t_s, MotionFrame& f, int day) {
  for (std::size_t i : active_) {
    const Traversal& tr = traversals_[i];
    Position pos;
    if (!position_at(tr, t_s, pos)) continue;
    MotionBlock& b = f.at(clamp_block(pos.x, sc_.grid_w), clamp_block(pos.y, sc_.grid_h));
    b.density += tr.density;
    b.dir_hist[pos.dir_bin] += tr.density;
  }
  const double in_window = t_s - (day * 86400.0 + sc_.start_hour * 3600.0);
  for (const auto& d : sc_.dwellers) {
    if (in_window < d.start_s || in_window >= d.start_s + d.duration_s) continue;
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    const double v = d.density * jitter(noise_rng_);
    MotionBlock& b = f.at(d.bx, d.by);
    b.density += v;
    for (auto& h : b.dir_hist) h += v / kDirBins;
  }
}

void StreamGenerator::record_minute(const MotionFrame& planted) {
  const std::int64_t minute = planted.timestamp_ms / kMsPerMinute;
  auto flush = [&] {
    if (minute_frames_ == 0) return;
    std::vector<float> row(minute_acc_.size());
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = static_cast<float>(minute_acc_[k] / minute_frames_);
    gt_.minute_index.push_back(cur_minute_);
    gt_.minute_block_activity.push_back(std::move(row));
    std::fill(minute_acc_.begin(), minute_acc_.end(), 0.0);
    minute_frames_ = 0;
  };
  if (minute != cur_minute_) {
    flush();
    cur_minute_ = minute;
  }
  for (std::size_t k = 0; k < minute_acc_.size(); ++k) minute_acc_[k] += planted.blocks[k].density;
  ++minute_frames_;
  if (tick_ == total_frames()) flush();
}

bool StreamGenerator::next(MotionFrame& out) {
  if (tick_ >= total_frames()) return false;
  const int day = static_cast<int>(tick_ / frames_per_day_);
  if (day != scheduled_day_) {
    schedule_day(day);
    scheduled_day_ = day;
  }
  const std::int64_t ts = timestamp_ms(tick_);
  if (out.grid_w != sc_.grid_w || out.grid_h != sc_.grid_h || out.blocks.size() != static_cast<std::size_t>(sc_.grid_w) * sc_.grid_h) {
    out = MotionFrame::zeros(sc_.grid_w, sc_.grid_h);
  } else {
    std::fill(out.blocks.begin(), out.blocks.end(), MotionBlock{});
  }
  out.timestamp_ms = ts;
  advance_active(static_cast<double>(ts) / 1000.0);
  deposit_actors(static_cast<double>(ts) / 1000.0, out, day);
  ++tick_;
  record_minute(out);
  if (sc_.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sc_.noise_sigma);
    const double lim = 3.0 * sc_.noise_sigma;
    for (auto& b : out.blocks) {
      const double n = std::clamp(noise(noise_rng_), -lim, lim);
      b.density = std::max(0.0, b.density + n);
      if (b.density == 0.0) b.dir_hist.fill(0.0);
    }
  }
  return true;
}

bool StreamGenerator::next_pixels(GrayFrame& out) {
  if (tick_ >= total_frames()) return false;
  const int day = static_cast<int>(tick_ / frames_per_day_);
  if (day != scheduled_day_) {
    schedule_day(day);
    scheduled_day_ = day;
  }
  const std::int64_t ts = timestamp_ms(tick_);
  const double t_s = static_cast<double>(ts) / 1000.0;
  const int bs = sc_.block_size;
  out.width = sc_.grid_w * bs;
  out.height = sc_.grid_h * bs;
  out.timestamp_ms = ts;
  out.pixels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
  const double radius = 0.3 * bs;
  auto disc = [&](double cx, double cy) {
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(out.width - 1, static_cast<int>(std::ceil(cx + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(out.height - 1, static_cast<int>(std::ceil(cy + radius)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x + 0.5 - cx;
        const double dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= radius * radius) out.pixels[static_cast<std::size_t>(y) * out.width + x] = 200;
      }
    }
  };
  advance_active(t_s);
  for (std::size_t i : active_) {
    Position pos;
    if (position_at(traversals_[i], t_s, pos)) disc(pos.x * bs, pos.y * bs);
  }
  const double in_window = t_s - (day * 86400.0 + sc_.start_hour * 3600.0);
  std::uniform_int_distribution<int> shake(-2, 2);
  for (const auto& d : sc_.dwellers) {
    if (in_window < d.start_s || in_window >= d.start_s + d.duration_s) continue;
    disc((d.bx + 0.5) * bs + shake(pixel_rng_), (d.by + 0.5) * bs + shake(pixel_rng_));
  }
  MotionFrame planted = MotionFrame::zeros(sc_.grid_w, sc_.grid_h, ts);
  deposit_actors(t_s, planted, day);
  ++tick_;
  record_minute(planted);
  return true;
}

FeatureStream gen_stream(const Scenario& scenario, int days) {
  StreamGenerator gen(scenario, days);
  FeatureStream fs;
  fs.frames.reserve(static_cast<std::size_t>(gen.total_frames()));
  MotionFrame f;
  while (gen.next(f)) fs.frames.push_back(f);
  fs.truth = gen.ground_truth();
  return fs;
}

}  // namespace actv
