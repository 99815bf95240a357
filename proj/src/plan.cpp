#include "actv/plan.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "actv/error.hpp"

namespace actv {

void PathGraph::validate() const {
  std::set<std::string> ids;
  for (const auto& n : nodes) {
    if (n.id.empty()) throw InvalidParameter("graph: node id must be non-empty");
    if (!ids.insert(n.id).second) throw InvalidParameter("graph: duplicate node id '" + n.id + "'");
  }
  std::set<std::string> eids;
  for (const auto& e : edges) {
    if (!eids.insert(e.id).second) throw InvalidParameter("graph: duplicate edge id '" + e.id + "'");
    if (!ids.count(e.from) || !ids.count(e.to)) {
      throw InvalidParameter("graph: edge '" + e.id + "' references an unknown node");
    }
    if (!(e.len_m > 0.0) || !std::isfinite(e.len_m)) throw InvalidParameter("graph: edge '" + e.id + "' len_m must be > 0");
    if (!(e.base_cost >= 0.0) || !std::isfinite(e.base_cost)) {
      throw InvalidParameter("graph: edge '" + e.id + "' base_cost must be >= 0");
    }
    for (int b : e.blocks) {
      if (b < 0) throw InvalidParameter("graph: edge '" + e.id + "' has a negative block index");
    }
  }
}

std::optional<std::size_t> PathGraph::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> PathGraph::edge_index(const std::string& id) const {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].id == id) return i;
  }
  return std::nullopt;
}

PathGraph graph_from_json(const nlohmann::json& j) {
  PathGraph g;
  try {
    for (const auto& n : j.at("nodes")) {
      g.nodes.push_back({n.at("id").get<std::string>(), n.value("x", 0.0), n.value("y", 0.0)});
    }
    for (const auto& e : j.at("edges")) {
      GraphEdge ge;
      ge.from = e.at("from").get<std::string>();
      ge.to = e.at("to").get<std::string>();
      ge.id = e.value("id", ge.from + "-" + ge.to);
      ge.len_m = e.at("len_m").get<double>();
      ge.cam = e.value("cam", std::string());
      if (e.contains("blocks")) ge.blocks = e.at("blocks").get<std::vector<int>>();
      ge.base_cost = e.value("base_cost", ge.len_m);
      g.edges.push_back(std::move(ge));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidParameter(std::string("graph: ") + ex.what());
  }
  g.validate();
  return g;
}

void PlanQuery::validate() const {
  if (!(w1 >= 0.0) || !(w2 >= 0.0)) throw InvalidParameter("plan query: weights must be >= 0");
  if (mode == PlanMode::realtime && !(w1 + w2 > 0.0)) throw InvalidParameter("plan query: w1 + w2 must be > 0");
  if (!(lambda > 0.0)) throw InvalidParameter("plan query: lambda must be > 0");
  if (!(epsilon >= 0.0)) throw InvalidParameter("plan query: epsilon must be >= 0");
  if (!(staleness_s >= 0.0)) throw InvalidParameter("plan query: staleness must be >= 0");
  if (minute < 0 || minute >= kMinutesPerDay) throw InvalidParameter("plan query: minute outside [0, 1439]");
}

double segment_cost(const MotionFrame& profile, std::span<const int> blocks, double lambda) {
  if (!(lambda > 0.0)) throw InvalidParameter("segment_cost: lambda must be > 0");
  if (profile.blocks.empty()) return 0.0;
  if (blocks.empty()) return lambda * profile.mean_density();
  double s = 0.0;
  for (int b : blocks) {
    if (b < 0 || static_cast<std::size_t>(b) >= profile.blocks.size()) {
      throw QueryError("segment_cost: block index " + std::to_string(b) + " outside the camera grid");
    }
    s += profile.blocks[static_cast<std::size_t>(b)].density;
  }
  return lambda * s / static_cast<double>(blocks.size());
}

namespace {

int minute_of(std::int64_t time_ms) {
  const std::int64_t m = time_ms >= 0 ? time_ms / kMsPerMinute : (time_ms - kMsPerMinute + 1) / kMsPerMinute;
  return static_cast<int>(((m % kMinutesPerDay) + kMinutesPerDay) % kMinutesPerDay);
}

const IsochronalStore& store_for(const StoreSet& stores, const GraphEdge& e) {
  auto it = stores.find(e.cam);
  if (it == stores.end() || it->second == nullptr) {
    throw QueryError("segment '" + e.id + "': no isochronal store for camera '" + e.cam + "'");
  }
  return *it->second;
}

bool flagged(const BinaryProfile& p, std::span<const int> blocks) {
  if (blocks.empty()) return p.any();
  for (int b : blocks) {
    if (b < 0 || static_cast<std::size_t>(b) >= p.flags.size()) {
      throw QueryError("binary profile: block index " + std::to_string(b) + " outside the camera grid");
    }
    if (p.flags[static_cast<std::size_t>(b)]) return true;
  }
  return false;
}

// Per-edge evaluation shared by the path costs and the planner.
class EdgeCosts {
 public:
  EdgeCosts(const PathGraph& g, const StoreSet& stores, double epsilon) : g_(g), stores_(stores), eps_(epsilon) {}

  bool feasible(const GraphEdge& e) {
    if (e.cam.empty()) return true;
    auto it = profiles_.find(e.cam);
    if (it == profiles_.end()) it = profiles_.emplace(e.cam, store_for(stores_, e).binarize(eps_)).first;
    return flagged(it->second, e.blocks);
  }

  double longterm(const GraphEdge& e, int minute, double lambda) const {
    if (e.cam.empty()) return 0.0;
    return segment_cost(store_for(stores_, e).mean(minute), e.blocks, lambda);
  }

  const GraphEdge& edge(const std::string& id) const {
    auto i = g_.edge_index(id);
    if (!i) throw QueryError("unknown segment id '" + id + "'");
    return g_.edges[*i];
  }

 private:
  const PathGraph& g_;
  const StoreSet& stores_;
  double eps_;
  std::map<std::string, BinaryProfile> profiles_;
};

bool fresh(const MotionFrame& f, std::int64_t time_ms, double staleness_s) {
  return std::abs(static_cast<double>(time_ms - f.timestamp_ms)) <= staleness_s * 1000.0;
}

// nullopt = live data unusable for this edge.
std::optional<double> live_cost(const GraphEdge& e, const LiveSet& live, std::int64_t time_ms, const PlanQuery& q) {
  if (e.cam.empty()) return 0.0;
  auto it = live.find(e.cam);
  if (it == live.end() || !fresh(it->second.m_S1, time_ms, q.staleness_s)) return std::nullopt;
  double c = segment_cost(it->second.m_S1, e.blocks, q.lambda);
  if (q.include_moving && it->second.m_S2) {
    if (!fresh(*it->second.m_S2, time_ms, q.staleness_s)) return std::nullopt;
    c += segment_cost(*it->second.m_S2, e.blocks, q.lambda);
  }
  return c;
}

}  // namespace

std::optional<double> cost1(const PathGraph& g, std::span<const std::string> segments, int minute,
                            const StoreSet& stores, double lambda, double epsilon) {
  if (minute < 0 || minute >= kMinutesPerDay) throw InvalidParameter("cost1: minute outside [0, 1439]");
  EdgeCosts ec(g, stores, epsilon);
  double sum = 0.0;
  bool ok = true;
  for (const auto& id : segments) {
    const GraphEdge& e = ec.edge(id);
    if (!ec.feasible(e)) ok = false;
    sum += ec.longterm(e, minute, lambda);
  }
  if (!ok) return std::nullopt;
  return sum;
}

Cost2Result cost2(const PathGraph& g, std::span<const std::string> segments, std::int64_t time_ms,
                  const StoreSet& stores, const LiveSet& live, const PlanQuery& q) {
  Cost2Result r;
  const auto c1 = cost1(g, segments, minute_of(time_ms), stores, q.lambda, q.epsilon);
  if (!c1) return r;
  double sum = 0.0;
  EdgeCosts ec(g, stores, q.epsilon);
  for (const auto& id : segments) {
    auto c = live_cost(ec.edge(id), live, time_ms, q);
    if (!c) {
      r.degraded = true;
      break;
    }
    sum += *c;
  }
  r.value = q.w1 * *c1 + (r.degraded ? 0.0 : q.w2 * sum);
  return r;
}

namespace {

struct Label {
  double cost = 0.0;
  std::size_t n_edges = 0;
  std::vector<std::string> path;  // node ids
  std::vector<std::size_t> edges;
};

bool better(const Label& a, const Label& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.n_edges != b.n_edges) return a.n_edges < b.n_edges;
  return a.path < b.path;
}

struct Entry {
  Label label;
  std::size_t node;
};

struct Worse {
  bool operator()(const Entry& a, const Entry& b) const { return better(b.label, a.label); }
};

}  // namespace

PlanResult plan_path(const PathGraph& g, const PlanQuery& q, const StoreSet& stores, const LiveSet& live) {
  q.validate();
  const auto src = g.node_index(q.origin);
  const auto dst = g.node_index(q.goal);
  if (!src) throw QueryError("plan: unknown origin node '" + q.origin + "'");
  if (!dst) throw QueryError("plan: unknown goal node '" + q.goal + "'");
  if (*src == *dst) throw QueryError("plan: origin and goal must differ");

  const bool realtime = q.mode == PlanMode::realtime;
  const int minute = realtime ? minute_of(q.time_ms) : q.minute;
  EdgeCosts ec(g, stores, q.epsilon);

  bool degraded = false;
  std::vector<std::optional<double>> live_costs(g.edges.size());
  if (realtime) {
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      live_costs[i] = live_cost(g.edges[i], live, q.time_ms, q);
      if (!live_costs[i]) degraded = true;
    }
  }

  std::vector<std::vector<std::size_t>> adj(g.nodes.size());
  std::vector<double> activity(g.edges.size(), 0.0);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const GraphEdge& e = g.edges[i];
    if (!ec.feasible(e)) continue;
    const double lt = ec.longterm(e, minute, q.lambda);
    activity[i] = realtime ? q.w1 * lt + (degraded ? 0.0 : q.w2 * *live_costs[i]) : lt;
    adj[*g.node_index(e.from)].push_back(i);
    if (e.to != e.from) adj[*g.node_index(e.to)].push_back(i);
  }

  std::vector<std::optional<Label>> best(g.nodes.size());
  std::vector<bool> settled(g.nodes.size(), false);
  std::priority_queue<Entry, std::vector<Entry>, Worse> open;
  Label start;
  start.path.push_back(g.nodes[*src].id);
  best[*src] = start;
  open.push({start, *src});

  PlanResult r;
  r.degraded = degraded;
  while (!open.empty()) {
    Entry cur = open.top();
    open.pop();
    if (settled[cur.node]) continue;
    settled[cur.node] = true;
    if (cur.node == *dst) {
      r.feasible = true;
      r.nodes = cur.label.path;
      for (std::size_t k = 0; k < cur.label.edges.size(); ++k) {
        const GraphEdge& e = g.edges[cur.label.edges[k]];
        r.segments.push_back({e.id, r.nodes[k], r.nodes[k + 1], e.base_cost, activity[cur.label.edges[k]]});
        r.base_cost += e.base_cost;
        r.activity_cost += activity[cur.label.edges[k]];
      }
      r.total_cost = cur.label.cost;
      return r;
    }
    for (std::size_t ei : adj[cur.node]) {
      const GraphEdge& e = g.edges[ei];
      const std::size_t next = *g.node_index(g.nodes[cur.node].id == e.from ? e.to : e.from);
      if (settled[next]) continue;
      Label l = cur.label;
      l.cost += e.base_cost + activity[ei];
      ++l.n_edges;
      l.path.push_back(g.nodes[next].id);
      l.edges.push_back(ei);
      if (!best[next] || better(l, *best[next])) {
        best[next] = l;
        open.push({std::move(l), next});
      }
    }
  }
  return r;
}

nlohmann::ordered_json PlanResult::to_json() const {
  nlohmann::ordered_json j;
  j["feasible"] = feasible;
  j["degraded"] = degraded;
  j["nodes"] = nodes;
  auto segs = nlohmann::ordered_json::array();
  for (const auto& s : segments) {
    segs.push_back({{"edge", s.edge}, {"from", s.from}, {"to", s.to}, {"base", s.base}, {"activity", s.activity},
                    {"total", s.base + s.activity}});
  }
  j["segments"] = std::move(segs);
  j["base_cost"] = base_cost;
  j["activity_cost"] = activity_cost;
  j["total_cost"] = total_cost;
  return j;
}

}  // namespace actv
