#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "actv/isochron.hpp"
#include "actv/motion.hpp"

namespace actv {

struct GraphNode {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

// Undirected segment between two waypoints. `cam` empty = uncovered.
// `blocks` lists the camera's block indices (row-major) viewing the segment;
// empty means the whole view.
struct GraphEdge {
  std::string id;
  std::string from;
  std::string to;
  double len_m = 1.0;
  std::string cam;
  std::vector<int> blocks;
  double base_cost = 0.0;
};

struct PathGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  // Checks ids are unique, lengths and base costs valid, endpoints exist.
  void validate() const;
  std::optional<std::size_t> node_index(const std::string& id) const;
  std::optional<std::size_t> edge_index(const std::string& id) const;
};

// JSON: {"nodes":[{"id","x","y"}], "edges":[{"id"?, "from","to","len_m","cam"?,
// "blocks"?, "base_cost"?}]}. Edge id defaults to "from-to"; base_cost to len_m.
PathGraph graph_from_json(const nlohmann::json& j);

using StoreSet = std::map<std::string, const IsochronalStore*>;

struct LiveBands {
  MotionFrame m_S1;
  std::optional<MotionFrame> m_S2;
};
using LiveSet = std::map<std::string, LiveBands>;

enum class PlanMode { offline, realtime };

struct PlanQuery {
  std::string origin;
  std::string goal;
  PlanMode mode = PlanMode::offline;
  int minute = 0;                 // offline: isochronal minute t*
  std::int64_t time_ms = 0;       // realtime: chronological t
  double w1 = 0.5;
  double w2 = 0.5;
  double lambda = 1.0;
  double epsilon = 0.015;         // binarization threshold for M'
  double staleness_s = 5.0;
  bool include_moving = false;    // add live m_S2 to the realtime term

  void validate() const;
};

// lambda x mean density over the listed blocks (all blocks when empty).
double segment_cost(const MotionFrame& profile, std::span<const int> blocks, double lambda);

// Sum of segment costs at minute t*; nullopt when any covered segment's
// binary profile is 0. Unknown segment or camera id throws QueryError.
std::optional<double> cost1(const PathGraph& g, std::span<const std::string> segments, int minute,
                            const StoreSet& stores, double lambda, double epsilon);

struct Cost2Result {
  std::optional<double> value;
  bool degraded = false;  // live data missing or stale; w1 term only
};

Cost2Result cost2(const PathGraph& g, std::span<const std::string> segments, std::int64_t time_ms,
                  const StoreSet& stores, const LiveSet& live, const PlanQuery& q);

struct SegmentBreakdown {
  std::string edge;
  std::string from;
  std::string to;
  double base = 0.0;
  double activity = 0.0;
};

struct PlanResult {
  bool feasible = false;
  bool degraded = false;
  std::vector<std::string> nodes;
  std::vector<SegmentBreakdown> segments;
  double base_cost = 0.0;
  double activity_cost = 0.0;
  double total_cost = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Uniform-cost search minimizing base + activity cost over feasible edges.
// Ties: fewer edges, then lexicographically smaller node-id sequence.
PlanResult plan_path(const PathGraph& g, const PlanQuery& q, const StoreSet& stores, const LiveSet& live = {});

}  // namespace actv
