#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "actv/motion.hpp"

namespace oracle {

// 10^(-1 / (r T)), the same coefficient written through log10.
inline double alpha(double r, double T) { return std::pow(10.0, -1.0 / (r * T)); }

inline double ema(double prev, double x, double a) { return a * prev + (1.0 - a) * x; }

// Straight-line model of the band computation for one scalar component,
// written against plain arrays: frame-rate high-pass, down-sampled mean,
// short-term low-pass, FIR mean of the clamped-later difference.
struct ScalarBands {
  double a_L1, a_S1;
  int per_update, window;
  double lp_L1 = 0, lp_S1 = 0, acc = 0;
  int n = 0;
  std::deque<double> fir;
  double S1 = 0, S2 = 0, L1 = 0;

  ScalarBands(double aL1, double aS1, int per, int win) : a_L1(aL1), a_S1(aS1), per_update(per), window(win) {}

  bool step(double x, long tick) {
    lp_L1 = ema(lp_L1, x, a_L1);
    L1 = std::max(0.0, x - lp_L1);
    acc += L1;
    ++n;
    if ((tick + 1) % per_update != 0) return false;
    const double u = acc / n;
    acc = 0;
    n = 0;
    lp_S1 = ema(lp_S1, u, a_S1);
    S1 = lp_S1;
    fir.push_back(u - lp_S1);
    if (static_cast<int>(fir.size()) > window) fir.pop_front();
    double s = 0;
    for (double v : fir) s += v;
    S2 = std::max(0.0, s / fir.size());
    return true;
  }
};

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

struct Edge {
  int u, v;
  double w;
};

// Minimum total weight over every simple path from s to t; -1 when none.
inline double brute_force_shortest(int n, const std::vector<Edge>& edges, int s, int t) {
  double best = -1;
  std::vector<bool> seen(n, false);
  std::function<void(int, double)> dfs = [&](int node, double cost) {
    if (node == t) {
      if (best < 0 || cost < best) best = cost;
      return;
    }
    seen[node] = true;
    for (const auto& e : edges) {
      int next = -1;
      if (e.u == node) next = e.v;
      else if (e.v == node) next = e.u;
      if (next < 0 || seen[next]) continue;
      dfs(next, cost + e.w);
    }
    seen[node] = false;
  };
  dfs(s, 0.0);
  return best;
}

inline actv::MotionFrame random_frame(std::mt19937_64& rng, int gw, int gh, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  auto f = actv::MotionFrame::zeros(gw, gh);
  for (auto& b : f.blocks) {
    b.density = u(rng);
    for (auto& h : b.dir_hist) h = u(rng);
  }
  return f;
}

inline actv::MotionFrame uniform_frame(int gw, int gh, double d, std::int64_t t = 0) {
  auto f = actv::MotionFrame::zeros(gw, gh, t);
  for (auto& b : f.blocks) b.density = d;
  return f;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("actv_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
