#include "actv/motion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "actv/error.hpp"
#include "text.hpp"

namespace actv {

int MotionBlock::dominant_direction() const {
  return static_cast<int>(std::max_element(dir_hist.begin(), dir_hist.end()) - dir_hist.begin());
}

MotionFrame MotionFrame::zeros(int grid_w, int grid_h, std::int64_t timestamp_ms) {
  if (grid_w <= 0 || grid_h <= 0) throw InvalidParameter("motion frame grid must be positive");
  MotionFrame f;
  f.grid_w = grid_w;
  f.grid_h = grid_h;
  f.timestamp_ms = timestamp_ms;
  f.blocks.resize(static_cast<std::size_t>(grid_w) * grid_h);
  return f;
}

double MotionFrame::mean_density() const {
  if (blocks.empty()) return 0.0;
  double s = 0.0;
  for (const auto& b : blocks) s += b.density;
  return s / static_cast<double>(blocks.size());
}

namespace {

constexpr double kSobelScale = 2040.0;  // max |Sobel| per axis on prev+curr (4 * 510)

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

int direction_bin(double vx, double vy_image) {
  // image rows grow downward; flip so 90 degrees points up
  double angle = std::atan2(-vy_image, vx);
  int bin = static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0)));
  return ((bin % kDirBins) + kDirBins) % kDirBins;
}

void process_block_row(const GrayFrame& prev, const GrayFrame& curr, int by, int block_size,
                       double noise_floor, MotionFrame& out) {
  const int w = curr.width;
  const int h = curr.height;
  auto sum = [&](int x, int y) {
    x = clampi(x, 0, w - 1);
    y = clampi(y, 0, h - 1);
    return static_cast<int>(prev.at(x, y)) + static_cast<int>(curr.at(x, y));
  };
  const int y0 = by * block_size;
  const int y1 = std::min(h, y0 + block_size);
  for (int bx = 0; bx < out.grid_w; ++bx) {
    const int x0 = bx * block_size;
    const int x1 = std::min(w, x0 + block_size);
    MotionBlock blk;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const int dt = static_cast<int>(curr.at(x, y)) - static_cast<int>(prev.at(x, y));
        const double diff = std::abs(dt);
        if (diff == 0.0 || diff < noise_floor) continue;
        const int gx = (sum(x + 1, y - 1) + 2 * sum(x + 1, y) + sum(x + 1, y + 1)) -
                       (sum(x - 1, y - 1) + 2 * sum(x - 1, y) + sum(x - 1, y + 1));
        const int gy = (sum(x - 1, y + 1) + 2 * sum(x, y + 1) + sum(x + 1, y + 1)) -
                       (sum(x - 1, y - 1) + 2 * sum(x, y - 1) + sum(x + 1, y - 1));
        const double gmag = std::hypot(static_cast<double>(gx), static_cast<double>(gy));
        const double contrib = diff * (1.0 + gmag / kSobelScale);
        blk.density += contrib;
        if (gx != 0 || gy != 0) {
          const double s = dt > 0 ? -1.0 : 1.0;
          blk.dir_hist[direction_bin(s * gx, s * gy)] += contrib;
        }
      }
    }
    const double count = static_cast<double>((x1 - x0) * (y1 - y0));
    blk.density /= count;
    for (auto& v : blk.dir_hist) v /= count;
    out.at(bx, by) = blk;
  }
}

}  // namespace

MotionFrame extract_motion(const GrayFrame& prev, const GrayFrame& curr, int block_size,
                           double noise_floor, Exec exec) {
  if (block_size <= 0) throw InvalidParameter("extract_motion: block_size must be > 0");
  if (noise_floor < 0.0) throw InvalidParameter("extract_motion: noise_floor must be >= 0");
  if (prev.width != curr.width || prev.height != curr.height) {
    throw RejectedInput("extract_motion: frame dimensions differ");
  }
  if (curr.width <= 0 || curr.height <= 0 ||
      curr.pixels.size() != static_cast<std::size_t>(curr.width) * curr.height ||
      prev.pixels.size() != curr.pixels.size()) {
    throw RejectedInput("extract_motion: pixel count does not match dimensions");
  }
  const int gw = (curr.width + block_size - 1) / block_size;
  const int gh = (curr.height + block_size - 1) / block_size;
  MotionFrame out = MotionFrame::zeros(gw, gh, curr.timestamp_ms);
  const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (int by = 0; by < gh; ++by) {
    process_block_row(prev, curr, by, block_size, noise_floor, out);
  }
  return out;
}

MotionFrame aggregate_minute(std::span<const MotionFrame> frames) {
  if (frames.empty()) throw InvalidParameter("aggregate_minute: empty sequence");
  const MotionFrame& first = frames.front();
  std::int64_t t_min = first.timestamp_ms;
  for (const auto& f : frames) {
    if (!f.same_grid(first) || f.blocks.size() != first.blocks.size()) {
      throw RejectedInput("aggregate_minute: frames have different grids");
    }
    t_min = std::min(t_min, f.timestamp_ms);
  }
  MotionFrame out = MotionFrame::zeros(first.grid_w, first.grid_h);
  out.timestamp_ms = (t_min >= 0 ? t_min / kMsPerMinute : (t_min - kMsPerMinute + 1) / kMsPerMinute) *
                     kMsPerMinute;
  if (frames.size() == 1) {
    out.blocks = first.blocks;
    return out;
  }
  for (const auto& f : frames) {
    for (std::size_t k = 0; k < out.blocks.size(); ++k) {
      for (int c = 0; c < kBlockComponents; ++c) out.blocks[k].component(c) += f.blocks[k].component(c);
    }
  }
  const double n = static_cast<double>(frames.size());
  for (auto& b : out.blocks) {
    for (int c = 0; c < kBlockComponents; ++c) b.component(c) /= n;
  }
  return out;
}

std::string to_jsonl(const MotionFrame& f, std::string_view band) {
  std::string s;
  s.reserve(32 + f.blocks.size() * 96);
  s += "{\"t\":";
  s += std::to_string(f.timestamp_ms);
  s += ",\"gw\":";
  s += std::to_string(f.grid_w);
  s += ",\"gh\":";
  s += std::to_string(f.grid_h);
  s += ",\"blocks\":[";
  for (std::size_t k = 0; k < f.blocks.size(); ++k) {
    if (k) s += ',';
    s += '[';
    detail::append_double(s, f.blocks[k].density);
    s += ",[";
    for (int b = 0; b < kDirBins; ++b) {
      if (b) s += ',';
      detail::append_double(s, f.blocks[k].dir_hist[b]);
    }
    s += "]]";
  }
  s += ']';
  if (!band.empty()) {
    s += ",\"band\":\"";
    s += band;
    s += '"';
  }
  s += '}';
  return s;
}

MotionFrame parse_jsonl(std::string_view line, std::string* band) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    MotionFrame f = MotionFrame::zeros(j.at("gw").get<int>(), j.at("gh").get<int>(), j.at("t").get<std::int64_t>());
    const auto& blocks = j.at("blocks");
    if (blocks.size() != f.blocks.size()) throw RejectedInput("motion jsonl: block count != gw*gh");
    for (std::size_t k = 0; k < f.blocks.size(); ++k) {
      const auto& b = blocks[k];
      f.blocks[k].density = b.at(0).get<double>();
      const auto& h = b.at(1);
      if (h.size() != kDirBins) throw RejectedInput("motion jsonl: histogram must have 8 bins");
      for (int i = 0; i < kDirBins; ++i) f.blocks[k].dir_hist[i] = h[i].get<double>();
    }
    if (band) *band = j.contains("band") ? j["band"].get<std::string>() : std::string{};
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw RejectedInput(std::string("motion jsonl: ") + e.what());
  }
}

void write_jsonl(std::ostream& os, const MotionFrame& f, std::string_view band) {
  os << to_jsonl(f, band) << '\n';
}

std::vector<MotionFrame> read_jsonl_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<MotionFrame> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_jsonl(line));
  }
  return out;
}

GrayFrame read_pgm_frame(const std::filesystem::path& path, std::int64_t timestamp_ms) {
  Image8 img = read_pgm(path);
  return {img.width, img.height, std::move(img.data), timestamp_ms};
}

}  // namespace actv
