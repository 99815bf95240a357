#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "actv/exec.hpp"
#include "actv/pgm.hpp"

namespace actv {

inline constexpr int kDirBins = 8;
inline constexpr int kBlockComponents = 1 + kDirBins;
inline constexpr std::int64_t kMsPerMinute = 60'000;

// Grayscale frame with a stream timestamp.
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::int64_t timestamp_ms = 0;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  Image8 image() const { return {width, height, pixels}; }
};

// Motion features of one block: density plus an 8-bin direction histogram
// over {0, 45, ..., 315} degrees (0 = +x, 90 = up in image space).
struct MotionBlock {
  double density = 0.0;
  std::array<double, kDirBins> dir_hist{};

  double& component(int c) { return c == 0 ? density : dir_hist[c - 1]; }
  double component(int c) const { return c == 0 ? density : dir_hist[c - 1]; }

  // Single direction label; ties go to the lowest bin.
  int dominant_direction() const;

  bool operator==(const MotionBlock&) const = default;
};

struct MotionFrame {
  int grid_w = 0;
  int grid_h = 0;
  std::vector<MotionBlock> blocks;
  std::int64_t timestamp_ms = 0;

  static MotionFrame zeros(int grid_w, int grid_h, std::int64_t timestamp_ms = 0);

  std::size_t size() const { return blocks.size(); }
  MotionBlock& at(int bx, int by) { return blocks[static_cast<std::size_t>(by) * grid_w + bx]; }
  const MotionBlock& at(int bx, int by) const { return blocks[static_cast<std::size_t>(by) * grid_w + bx]; }
  bool same_grid(const MotionFrame& o) const { return grid_w == o.grid_w && grid_h == o.grid_h; }
  double mean_density() const;

  bool operator==(const MotionFrame&) const = default;
};

struct MotionParams {
  int block_size = 16;
  double noise_floor = 8.0;
};

// Block frame-difference motion detector. Pixels whose absolute temporal
// difference is below noise_floor are ignored; the remaining differences are
// weighted by (1 + normalized Sobel magnitude of prev+curr) and summed per
// block, then divided by the block's actual pixel count. The direction of a
// moving pixel is its normal-flow direction, -sign(dI/dt) * grad(I).
MotionFrame extract_motion(const GrayFrame& prev, const GrayFrame& curr, int block_size,
                           double noise_floor, Exec exec = Exec::parallel);

// Per-block arithmetic mean; timestamp is the minute boundary of the earliest frame.
MotionFrame aggregate_minute(std::span<const MotionFrame> frames);

// JSON-lines interchange. `band` is appended as "band" when non-empty.
std::string to_jsonl(const MotionFrame& f, std::string_view band = {});
MotionFrame parse_jsonl(std::string_view line, std::string* band = nullptr);

void write_jsonl(std::ostream& os, const MotionFrame& f, std::string_view band = {});
std::vector<MotionFrame> read_jsonl_file(const std::filesystem::path& path);

GrayFrame read_pgm_frame(const std::filesystem::path& path, std::int64_t timestamp_ms);

}  // namespace actv
