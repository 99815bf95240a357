#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "actv/motion.hpp"
#include "actv/pgm.hpp"

namespace actv {

inline constexpr std::uint8_t kCostFree = 0;
inline constexpr std::uint8_t kCostLethal = 254;
inline constexpr std::uint8_t kCostUnknown = 255;

// Occupancy grid, row 0 at the bottom (world y grows with the row index).
struct CostMap {
  int width = 0;
  int height = 0;
  double resolution = 0.05;  // meters per cell
  double origin_x = 0.0;     // world position of the lower-left corner
  double origin_y = 0.0;
  double origin_yaw = 0.0;
  std::vector<std::uint8_t> static_layer;
  std::vector<std::uint8_t> activity_layer;

  static CostMap blank(int width, int height, double resolution, double origin_x = 0.0, double origin_y = 0.0);
  void validate() const;
  void validate_dims() const;
  std::uint8_t& static_at(int cx, int cy) { return static_layer[static_cast<std::size_t>(cy) * width + cx]; }
  std::uint8_t activity_at(int cx, int cy) const { return activity_layer[static_cast<std::size_t>(cy) * width + cx]; }
  // Element-wise max of the layers.
  std::vector<std::uint8_t> combined() const;
  // Cell containing world point (x, y); false when outside the map.
  bool world_to_cell(double x, double y, int& cx, int& cy) const;
};

// Row-major 3x3 homography from block-grid coordinates to world meters.
struct Homography {
  std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};
  // false when the point maps to infinity.
  bool apply(double u, double v, double& x, double& y) const;
};

struct CameraActivity {
  std::string camera_id;
  Homography to_world;
  MotionFrame density;
};

struct ExportStats {
  int splatted = 0;
  int out_of_bounds = 0;  // blocks skipped because their center left the map
};

// Splats each block center (bx + 0.5, by + 0.5) through its camera's
// homography into the nearest cell with cost round(254 min(1, d / full_scale));
// cells hit several times keep the maximum. Replaces the activity layer.
ExportStats rasterize_activity(CostMap& map, const std::vector<CameraActivity>& cams, double full_scale = 1.0);

// PGM pixel = 255 - cost, top row first; YAML next to it names the image.
void write_costmap(const std::filesystem::path& yaml_path, const CostMap& map);
std::string costmap_yaml(const CostMap& map, const std::string& image_name);
Image8 costmap_image(const CostMap& map);
// Reads a pair written by write_costmap; the combined grid becomes the static
// layer and the activity layer is zero.
CostMap read_costmap(const std::filesystem::path& yaml_path);

}  // namespace actv
