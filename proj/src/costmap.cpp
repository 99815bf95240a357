#include "actv/costmap.hpp"

#include <algorithm>
#include <cmath>

#include <yaml-cpp/yaml.h>

#include "actv/error.hpp"
#include "text.hpp"

namespace actv {

CostMap CostMap::blank(int width, int height, double resolution, double origin_x, double origin_y) {
  CostMap m;
  m.width = width;
  m.height = height;
  m.resolution = resolution;
  m.origin_x = origin_x;
  m.origin_y = origin_y;
  m.validate_dims();
  m.static_layer.assign(static_cast<std::size_t>(width) * height, kCostFree);
  m.activity_layer.assign(m.static_layer.size(), kCostFree);
  return m;
}

void CostMap::validate_dims() const {
  if (width <= 0 || height <= 0) throw InvalidParameter("cost map: dimensions must be positive");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) throw InvalidParameter("cost map: resolution must be > 0");
}

void CostMap::validate() const {
  validate_dims();
  const auto n = static_cast<std::size_t>(width) * height;
  if (static_layer.size() != n || activity_layer.size() != n) throw InvalidParameter("cost map: layer shapes differ");
}

std::vector<std::uint8_t> CostMap::combined() const {
  validate();
  std::vector<std::uint8_t> out(static_layer.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(static_layer[i], activity_layer[i]);
  return out;
}

bool CostMap::world_to_cell(double x, double y, int& cx, int& cy) const {
  const double fx = std::floor((x - origin_x) / resolution);
  const double fy = std::floor((y - origin_y) / resolution);
  if (!(fx >= 0 && fx < width && fy >= 0 && fy < height)) return false;
  cx = static_cast<int>(fx);
  cy = static_cast<int>(fy);
  return true;
}

bool Homography::apply(double u, double v, double& x, double& y) const {
  const double w = h[6] * u + h[7] * v + h[8];
  if (w == 0.0 || !std::isfinite(w)) return false;
  x = (h[0] * u + h[1] * v + h[2]) / w;
  y = (h[3] * u + h[4] * v + h[5]) / w;
  return std::isfinite(x) && std::isfinite(y);
}

ExportStats rasterize_activity(CostMap& map, const std::vector<CameraActivity>& cams, double full_scale) {
  map.validate();
  if (!(full_scale > 0.0)) throw InvalidParameter("rasterize: full_scale must be > 0");
  std::fill(map.activity_layer.begin(), map.activity_layer.end(), kCostFree);
  ExportStats st;
  for (const auto& cam : cams) {
    const MotionFrame& f = cam.density;
    for (int by = 0; by < f.grid_h; ++by) {
      for (int bx = 0; bx < f.grid_w; ++bx) {
        const double d = f.at(bx, by).density;
        if (!(d > 0.0)) continue;
        double x = 0.0, y = 0.0;
        int cx = 0, cy = 0;
        if (!cam.to_world.apply(bx + 0.5, by + 0.5, x, y) || !map.world_to_cell(x, y, cx, cy)) {
          ++st.out_of_bounds;
          continue;
        }
        const auto cost = static_cast<std::uint8_t>(std::lround(kCostLethal * std::min(1.0, d / full_scale)));
        auto& cell = map.activity_layer[static_cast<std::size_t>(cy) * map.width + cx];
        cell = std::max(cell, cost);
        ++st.splatted;
      }
    }
  }
  return st;
}

Image8 costmap_image(const CostMap& map) {
  const auto grid = map.combined();
  Image8 img{map.width, map.height, std::vector<std::uint8_t>(grid.size())};
  for (int cy = 0; cy < map.height; ++cy) {
    for (int cx = 0; cx < map.width; ++cx) {
      img.at(cx, map.height - 1 - cy) = static_cast<std::uint8_t>(255 - grid[static_cast<std::size_t>(cy) * map.width + cx]);
    }
  }
  return img;
}

std::string costmap_yaml(const CostMap& map, const std::string& image_name) {
  using detail::format_double;
  std::string y;
  y += "image: " + image_name + "\n";
  y += "mode: scale\n";
  y += "resolution: " + format_double(map.resolution) + "\n";
  y += "origin: [" + format_double(map.origin_x) + ", " + format_double(map.origin_y) + ", " +
       format_double(map.origin_yaw) + "]\n";
  y += "negate: 0\n";
  y += "occupied_thresh: 0.65\n";
  y += "free_thresh: 0.196\n";
  return y;
}

void write_costmap(const std::filesystem::path& yaml_path, const CostMap& map) {
  auto pgm_path = yaml_path;
  pgm_path.replace_extension(".pgm");
  write_pgm(pgm_path, costmap_image(map));
  write_file_atomic(yaml_path, costmap_yaml(map, pgm_path.filename().string()));
}

CostMap read_costmap(const std::filesystem::path& yaml_path) {
  YAML::Node y;
  try {
    y = YAML::Load(read_file(yaml_path));
  } catch (const YAML::Exception& e) {
    throw LoadError("cost map yaml " + yaml_path.string() + ": " + e.what());
  }
  CostMap m;
  std::filesystem::path image;
  try {
    if (y["negate"] && y["negate"].as<int>() != 0) throw LoadError("cost map yaml: negate != 0 is not supported");
    image = y["image"].as<std::string>();
    m.resolution = y["resolution"].as<double>();
    const auto origin = y["origin"].as<std::vector<double>>();
    if (origin.size() != 3) throw LoadError("cost map yaml: origin must have 3 entries");
    m.origin_x = origin[0];
    m.origin_y = origin[1];
    m.origin_yaw = origin[2];
  } catch (const YAML::Exception& e) {
    throw LoadError("cost map yaml " + yaml_path.string() + ": " + e.what());
  }
  if (image.is_relative()) image = yaml_path.parent_path() / image;
  const Image8 img = read_pgm(image);
  m.width = img.width;
  m.height = img.height;
  m.validate_dims();
  m.static_layer.resize(static_cast<std::size_t>(m.width) * m.height);
  m.activity_layer.assign(m.static_layer.size(), kCostFree);
  for (int cy = 0; cy < m.height; ++cy) {
    for (int cx = 0; cx < m.width; ++cx) m.static_at(cx, cy) = static_cast<std::uint8_t>(255 - img.at(cx, m.height - 1 - cy));
  }
  return m;
}

}  // namespace actv
