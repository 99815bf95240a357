#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace actv {

// 8-bit single channel raster, row-major, row 0 at the top.
struct Image8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Image8&) const = default;
};

// Binary PGM (P5, maxval 255). Comments in the header are skipped on read.
std::string encode_pgm(const Image8& img);
Image8 decode_pgm(const std::string& bytes);

void write_pgm(const std::filesystem::path& path, const Image8& img);
Image8 read_pgm(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace actv
