#include "actv/pgm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "actv/error.hpp"

namespace actv {

std::string encode_pgm(const Image8& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.data.size() != static_cast<std::size_t>(img.width) * img.height) {
    throw InvalidParameter("pgm: image dimensions do not match pixel count");
  }
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  return out;
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& s, std::size_t& pos) {
  for (;;) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '#') {
      while (pos < s.size() && s[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::size_t start = pos;
  while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  return s.substr(start, pos - start);
}

int parse_positive(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw LoadError(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

Image8 decode_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P5") throw LoadError("pgm: missing P5 magic");
  Image8 img;
  img.width = parse_positive(next_token(bytes, pos), "width");
  img.height = parse_positive(next_token(bytes, pos), "height");
  if (parse_positive(next_token(bytes, pos), "maxval") != 255) {
    throw LoadError("pgm: only maxval 255 is supported");
  }
  ++pos;  // single whitespace byte before the raster
  std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() < pos + n) throw LoadError("pgm: truncated raster");
  img.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_pgm(const std::filesystem::path& path, const Image8& img) {
  write_file_atomic(path, encode_pgm(img));
}

Image8 read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

}  // namespace actv
