#pragma once

#include <charconv>
#include <string>

namespace actv::detail {

// Shortest text that reads back to the same double.
inline void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

}  // namespace actv::detail
