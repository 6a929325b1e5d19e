#pragma once

#include <charconv>
#include <string>

namespace edl {

// Shortest round-trip decimal form.
inline std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace edl
