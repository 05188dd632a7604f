#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "eqr/error.hpp"

namespace eqr::csv {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t c = line.find(',', pos);
    if (c == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, c - pos));
    pos = c + 1;
  }
}

inline double parse_real(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kFormat, "bad number '" + tmp + "'");
  }
  return v;
}

// Non-negative integer cell.
inline std::size_t parse_count(std::string_view s) {
  std::string tmp(s);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tmp.c_str(), &end, 10);
  if (tmp.empty() || tmp[0] == '-' || end != tmp.c_str() + tmp.size()) {
    throw Error(ErrorCode::kFormat, "bad count '" + tmp + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace eqr::csv
