#pragma once

// Canonical number formatting for all CSV/report output: 12 significant
// digits, %g style. Round-trips through parsing losslessly at this width,
// which keeps save/load byte-exact.

#include <cstdio>
#include <string>

namespace ltune::fmt {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace ltune::fmt
