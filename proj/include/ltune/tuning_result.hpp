#pragma once

#include <cstddef>
#include <string>

namespace ltune {

// One evaluated tuning attempt; rows of the shared results CSV.
struct TuningResult {
  std::size_t sample_id = 0;   // index into the pool file
  std::string method;          // agent | ga | sapso | adam | none
  double eps_test = 0.0;
  double final_gamma = 1.0;
  int steps = 0;
  bool success = false;        // final_gamma < 0.01
  double wall_time_s = 0.0;
  double final_cp = 0.0;       // [F]; 0 for method "none"
  double final_cs = 0.0;       // [F]
};

}  // namespace ltune
