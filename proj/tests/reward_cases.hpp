#pragma once

// Committed reward cases shared by the env unit suite and the acceptance
// suite. reference_reward() is an independent straight-line evaluation of
// the three printed piecewise formulas; the rows span every branch and
// boundary (0.01 / 0.02 / 0.06 for the base term, -0.02 / 0 for the
// improvement term, the 200-step cutoff for the fast term). The doc field
// records the hand-computed value where the arithmetic is exact.

#include <algorithm>
#include <cmath>
#include <vector>

namespace ltune_test {

inline double reference_reward(double g, double p, int k) {
  double base;
  if (g < 0.01) {
    base = 100.0;
  } else if (g >= 0.01 && g < 0.02) {
    base = 80.0 + 800.0 * (0.02 - g);
  } else if (g >= 0.02 && g < 0.06) {
    base = 40.0 + 600.0 * (0.06 - g);
  } else {
    base = -10.0 - 5.0 * std::log10(g);
  }

  const double delta = p - g;
  double imp;
  if (delta > 0.0) {
    imp = std::min(30.0, 300.0 * delta);
  } else if (delta < -0.02) {
    imp = 200.0 * delta;
  } else {
    imp = -0.5;
  }

  const double fast = (g < 0.01 && k < 200) ? 0.1 * (200.0 - k) : 0.0;
  return base + imp + fast;
}

struct RewardCase {
  double gamma_now;
  double gamma_prev;
  int k_step;
  const char* doc;
};

inline const std::vector<RewardCase>& reward_cases() {
  static const std::vector<RewardCase> cases = {
      // top base branch, no-change improvement, fast term expired
      {0.005, 0.005, 250, "100 - 0.5 + 0 = 99.5"},
      // second base branch with a big improvement, capped at 30
      {0.015, 0.5, 10, "84 + 30 + 0 = 114"},
      // log branch, no change
      {0.1, 0.1, 50, "-5 - 0.5 + 0 = -5.5"},
      // success with improvement and fast bonus
      {0.008, 0.058, 150, "100 + 15 + 5 = 120"},
      // perfect match reached on the very first step
      {0.0, 0.01, 1, "100 + 3 + 19.9 = 122.9"},
      // base boundary g = 0.01 falls in the second branch
      {0.01, 0.01, 5, "88 - 0.5 + 0 = 87.5"},
      // base boundary g = 0.02 falls in the third branch
      {0.02, 0.02, 5, "64 - 0.5 + 0 = 63.5"},
      // base boundary g = 0.06 falls in the log branch
      {0.06, 0.06, 5, "-10 - 5*log10(0.06) - 0.5"},
      // just below the 0.06 boundary
      {0.0599, 0.0599, 3, "40.06 - 0.5 + 0 = 39.56"},
      // improvement boundary delta = -0.02 exactly takes the -0.5 branch
      {0.02, 0.0, 7, "64 - 0.5 + 0 = 63.5"},
      // worsening beyond the boundary
      {0.1, 0.05, 7, "-5 - 10 + 0 = -15"},
      // large improvement hits the 30 cap exactly at delta = 0.1
      {0.3, 0.4, 2, "-10-5*log10(0.3) + 30"},
      // small improvement below the cap
      {0.0995, 0.1, 5, "base(0.0995) + 0.15 + 0"},
      // fast bonus one step before the cutoff
      {0.005, 0.007, 199, "100 + 0.6 + 0.1 = 100.7"},
      // fast bonus exactly at the cutoff is zero
      {0.005, 0.005, 200, "100 - 0.5 + 0 = 99.5"},
      // tiny positive improvement
      {0.5, 0.5001, 3, "base(0.5) + 0.03"},
      // severe regression in the log branch
      {1.0, 0.2, 4, "-10 - 160 + 0 = -170"},
      // deep match with a huge improvement and mid-episode fast bonus
      {0.0001, 0.9, 100, "100 + 30 + 10 = 140"},
      // success just below threshold with fast bonus
      {0.0099, 0.5, 150, "100 + 30 + 5 = 135"},
      // just above the success threshold
      {0.010000000000000002, 0.011, 9, "second branch + small improvement"},
      // third branch interior point
      {0.021, 0.021, 12, "63.4 - 0.5 + 0 = 62.9"},
      // log branch interior with mild improvement
      {0.5, 0.52, 33, "base(0.5) + 6"},
      // regression from success region back out
      {0.05, 0.005, 20, "46 - 9 + 0 = 37"},
      // long-run no-change penalty only
      {0.2, 0.2, 999, "base(0.2) - 0.5"},
  };
  return cases;
}

}  // namespace ltune_test
