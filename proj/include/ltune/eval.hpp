#pragma once

// Statistics and report primitives: ECDFs, mean/median/population-SD
// summaries, per-frequency aggregation, capacitance relative-error
// distributions, |Gamma| landscape grids, and the test-phase exploration
// sweep.

#include <cstdint>
#include <string>
#include <vector>

#include "ltune/dataset.hpp"
#include "ltune/env.hpp"
#include "ltune/nn.hpp"
#include "ltune/tuning_result.hpp"

namespace ltune::eval {

// Right-continuous empirical CDF over the input values.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);

  // Fraction of values <= t.
  double at(double t) const;

  // (value, cumulative fraction) at each distinct sorted value.
  std::vector<std::pair<double, double>> points() const;

  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // population (n divisor)
  std::size_t n = 0;
};
SummaryStats summary_stats(const std::vector<double>& values);

struct FrequencyStats {
  double f = 0.0;
  double mean_gamma = 0.0, sd_gamma = 0.0;
  double mean_steps = 0.0, sd_steps = 0.0;
  std::size_t n = 0;
};
// Groups results by the exact frequency of their pool sample, ascending f.
std::vector<FrequencyStats> per_frequency_stats(
    const std::vector<TuningResult>& results,
    const std::vector<dataset::LoadSample>& pool);

struct CapErrorStats {
  Ecdf cp_errors;  // |final - optimal| / optimal, per capacitor
  Ecdf cs_errors;
};
CapErrorStats cap_error_stats(const std::vector<TuningResult>& results,
                              const std::vector<dataset::LoadSample>& pool);

struct LandscapeGrid {
  std::vector<double> caps;           // lattice values [F], both axes
  std::vector<std::vector<double>> gamma;  // gamma[cp_idx][cs_idx]
  int argmin_cp = 0;
  int argmin_cs = 0;
  double min_gamma = 0.0;

  // Largest |difference| between lattice-adjacent cells.
  double max_adjacent_diff() const;
};
LandscapeGrid landscape_grid(circuit::Complex zl, double f, double cap_min,
                             double cap_max, double cap_step,
                             double rs = 50.0);

struct SweepRow {
  double eps_test = 0.0;
  std::uint64_t seed = 0;
  SummaryStats gamma;
  double success_rate = 0.0;  // fraction with final |Gamma| < 0.01
  double total_time_s = 0.0;  // summed per-sample tuning time
};
// Runs agent::tune over the pool at each exploration rate and seed;
// rows appear in (eps input order) x (seed input order). Per-sample RNG
// streams are derived from (seed, eps index, sample id).
std::vector<SweepRow> exploration_sweep(
    const nn::Weights& weights, const env::EnvConfig& env_cfg,
    const std::vector<dataset::LoadSample>& pool_test,
    const std::vector<double>& eps_list, const std::vector<std::uint64_t>& seeds,
    int max_steps, int jobs = 1);

// Results CSV (shared by the agent and all baselines).
void save_results(const std::vector<TuningResult>& results,
                  const std::string& path, bool append = false);
std::vector<TuningResult> load_results(const std::string& path);

}  // namespace ltune::eval
