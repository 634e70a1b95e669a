#pragma once

// Load-frequency sample pool: every grid tuple (cp*, cs*, f) is inverted
// into the unique load impedance that those capacitances match perfectly,
// then the pool is split 60/40 within each frequency group.

#include <cstdint>
#include <string>
#include <vector>

#include "ltune/circuit.hpp"

namespace ltune::dataset {

enum class Split { train, test };

struct LoadSample {
  double f = 0.0;                  // [Hz]
  circuit::Complex zl;             // [ohm]
  double cp_opt = 0.0;             // generating shunt capacitance [F]
  double cs_opt = 0.0;             // generating series capacitance [F]
  Split split = Split::train;
};

struct GridSpec {
  double cap_min = 1.0e-12;        // [F]
  double cap_max = 20.5e-12;       // [F]
  double cap_step = 0.5e-12;       // [F]
  double f_min = 1.0e9;            // [Hz]
  double f_max = 2.0e9;            // [Hz]
  double f_step = 0.02e9;          // [Hz]
  double train_fraction = 0.6;
  std::uint64_t seed = 1;

  int cap_count() const;
  int f_count() const;
  void validate() const;  // throws std::invalid_argument
};

// The reduced grid used for CI and quick experiments: optima well inside
// the tuning range, frequencies spanning the whole band.
GridSpec toy_grid(std::uint64_t seed = 1);

// One sample per (f, cp*, cs*) tuple, f-major then cp then cs. All samples
// are tagged train until stratified_split runs.
std::vector<LoadSample> generate_pool(const GridSpec& grid, double rs = 50.0);

// Tags round(train_fraction * group) samples per frequency group as train
// (round half up), the rest as test, via a seeded per-group shuffle.
void stratified_split(std::vector<LoadSample>& pool, const GridSpec& grid);

// CSV round trip; see save format in the README. load_pool re-validates the
// closed-form containment invariant for every row and throws
// std::runtime_error naming the first offending row.
void save_pool(const std::vector<LoadSample>& pool, const std::string& path);
std::vector<LoadSample> load_pool(const std::string& path);

std::vector<LoadSample> filter_split(const std::vector<LoadSample>& pool,
                                     Split which);

// Indices into `pool` of the samples carrying the given tag.
std::vector<std::size_t> split_indices(const std::vector<LoadSample>& pool,
                                       Split which);

}  // namespace ltune::dataset
