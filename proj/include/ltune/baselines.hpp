#pragma once

// Comparison optimizers, all minimizing |Gamma(Cp, Cs)| for one load
// sample inside the capacitance box: a lattice-coded genetic algorithm,
// simulated-annealing PSO, Adam on the analytic gradient, and the
// no-tuner reference.

#include <cstdint>
#include <optional>
#include <vector>

#include "ltune/dataset.hpp"
#include "ltune/rng.hpp"
#include "ltune/tuning_result.hpp"

namespace ltune::baselines {

struct GaParams {
  int population = 20;
  double crossover = 0.8;  // per-pair uniform crossover probability
  double mutation = 0.1;   // per-gene one-lattice-step probability
};

struct SapsoParams {
  int particles = 20;
  double c1 = 1.5;
  double c2 = 1.5;
  double cooling = 0.99;
  double inertia_start = 0.9;
  double inertia_end = 0.4;
};

struct AdamParams {
  double init = 11.0e-12;  // [F]
  double lr = 0.1;         // picofarad units
  double beta1 = 0.9;
  double beta2 = 0.999;
  double stability = 1e-8;
};

struct BaselineConfig {
  int max_iters = 200;
  double threshold = 0.01;
  double cap_min = 0.5e-12;   // [F]
  double cap_max = 21.0e-12;  // [F]
  double lattice_step = 0.5e-12;
  double rs = 50.0;
  GaParams ga;
  SapsoParams sapso;
  AdamParams adam;
  std::uint64_t seed = 1;
};

struct BaselineOutcome {
  TuningResult result;
  long evaluations = 0;          // objective evaluations performed
  std::vector<double> best_trace;  // best-so-far |Gamma| after each iteration
};

// Optional deterministic starting points, used by tests. GA expects lattice
// points; SAPSO arbitrary in-box positions (velocities start at zero).
using StartPoints = std::optional<std::vector<std::pair<double, double>>>;

BaselineOutcome ga_tune(const dataset::LoadSample& sample,
                        const BaselineConfig& cfg,
                        const StartPoints& initial = std::nullopt);

BaselineOutcome sapso_tune(const dataset::LoadSample& sample,
                           const BaselineConfig& cfg,
                           const StartPoints& initial = std::nullopt);

BaselineOutcome adam_tune(const dataset::LoadSample& sample,
                          const BaselineConfig& cfg);

// Reflection magnitude of the bare load against rs, no matching network.
TuningResult none_tune(const dataset::LoadSample& sample, double rs = 50.0);

}  // namespace ltune::baselines
