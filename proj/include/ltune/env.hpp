#pragma once

// Tuning environment: one episode tunes one load at one frequency, moving
// both capacitors on a fixed lattice until the reflection magnitude drops
// below the termination threshold or the step budget runs out.

#include <array>

#include "ltune/circuit.hpp"
#include "ltune/dataset.hpp"

namespace ltune::env {

struct EnvConfig {
  double cap_min = 0.5e-12;      // [F]
  double cap_max = 21.0e-12;     // [F]
  double delta_c = 0.5e-12;      // lattice step [F]
  double cap_init = 11.0e-12;    // [F]
  double eps_threshold = 0.01;   // success when |Gamma| < this
  int max_steps_train = 1000;
  int max_steps_test = 200;
  double rs = 50.0;              // [ohm]
  double f_min = 1.0e9;          // normalization band [Hz]
  double f_max = 2.0e9;

  void validate() const;  // throws std::invalid_argument
};

// Observation fed to the Q-network.
struct EnvState {
  double gamma_mag = 0.0;  // |Gamma| in [0,1]
  double sin_phi = 0.0;    // sin of the reflection phase
  double cos_phi = 1.0;
  double cp_norm = 0.0;    // min-max normalized capacitances
  double cs_norm = 0.0;
  double f_norm = 0.0;     // min-max normalized frequency

  std::array<double, 6> as_array() const {
    return {gamma_mag, sin_phi, cos_phi, cp_norm, cs_norm, f_norm};
  }
};

// 8 discrete joint moves: lexicographic over (dCp, dCs) in {-1,0,+1}^2
// with (0,0) removed.
struct Action {
  int index = 0;

  static constexpr int kCount = 8;
  static constexpr std::array<std::array<int, 2>, kCount> kDeltas{{
      {{-1, -1}}, {{-1, 0}}, {{-1, +1}}, {{0, -1}},
      {{0, +1}}, {{+1, -1}}, {{+1, 0}}, {{+1, +1}},
  }};

  int dcp() const { return kDeltas[static_cast<std::size_t>(index)][0]; }
  int dcs() const { return kDeltas[static_cast<std::size_t>(index)][1]; }
};

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;
  bool terminal = false;   // success: |Gamma| < eps_threshold
  bool truncated = false;  // step budget exhausted without success
  double gamma_mag = 0.0;  // |Gamma| after the step
};

// Piecewise reward r_base + r_imp + r_fast. Pure function; k_step >= 1 is
// the number of tuning steps taken so far in the episode.
double reward(double gamma_now, double gamma_prev, int k_step);

class Env {
 public:
  explicit Env(const EnvConfig& cfg);

  // Starts an episode on the given sample with the given step budget.
  // Capacitors go to cap_init; the previous-|Gamma| register is primed
  // with the initial |Gamma|.
  EnvState reset(const dataset::LoadSample& sample, int max_steps);

  // Applies the action (each capacitor moves by its delta, then clips to
  // the box), computes the reward on the post-step |Gamma|. Throws
  // std::logic_error when the episode is already over.
  StepOutcome step(Action a);

  EnvState observe() const;

  bool done() const { return terminal_ || truncated_; }
  bool terminal() const { return terminal_; }
  double cp() const { return cp_; }
  double cs() const { return cs_; }
  int steps() const { return steps_; }
  double gamma() const { return gamma_; }
  const EnvConfig& config() const { return cfg_; }

 private:
  EnvState make_state() const;
  double eval_gamma() const;

  EnvConfig cfg_;
  dataset::LoadSample sample_;
  double cp_ = 0.0;
  double cs_ = 0.0;
  double gamma_ = 1.0;
  double gamma_prev_ = 1.0;
  int steps_ = 0;
  int max_steps_ = 0;
  bool terminal_ = false;
  bool truncated_ = false;
  bool active_ = false;
};

}  // namespace ltune::env
