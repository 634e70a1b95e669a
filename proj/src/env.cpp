#include "ltune/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ltune::env {

void EnvConfig::validate() const {
  if (!(cap_min > 0.0) || !(cap_max > cap_min)) {
    throw std::invalid_argument("env: bad capacitance range");
  }
  if (!(cap_init >= cap_min && cap_init <= cap_max)) {
    throw std::invalid_argument("env: cap_init outside range");
  }
  if (!(delta_c > 0.0)) throw std::invalid_argument("env: delta_c must be > 0");
  if (!(eps_threshold > 0.0)) {
    throw std::invalid_argument("env: eps_threshold must be > 0");
  }
  if (max_steps_train <= 0 || max_steps_test <= 0) {
    throw std::invalid_argument("env: step budgets must be positive");
  }
  if (!(rs > 0.0)) throw std::invalid_argument("env: rs must be > 0");
  if (!(f_max > f_min)) throw std::invalid_argument("env: bad frequency band");
}

namespace {

double r_base(double g) {
  if (g < 0.01) return 100.0;
  if (g < 0.02) return 80.0 + 800.0 * (0.02 - g);
  if (g < 0.06) return 40.0 + 600.0 * (0.06 - g);
  return -10.0 - 5.0 * std::log10(g);
}

double r_imp(double delta) {
  if (delta > 0.0) return std::min(30.0, 300.0 * delta);
  if (delta < -0.02) return 200.0 * delta;
  return -0.5;
}

double r_fast(double g, int k_step) {
  if (g < 0.01 && k_step < 200) return 0.1 * (200.0 - k_step);
  return 0.0;
}

}  // namespace

double reward(double gamma_now, double gamma_prev, int k_step) {
  return r_base(gamma_now) + r_imp(gamma_prev - gamma_now) +
         r_fast(gamma_now, k_step);
}

Env::Env(const EnvConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

double Env::eval_gamma() const {
  const circuit::CircuitParams p{cp_, cs_, sample_.f, cfg_.rs};
  return std::abs(circuit::reflection_coefficient(
      circuit::input_impedance(p, sample_.zl), cfg_.rs));
}

EnvState Env::make_state() const {
  const circuit::CircuitParams p{cp_, cs_, sample_.f, cfg_.rs};
  const circuit::Complex g = circuit::reflection_coefficient(
      circuit::input_impedance(p, sample_.zl), cfg_.rs);
  EnvState s;
  s.gamma_mag = std::abs(g);
  if (s.gamma_mag > 1e-300) {
    s.sin_phi = g.imag() / s.gamma_mag;
    s.cos_phi = g.real() / s.gamma_mag;
  } else {
    s.sin_phi = 0.0;
    s.cos_phi = 1.0;
  }
  s.cp_norm = (cp_ - cfg_.cap_min) / (cfg_.cap_max - cfg_.cap_min);
  s.cs_norm = (cs_ - cfg_.cap_min) / (cfg_.cap_max - cfg_.cap_min);
  s.f_norm = (sample_.f - cfg_.f_min) / (cfg_.f_max - cfg_.f_min);
  return s;
}

EnvState Env::reset(const dataset::LoadSample& sample, int max_steps) {
  if (max_steps <= 0) throw std::invalid_argument("env: max_steps must be > 0");
  if (sample.f < cfg_.f_min || sample.f > cfg_.f_max) {
    throw std::invalid_argument("env: sample frequency outside the band");
  }
  sample_ = sample;
  cp_ = cfg_.cap_init;
  cs_ = cfg_.cap_init;
  steps_ = 0;
  max_steps_ = max_steps;
  gamma_ = eval_gamma();
  gamma_prev_ = gamma_;
  terminal_ = gamma_ < cfg_.eps_threshold;
  truncated_ = false;
  active_ = true;
  return make_state();
}

StepOutcome Env::step(Action a) {
  if (!active_) throw std::logic_error("env: step before reset");
  if (done()) throw std::logic_error("env: step on a finished episode");
  if (a.index < 0 || a.index >= Action::kCount) {
    throw std::invalid_argument("env: bad action index");
  }

  cp_ = std::clamp(cp_ + a.dcp() * cfg_.delta_c, cfg_.cap_min, cfg_.cap_max);
  cs_ = std::clamp(cs_ + a.dcs() * cfg_.delta_c, cfg_.cap_min, cfg_.cap_max);
  ++steps_;

  gamma_ = eval_gamma();
  StepOutcome out;
  out.reward = reward(gamma_, gamma_prev_, steps_);
  gamma_prev_ = gamma_;

  terminal_ = gamma_ < cfg_.eps_threshold;
  truncated_ = !terminal_ && steps_ >= max_steps_;
  out.next_state = make_state();
  out.terminal = terminal_;
  out.truncated = truncated_;
  out.gamma_mag = gamma_;
  return out;
}

EnvState Env::observe() const {
  if (!active_) throw std::logic_error("env: observe before reset");
  return make_state();
}

}  // namespace ltune::env
