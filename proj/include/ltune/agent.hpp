#pragma once

// Double-DQN agent: FIFO replay, linear epsilon decay, periodic target
// sync, one Adam update per environment step. Training is single-threaded
// and bit-reproducible for a fixed seed; inference can fan out across
// samples with per-sample streams.

#include <cstdint>
#include <functional>
#include <vector>

#include "ltune/dataset.hpp"
#include "ltune/env.hpp"
#include "ltune/nn.hpp"
#include "ltune/rng.hpp"
#include "ltune/tuning_result.hpp"

namespace ltune::agent {

struct Transition {
  std::array<double, 6> s{};
  int a = 0;
  double r = 0.0;
  std::array<double, 6> s_next{};
  bool terminal = false;
};

// Fixed-capacity FIFO store; insertion beyond capacity evicts the oldest.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const;  // 0 = oldest

  // Uniform sample of `count` distinct indices (insertion-order positions).
  std::vector<std::size_t> sample_indices(std::size_t count,
                                          rng::Stream& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write position
  std::size_t size_ = 0;
  std::vector<Transition> store_;
};

struct EpsSchedule {
  double eps0 = 1.0;
  double eps_min = 0.05;
  double decay = 1e-5;  // per environment step, linear

  double at(long env_step) const {
    const double e = eps0 - decay * static_cast<double>(env_step);
    return e > eps_min ? e : eps_min;
  }
};

struct TrainConfig {
  int episodes = 300;
  double discount = 0.95;
  int batch_size = 128;
  long target_sync = 5000;      // environment steps between target refreshes
  int replay_capacity = 50000;
  double lr = 5e-4;
  EpsSchedule eps;
  std::uint64_t seed = 1;

  void validate() const;
};

// Epsilon-greedy pick: uniform over all actions with probability eps,
// otherwise argmax with ties broken toward the lowest index.
int select_action(const Eigen::VectorXd& q_values, double eps,
                  rng::Stream& rng);

// Eq.-style double-DQN target: r for terminal transitions, otherwise
// r + discount * Q_target(s', argmax_a Q_online(s', a)).
double ddqn_target(double r, const env::EnvState& s_next, bool terminal,
                   const nn::Weights& online, const nn::Weights& target,
                   double discount);

struct EpisodeLog {
  int episode = 0;       // 1-based
  double cum_reward = 0.0;
  double final_gamma = 1.0;
  int steps = 0;
  double eps = 1.0;      // schedule value after the episode
};

struct TrainResult {
  nn::Weights weights;
  std::vector<EpisodeLog> log;
  long total_env_steps = 0;
};

// Called after every environment step; lets tests watch the sync schedule.
using StepObserver = std::function<void(
    long global_step, const nn::Weights& online, const nn::Weights& target)>;

// Runs the full training loop over the given training samples. RNG streams
// (all derived from cfg.seed): weight init, episode sampling, epsilon
// draws, replay sampling, dropout masks.
TrainResult train(const std::vector<dataset::LoadSample>& pool_train,
                  const env::EnvConfig& env_cfg, const TrainConfig& cfg,
                  const nn::MlpSpec& spec,
                  const StepObserver& observer = nullptr);

struct TuneOutcome {
  TuningResult result;
  std::vector<std::pair<double, double>> trajectory;  // (cp, cs) after steps
};

// Greedy rollout with test-phase exploration rate eps_test. A sample that
// is already matched at the initial capacitances reports success with
// zero steps.
TuneOutcome tune(const dataset::LoadSample& sample, const nn::Weights& weights,
                 const env::EnvConfig& env_cfg, double eps_test, int max_steps,
                 rng::Stream& rng, bool keep_trajectory = false);

}  // namespace ltune::agent
