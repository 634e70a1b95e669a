#include "ltune/agent.hpp"

#include <chrono>
#include <stdexcept>
#include <unordered_set>

namespace ltune::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay: zero capacity");
  store_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
  if (size_ < capacity_) {
    store_.push_back(t);
    ++size_;
  } else {
    store_[head_] = t;
  }
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("replay: index out of range");
  if (size_ < capacity_) return store_[i];
  return store_[(head_ + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count,
                                                      rng::Stream& rng) const {
  if (count > size_) {
    throw std::invalid_argument("replay: batch larger than buffer");
  }
  std::vector<std::size_t> out;
  out.reserve(count);
  std::unordered_set<std::size_t> seen;
  while (out.size() < count) {
    const std::size_t i = rng.next_below(size_);
    if (seen.insert(i).second) out.push_back(i);
  }
  return out;
}

void TrainConfig::validate() const {
  if (episodes <= 0 || batch_size <= 0 || target_sync <= 0 ||
      replay_capacity <= 0) {
    throw std::invalid_argument("train: counts must be positive");
  }
  if (!(discount > 0.0 && discount < 1.0)) {
    throw std::invalid_argument("train: discount must be in (0,1)");
  }
  if (!(lr > 0.0)) throw std::invalid_argument("train: lr must be positive");
}

int select_action(const Eigen::VectorXd& q_values, double eps,
                  rng::Stream& rng) {
  if (eps < 0.0 || eps > 1.0) {
    throw std::invalid_argument("agent: eps must be in [0,1]");
  }
  if (rng.next_double() < eps) {
    return static_cast<int>(
        rng.next_below(static_cast<std::uint64_t>(q_values.size())));
  }
  int best = 0;
  for (int i = 1; i < q_values.size(); ++i) {
    if (q_values(i) > q_values(best)) best = i;
  }
  return best;
}

double ddqn_target(double r, const env::EnvState& s_next, bool terminal,
                   const nn::Weights& online, const nn::Weights& target,
                   double discount) {
  if (terminal) return r;
  const auto arr = s_next.as_array();
  const Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(arr.data(), arr.size());
  const Eigen::VectorXd q_online = nn::forward_eval(online, x);
  int best = 0;
  for (int i = 1; i < q_online.size(); ++i) {
    if (q_online(i) > q_online(best)) best = i;
  }
  const Eigen::VectorXd q_target = nn::forward_eval(target, x);
  return r + discount * q_target(best);
}

namespace {

Eigen::VectorXd state_vector(const env::EnvState& s) {
  const auto arr = s.as_array();
  return Eigen::Map<const Eigen::VectorXd>(arr.data(), arr.size());
}

}  // namespace

TrainResult train(const std::vector<dataset::LoadSample>& pool_train,
                  const env::EnvConfig& env_cfg, const TrainConfig& cfg,
                  const nn::MlpSpec& spec, const StepObserver& observer) {
  cfg.validate();
  spec.validate();
  if (pool_train.empty()) {
    throw std::invalid_argument("train: empty training pool");
  }
  if (spec.inputs() != 6 || spec.outputs() != env::Action::kCount) {
    throw std::invalid_argument("train: Q-network must be 6 -> 8");
  }

  auto episode_rng = rng::derive(cfg.seed, rng::kEpisodeSample);
  auto eps_rng = rng::derive(cfg.seed, rng::kEpsGreedy);
  auto replay_rng = rng::derive(cfg.seed, rng::kReplaySample);
  auto dropout_rng = rng::derive(cfg.seed, rng::kDropout);

  TrainResult out;
  out.weights = nn::init_weights(spec, cfg.seed);
  nn::Weights target = out.weights;
  nn::AdamState adam = nn::make_adam(out.weights, cfg.lr);
  ReplayBuffer replay(static_cast<std::size_t>(cfg.replay_capacity));
  env::Env sim(env_cfg);

  const int batch = cfg.batch_size;
  Eigen::MatrixXd batch_s(batch, 6);
  Eigen::MatrixXd batch_s_next(batch, 6);
  std::vector<int> batch_a(static_cast<std::size_t>(batch));
  Eigen::VectorXd batch_r(batch);
  std::vector<bool> batch_terminal(static_cast<std::size_t>(batch));
  Eigen::VectorXd targets(batch);

  long global_step = 0;
  for (int episode = 1; episode <= cfg.episodes; ++episode) {
    const std::size_t pick = episode_rng.next_below(pool_train.size());
    env::EnvState state = sim.reset(pool_train[pick], env_cfg.max_steps_train);
    double cum_reward = 0.0;

    while (!sim.done()) {
      const double eps = cfg.eps.at(global_step);
      const Eigen::VectorXd q =
          nn::forward_eval(out.weights, state_vector(state));
      const env::Action action{select_action(q, eps, eps_rng)};
      const env::StepOutcome step = sim.step(action);
      ++global_step;
      cum_reward += step.reward;

      Transition t;
      t.s = state.as_array();
      t.a = action.index;
      t.r = step.reward;
      t.s_next = step.next_state.as_array();
      t.terminal = step.terminal;  // truncation still bootstraps
      replay.push(t);
      state = step.next_state;

      if (replay.size() >= static_cast<std::size_t>(batch)) {
        const auto idx = replay.sample_indices(
            static_cast<std::size_t>(batch), replay_rng);
        for (int i = 0; i < batch; ++i) {
          const Transition& tr = replay.at(idx[static_cast<std::size_t>(i)]);
          for (int k = 0; k < 6; ++k) {
            batch_s(i, k) = tr.s[static_cast<std::size_t>(k)];
            batch_s_next(i, k) = tr.s_next[static_cast<std::size_t>(k)];
          }
          batch_a[static_cast<std::size_t>(i)] = tr.a;
          batch_r(i) = tr.r;
          batch_terminal[static_cast<std::size_t>(i)] = tr.terminal;
        }
        // double-DQN targets: argmax on the online net, value from the
        // target net, no bootstrap through terminal transitions
        const Eigen::MatrixXd q_next_online =
            nn::forward_eval_batch(out.weights, batch_s_next);
        const Eigen::MatrixXd q_next_target =
            nn::forward_eval_batch(target, batch_s_next);
        for (int i = 0; i < batch; ++i) {
          if (batch_terminal[static_cast<std::size_t>(i)]) {
            targets(i) = batch_r(i);
            continue;
          }
          int best = 0;
          for (int a = 1; a < q_next_online.cols(); ++a) {
            if (q_next_online(i, a) > q_next_online(i, best)) best = a;
          }
          targets(i) = batch_r(i) + cfg.discount * q_next_target(i, best);
        }

        const nn::ForwardCache cache =
            nn::forward_train(out.weights, batch_s, dropout_rng);
        const nn::Gradients grads =
            nn::backward(out.weights, cache, batch_a, targets);
        try {
          nn::adam_step(out.weights, grads, adam);
        } catch (const std::runtime_error& e) {
          throw std::runtime_error(std::string(e.what()) + " (episode " +
                                   std::to_string(episode) + ", step " +
                                   std::to_string(sim.steps()) + ")");
        }

        if (global_step % cfg.target_sync == 0) target = out.weights;
      }

      if (observer) observer(global_step, out.weights, target);
    }

    EpisodeLog row;
    row.episode = episode;
    row.cum_reward = cum_reward;
    row.final_gamma = sim.gamma();
    row.steps = sim.steps();
    row.eps = cfg.eps.at(global_step);
    out.log.push_back(row);
  }
  out.total_env_steps = global_step;
  return out;
}

TuneOutcome tune(const dataset::LoadSample& sample, const nn::Weights& weights,
                 const env::EnvConfig& env_cfg, double eps_test, int max_steps,
                 rng::Stream& rng, bool keep_trajectory) {
  const auto start = std::chrono::steady_clock::now();
  env::Env sim(env_cfg);
  env::EnvState state = sim.reset(sample, max_steps);
  TuneOutcome out;
  if (keep_trajectory) out.trajectory.push_back({sim.cp(), sim.cs()});

  while (!sim.done()) {
    const Eigen::VectorXd q = nn::forward_eval(weights, state_vector(state));
    const env::Action action{select_action(q, eps_test, rng)};
    const env::StepOutcome step = sim.step(action);
    state = step.next_state;
    if (keep_trajectory) out.trajectory.push_back({sim.cp(), sim.cs()});
  }

  const auto stop = std::chrono::steady_clock::now();
  out.result.method = "agent";
  out.result.eps_test = eps_test;
  out.result.final_gamma = sim.gamma();
  out.result.steps = sim.steps();
  out.result.success = sim.terminal();
  out.result.wall_time_s =
      std::chrono::duration<double>(stop - start).count();
  out.result.final_cp = sim.cp();
  out.result.final_cs = sim.cs();
  return out;
}

}  // namespace ltune::agent
