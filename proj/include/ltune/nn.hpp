#pragma once

// Small dense-network engine: enough for the Q-network (dense layers,
// ReLU hiddens, linear output, inverted dropout, selected-action MSE loss,
// Adam) without pulling in a deep-learning framework. Matrices are Eigen;
// batches are row-per-sample.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ltune/rng.hpp"

namespace ltune::nn {

struct MlpSpec {
  std::vector<int> layer_sizes{6, 256, 256, 8};
  double dropout_rate = 0.2;  // applied after each hidden ReLU

  int inputs() const { return layer_sizes.front(); }
  int outputs() const { return layer_sizes.back(); }
  void validate() const;  // throws std::invalid_argument
};

struct Weights {
  MlpSpec spec;
  std::vector<Eigen::MatrixXd> w;  // w[l] is (in x out)
  std::vector<Eigen::VectorXd> b;  // b[l] is (out)

  std::size_t parameter_count() const;
  bool same_shape(const Weights& other) const;
};

// He-style uniform init, U(-sqrt(6/fan_in), +sqrt(6/fan_in)), zero biases.
Weights init_weights(const MlpSpec& spec, std::uint64_t seed);

// Deterministic eval-mode forward (dropout disabled).
Eigen::VectorXd forward_eval(const Weights& w, const Eigen::VectorXd& x);
Eigen::MatrixXd forward_eval_batch(const Weights& w, const Eigen::MatrixXd& x);

// Training forward: inverted dropout after each hidden activation, masks
// drawn from the given stream and kept for backward.
struct ForwardCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> hidden;  // post-ReLU, post-dropout
  std::vector<Eigen::MatrixXd> mask;    // 0 or 1/(1-p) per unit
  Eigen::MatrixXd output;
};
ForwardCache forward_train(const Weights& w, const Eigen::MatrixXd& x,
                           rng::Stream& dropout_rng);

// Gradients of mean_i (output(i, action[i]) - target[i])^2 over the batch.
// Non-selected outputs contribute nothing.
struct Gradients {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};
Gradients backward(const Weights& w, const ForwardCache& cache,
                   const std::vector<int>& actions,
                   const Eigen::VectorXd& targets);

struct AdamState {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
};
AdamState make_adam(const Weights& w, double lr = 5e-4);

// Bias-corrected Adam update in place. Throws std::runtime_error on a
// non-finite gradient.
void adam_step(Weights& w, const Gradients& g, AdamState& state);

// Normalization constants stored with the model so inference can rebuild
// the observation scaling without the training config.
struct NormConstants {
  double cap_min = 0.5e-12;
  double cap_max = 21.0e-12;
  double f_min = 1.0e9;
  double f_max = 2.0e9;
};

struct LoadedModel {
  Weights weights;
  NormConstants norm;
};

// Versioned little-endian binary format (layout in the README); byte-exact
// round trip. Throws std::runtime_error on magic/version/shape mismatch or
// a truncated payload.
void save_weights(const Weights& w, const NormConstants& norm,
                  const std::string& path);
LoadedModel load_weights(const std::string& path);

}  // namespace ltune::nn
