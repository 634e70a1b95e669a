#include "ltune/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "ltune/env.hpp"

namespace ltune::nn {

namespace {

void check_input(const Weights& w, Eigen::Index cols) {
  if (cols != w.spec.inputs()) {
    throw std::invalid_argument("nn: input width " + std::to_string(cols) +
                                " does not match the network (" +
                                std::to_string(w.spec.inputs()) + ")");
  }
}

}  // namespace

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("nn: need at least input and output layers");
  }
  for (int n : layer_sizes) {
    if (n <= 0) throw std::invalid_argument("nn: non-positive layer size");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("nn: dropout rate must be in [0,1)");
  }
}

std::size_t Weights::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    n += static_cast<std::size_t>(w[l].size()) +
         static_cast<std::size_t>(b[l].size());
  }
  return n;
}

bool Weights::same_shape(const Weights& other) const {
  if (spec.layer_sizes != other.spec.layer_sizes) return false;
  return true;
}

Weights init_weights(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Weights out;
  out.spec = spec;
  auto stream = rng::derive(seed, rng::kWeightInit);
  const std::size_t n_layers = spec.layer_sizes.size() - 1;
  out.w.resize(n_layers);
  out.b.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = spec.layer_sizes[l];
    const int fan_out = spec.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / fan_in);
    out.w[l].resize(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) {
        out.w[l](r, c) = stream.uniform(-limit, limit);
      }
    }
    out.b[l] = Eigen::VectorXd::Zero(fan_out);
  }
  return out;
}

Eigen::MatrixXd forward_eval_batch(const Weights& w, const Eigen::MatrixXd& x) {
  check_input(w, x.cols());
  Eigen::MatrixXd a = x;
  const std::size_t n_layers = w.w.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = a * w.w[l];
    z.rowwise() += w.b[l].transpose();
    if (l + 1 < n_layers) {
      a = z.cwiseMax(0.0);
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Eigen::VectorXd forward_eval(const Weights& w, const Eigen::VectorXd& x) {
  return forward_eval_batch(w, x.transpose()).row(0).transpose();
}

ForwardCache forward_train(const Weights& w, const Eigen::MatrixXd& x,
                           rng::Stream& dropout_rng) {
  check_input(w, x.cols());
  ForwardCache cache;
  cache.input = x;
  const std::size_t n_layers = w.w.size();
  const double p = w.spec.dropout_rate;
  const double keep_scale = p > 0.0 ? 1.0 / (1.0 - p) : 1.0;
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = a * w.w[l];
    z.rowwise() += w.b[l].transpose();
    if (l + 1 == n_layers) {
      cache.output = std::move(z);
      break;
    }
    Eigen::MatrixXd h = z.cwiseMax(0.0);
    Eigen::MatrixXd mask(h.rows(), h.cols());
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      for (Eigen::Index c = 0; c < h.cols(); ++c) {
        mask(r, c) = dropout_rng.next_double() < p ? 0.0 : keep_scale;
      }
    }
    a = h.cwiseProduct(mask);
    cache.hidden.push_back(a);
    cache.mask.push_back(std::move(mask));
  }
  return cache;
}

Gradients backward(const Weights& w, const ForwardCache& cache,
                   const std::vector<int>& actions,
                   const Eigen::VectorXd& targets) {
  const Eigen::Index batch = cache.output.rows();
  if (static_cast<Eigen::Index>(actions.size()) != batch ||
      targets.size() != batch) {
    throw std::invalid_argument("nn: batch size mismatch in backward");
  }
  const std::size_t n_layers = w.w.size();

  // d(loss)/d(output): only the selected action per row carries error.
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(batch, cache.output.cols());
  const double scale = 2.0 / static_cast<double>(batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= cache.output.cols()) {
      throw std::invalid_argument("nn: action index out of range");
    }
    delta(i, a) = scale * (cache.output(i, a) - targets(i));
  }

  Gradients g;
  g.w.resize(n_layers);
  g.b.resize(n_layers);
  for (std::size_t l = n_layers; l-- > 0;) {
    const Eigen::MatrixXd& below =
        (l == 0) ? cache.input : cache.hidden[l - 1];
    g.w[l].noalias() = below.transpose() * delta;
    g.b[l] = delta.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd d = delta * w.w[l].transpose();
      // dropout mask, then ReLU gate (post-dropout hidden > 0 exactly where
      // the pre-activation was positive and the unit was kept)
      d = d.cwiseProduct(cache.mask[l - 1]);
      d = d.cwiseProduct(
          (cache.hidden[l - 1].array() > 0.0).cast<double>().matrix());
      delta = std::move(d);
    }
  }
  return g;
}

AdamState make_adam(const Weights& w, double lr) {
  AdamState s;
  s.lr = lr;
  const std::size_t n_layers = w.w.size();
  s.m_w.resize(n_layers);
  s.v_w.resize(n_layers);
  s.m_b.resize(n_layers);
  s.v_b.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    s.m_w[l] = Eigen::MatrixXd::Zero(w.w[l].rows(), w.w[l].cols());
    s.v_w[l] = Eigen::MatrixXd::Zero(w.w[l].rows(), w.w[l].cols());
    s.m_b[l] = Eigen::VectorXd::Zero(w.b[l].size());
    s.v_b[l] = Eigen::VectorXd::Zero(w.b[l].size());
  }
  return s;
}

void adam_step(Weights& w, const Gradients& g, AdamState& state) {
  for (std::size_t l = 0; l < g.w.size(); ++l) {
    if (!g.w[l].allFinite() || !g.b[l].allFinite()) {
      throw std::runtime_error("nn: non-finite gradient in layer " +
                               std::to_string(l));
    }
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, state.step);
  const double c2 = 1.0 - std::pow(state.beta2, state.step);
  for (std::size_t l = 0; l < w.w.size(); ++l) {
    state.m_w[l] = state.beta1 * state.m_w[l] + (1.0 - state.beta1) * g.w[l];
    state.v_w[l] = state.beta2 * state.v_w[l] +
                   (1.0 - state.beta2) * g.w[l].cwiseProduct(g.w[l]);
    w.w[l].array() -= state.lr * (state.m_w[l].array() / c1) /
                      ((state.v_w[l].array() / c2).sqrt() + state.eps);

    state.m_b[l] = state.beta1 * state.m_b[l] + (1.0 - state.beta1) * g.b[l];
    state.v_b[l] = state.beta2 * state.v_b[l] +
                   (1.0 - state.beta2) * g.b[l].cwiseProduct(g.b[l]);
    w.b[l].array() -= state.lr * (state.m_b[l].array() / c1) /
                      ((state.v_b[l].array() / c2).sqrt() + state.eps);
  }
}

namespace {

constexpr char kMagic[8] = {'L', 'T', 'N', 'Q', 'N', 'E', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v, const char* what) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) {
    throw std::runtime_error(std::string("nn: model file truncated while "
                                         "reading ") +
                             what);
  }
}

}  // namespace

void save_weights(const Weights& w, const NormConstants& norm,
                  const std::string& path) {
  static_assert(sizeof(double) == 8);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("nn: cannot open " + tmp);
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    const std::uint32_t n_sizes =
        static_cast<std::uint32_t>(w.spec.layer_sizes.size());
    write_pod(out, n_sizes);
    for (int n : w.spec.layer_sizes) {
      write_pod(out, static_cast<std::uint32_t>(n));
    }
    write_pod(out, w.spec.dropout_rate);
    write_pod(out, norm.cap_min);
    write_pod(out, norm.cap_max);
    write_pod(out, norm.f_min);
    write_pod(out, norm.f_max);
    const std::uint32_t n_actions = env::Action::kCount;
    write_pod(out, n_actions);
    for (const auto& d : env::Action::kDeltas) {
      write_pod(out, static_cast<std::int32_t>(d[0]));
      write_pod(out, static_cast<std::int32_t>(d[1]));
    }
    for (std::size_t l = 0; l + 1 < w.spec.layer_sizes.size(); ++l) {
      for (Eigen::Index r = 0; r < w.w[l].rows(); ++r) {
        for (Eigen::Index c = 0; c < w.w[l].cols(); ++c) {
          write_pod(out, w.w[l](r, c));
        }
      }
      for (Eigen::Index i = 0; i < w.b[l].size(); ++i) {
        write_pod(out, w.b[l](i));
      }
    }
    if (!out) throw std::runtime_error("nn: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("nn: rename to " + path + " failed");
  }
}

LoadedModel load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("nn: cannot open " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("nn: " + path + " is not a model file");
  }
  std::uint32_t version = 0;
  read_pod(in, version, "version");
  if (version != kVersion) {
    throw std::runtime_error("nn: unsupported model version " +
                             std::to_string(version) + " (expected " +
                             std::to_string(kVersion) + ")");
  }
  std::uint32_t n_sizes = 0;
  read_pod(in, n_sizes, "layer count");
  if (n_sizes < 2 || n_sizes > 64) {
    throw std::runtime_error("nn: implausible layer count " +
                             std::to_string(n_sizes));
  }
  LoadedModel model;
  model.weights.spec.layer_sizes.resize(n_sizes);
  for (auto& n : model.weights.spec.layer_sizes) {
    std::uint32_t v = 0;
    read_pod(in, v, "layer size");
    if (v == 0 || v > (1u << 20)) {
      throw std::runtime_error("nn: implausible layer size");
    }
    n = static_cast<int>(v);
  }
  read_pod(in, model.weights.spec.dropout_rate, "dropout rate");
  read_pod(in, model.norm.cap_min, "cap_min");
  read_pod(in, model.norm.cap_max, "cap_max");
  read_pod(in, model.norm.f_min, "f_min");
  read_pod(in, model.norm.f_max, "f_max");
  std::uint32_t n_actions = 0;
  read_pod(in, n_actions, "action count");
  if (n_actions != env::Action::kCount) {
    throw std::runtime_error("nn: action table has " +
                             std::to_string(n_actions) + " entries, expected " +
                             std::to_string(int(env::Action::kCount)));
  }
  for (const auto& d : env::Action::kDeltas) {
    std::int32_t dcp = 0, dcs = 0;
    read_pod(in, dcp, "action delta");
    read_pod(in, dcs, "action delta");
    if (dcp != d[0] || dcs != d[1]) {
      throw std::runtime_error("nn: action table does not match this build");
    }
  }
  const std::size_t n_layers = n_sizes - 1;
  model.weights.w.resize(n_layers);
  model.weights.b.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = model.weights.spec.layer_sizes[l];
    const int fan_out = model.weights.spec.layer_sizes[l + 1];
    model.weights.w[l].resize(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) {
        double v = 0.0;
        read_pod(in, v, "weight");
        if (!std::isfinite(v)) {
          throw std::runtime_error("nn: non-finite weight in model file");
        }
        model.weights.w[l](r, c) = v;
      }
    }
    model.weights.b[l].resize(fan_out);
    for (int i = 0; i < fan_out; ++i) {
      double v = 0.0;
      read_pod(in, v, "bias");
      if (!std::isfinite(v)) {
        throw std::runtime_error("nn: non-finite bias in model file");
      }
      model.weights.b[l](i) = v;
    }
  }
  // trailing junk means the file does not match the declared shapes
  char extra;
  in.read(&extra, 1);
  if (in.gcount() != 0) {
    throw std::runtime_error("nn: model file has trailing bytes");
  }
  return model;
}

}  // namespace ltune::nn
