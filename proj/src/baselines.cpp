#include "ltune/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ltune/circuit.hpp"

namespace ltune::baselines {

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

struct Objective {
  const dataset::LoadSample& sample;
  double rs;
  mutable long evaluations = 0;

  double operator()(double cp, double cs) const {
    ++evaluations;
    return circuit::gamma_magnitude({cp, cs, sample.f, rs}, sample.zl);
  }
};

int lattice_count(const BaselineConfig& cfg) {
  return static_cast<int>(
             std::round((cfg.cap_max - cfg.cap_min) / cfg.lattice_step)) +
         1;
}

double lattice_value(const BaselineConfig& cfg, int idx) {
  return cfg.cap_min + idx * cfg.lattice_step;
}

int nearest_lattice(const BaselineConfig& cfg, double cap) {
  const int n = lattice_count(cfg);
  const int idx = static_cast<int>(
      std::round((cap - cfg.cap_min) / cfg.lattice_step));
  return std::clamp(idx, 0, n - 1);
}

TuningResult make_result(const char* method, const dataset::LoadSample&,
                         double best_gamma, int iters, double cp, double cs,
                         double threshold, double wall) {
  TuningResult r;
  r.method = method;
  r.final_gamma = best_gamma;
  r.steps = iters;
  r.success = best_gamma < threshold;
  r.wall_time_s = wall;
  r.final_cp = cp;
  r.final_cs = cs;
  return r;
}

}  // namespace

BaselineOutcome ga_tune(const dataset::LoadSample& sample,
                        const BaselineConfig& cfg,
                        const StartPoints& initial) {
  Timer timer;
  Objective f{sample, cfg.rs};
  auto rng = rng::derive(cfg.seed, rng::kBaselineGA);
  const int n_lattice = lattice_count(cfg);
  const int pop_size = cfg.ga.population;

  struct Individual {
    int cp_idx, cs_idx;
    double fitness;
  };
  std::vector<Individual> pop(static_cast<std::size_t>(pop_size));
  for (int i = 0; i < pop_size; ++i) {
    int cp_idx, cs_idx;
    if (initial && i < static_cast<int>(initial->size())) {
      cp_idx = nearest_lattice(cfg, (*initial)[static_cast<std::size_t>(i)].first);
      cs_idx = nearest_lattice(cfg, (*initial)[static_cast<std::size_t>(i)].second);
    } else {
      cp_idx = static_cast<int>(rng.next_below(n_lattice));
      cs_idx = static_cast<int>(rng.next_below(n_lattice));
    }
    pop[static_cast<std::size_t>(i)] = {
        cp_idx, cs_idx,
        f(lattice_value(cfg, cp_idx), lattice_value(cfg, cs_idx))};
  }

  auto best = std::min_element(pop.begin(), pop.end(),
                               [](const Individual& a, const Individual& b) {
                                 return a.fitness < b.fitness;
                               });
  Individual champion = *best;

  BaselineOutcome out;
  out.best_trace.push_back(champion.fitness);
  int iters = 0;
  while (champion.fitness >= cfg.threshold && iters < cfg.max_iters) {
    std::vector<Individual> next;
    next.reserve(static_cast<std::size_t>(pop_size));
    next.push_back(champion);  // 1-elite
    auto tournament = [&]() -> const Individual& {
      const Individual& a = pop[rng.next_below(pop.size())];
      const Individual& b = pop[rng.next_below(pop.size())];
      return a.fitness <= b.fitness ? a : b;
    };
    while (static_cast<int>(next.size()) < pop_size) {
      Individual child = tournament();
      const Individual& other = tournament();
      if (rng.next_double() < cfg.ga.crossover) {
        if (rng.next_double() < 0.5) child.cp_idx = other.cp_idx;
        if (rng.next_double() < 0.5) child.cs_idx = other.cs_idx;
      }
      for (int* gene : {&child.cp_idx, &child.cs_idx}) {
        if (rng.next_double() < cfg.ga.mutation) {
          *gene += rng.next_double() < 0.5 ? -1 : +1;
          *gene = std::clamp(*gene, 0, n_lattice - 1);
        }
      }
      child.fitness =
          f(lattice_value(cfg, child.cp_idx), lattice_value(cfg, child.cs_idx));
      next.push_back(child);
    }
    pop = std::move(next);
    for (const auto& ind : pop) {
      if (ind.fitness < champion.fitness) champion = ind;
    }
    out.best_trace.push_back(champion.fitness);
    ++iters;
  }

  out.result = make_result("ga", sample, champion.fitness, iters,
                           lattice_value(cfg, champion.cp_idx),
                           lattice_value(cfg, champion.cs_idx), cfg.threshold,
                           timer.seconds());
  out.evaluations = f.evaluations;
  return out;
}

BaselineOutcome sapso_tune(const dataset::LoadSample& sample,
                           const BaselineConfig& cfg,
                           const StartPoints& initial) {
  Timer timer;
  Objective f{sample, cfg.rs};
  auto rng = rng::derive(cfg.seed, rng::kBaselineSAPSO);
  const int n = cfg.sapso.particles;

  struct Particle {
    double x[2], v[2];
    double pbest_x[2];
    double pbest_f;
  };
  std::vector<Particle> swarm(static_cast<std::size_t>(n));
  double gbest_x[2] = {0, 0};
  double gbest_f = std::numeric_limits<double>::infinity();

  std::vector<double> initial_f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Particle& p = swarm[static_cast<std::size_t>(i)];
    if (initial && i < static_cast<int>(initial->size())) {
      p.x[0] = (*initial)[static_cast<std::size_t>(i)].first;
      p.x[1] = (*initial)[static_cast<std::size_t>(i)].second;
    } else {
      p.x[0] = rng.uniform(cfg.cap_min, cfg.cap_max);
      p.x[1] = rng.uniform(cfg.cap_min, cfg.cap_max);
    }
    p.v[0] = p.v[1] = 0.0;
    p.pbest_x[0] = p.x[0];
    p.pbest_x[1] = p.x[1];
    p.pbest_f = f(p.x[0], p.x[1]);
    initial_f[static_cast<std::size_t>(i)] = p.pbest_f;
    if (p.pbest_f < gbest_f) {
      gbest_f = p.pbest_f;
      gbest_x[0] = p.x[0];
      gbest_x[1] = p.x[1];
    }
  }

  // T0 = population SD of the initial swarm objective values
  double mean = 0.0;
  for (double v : initial_f) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : initial_f) var += (v - mean) * (v - mean);
  double temperature = std::sqrt(var / n);

  BaselineOutcome out;
  out.best_trace.push_back(gbest_f);
  int iters = 0;
  while (gbest_f >= cfg.threshold && iters < cfg.max_iters) {
    const double w =
        cfg.max_iters > 1
            ? cfg.sapso.inertia_start +
                  (cfg.sapso.inertia_end - cfg.sapso.inertia_start) *
                      (static_cast<double>(iters) / (cfg.max_iters - 1))
            : cfg.sapso.inertia_start;
    for (auto& p : swarm) {
      for (int d = 0; d < 2; ++d) {
        const double r1 = rng.next_double();
        const double r2 = rng.next_double();
        p.v[d] = w * p.v[d] + cfg.sapso.c1 * r1 * (p.pbest_x[d] - p.x[d]) +
                 cfg.sapso.c2 * r2 * (gbest_x[d] - p.x[d]);
        p.x[d] = std::clamp(p.x[d] + p.v[d], cfg.cap_min, cfg.cap_max);
      }
      const double fx = f(p.x[0], p.x[1]);
      if (fx < gbest_f) {
        gbest_f = fx;
        gbest_x[0] = p.x[0];
        gbest_x[1] = p.x[1];
      }
      if (fx < p.pbest_f) {
        p.pbest_f = fx;
        p.pbest_x[0] = p.x[0];
        p.pbest_x[1] = p.x[1];
      } else if (temperature > 0.0) {
        // annealed acceptance of a worse personal best
        const double delta = fx - p.pbest_f;
        if (rng.next_double() < std::exp(-delta / temperature)) {
          p.pbest_f = fx;
          p.pbest_x[0] = p.x[0];
          p.pbest_x[1] = p.x[1];
        }
      }
    }
    temperature *= cfg.sapso.cooling;
    out.best_trace.push_back(gbest_f);
    ++iters;
  }

  out.result = make_result("sapso", sample, gbest_f, iters, gbest_x[0],
                           gbest_x[1], cfg.threshold, timer.seconds());
  out.evaluations = f.evaluations;
  return out;
}

BaselineOutcome adam_tune(const dataset::LoadSample& sample,
                          const BaselineConfig& cfg) {
  Timer timer;
  Objective f{sample, cfg.rs};
  const AdamParams& ap = cfg.adam;

  // Optimization runs in picofarads; the analytic gradient is per farad.
  double x[2] = {ap.init * 1e12, ap.init * 1e12};
  double m[2] = {0, 0}, v[2] = {0, 0};
  const double lo = cfg.cap_min * 1e12, hi = cfg.cap_max * 1e12;

  double best_f = f(x[0] * 1e-12, x[1] * 1e-12);
  double best_x[2] = {x[0], x[1]};
  BaselineOutcome out;
  out.best_trace.push_back(best_f);
  int iters = 0;
  while (best_f >= cfg.threshold && iters < cfg.max_iters) {
    const circuit::GammaGradient grad = circuit::gamma_magnitude_gradient(
        {x[0] * 1e-12, x[1] * 1e-12, sample.f, cfg.rs}, sample.zl);
    const double g[2] = {grad.d_cp * 1e-12, grad.d_cs * 1e-12};
    if (std::hypot(g[0], g[1]) < 1e-12) break;  // stalled short of threshold
    ++iters;
    const double c1 = 1.0 - std::pow(ap.beta1, iters);
    const double c2 = 1.0 - std::pow(ap.beta2, iters);
    for (int d = 0; d < 2; ++d) {
      m[d] = ap.beta1 * m[d] + (1.0 - ap.beta1) * g[d];
      v[d] = ap.beta2 * v[d] + (1.0 - ap.beta2) * g[d] * g[d];
      x[d] -= ap.lr * (m[d] / c1) / (std::sqrt(v[d] / c2) + ap.stability);
      x[d] = std::clamp(x[d], lo, hi);
    }
    const double fx = f(x[0] * 1e-12, x[1] * 1e-12);
    if (fx < best_f) {
      best_f = fx;
      best_x[0] = x[0];
      best_x[1] = x[1];
    }
    out.best_trace.push_back(best_f);
  }

  out.result = make_result("adam", sample, best_f, iters, best_x[0] * 1e-12,
                           best_x[1] * 1e-12, cfg.threshold, timer.seconds());
  out.evaluations = f.evaluations;
  return out;
}

TuningResult none_tune(const dataset::LoadSample& sample, double rs) {
  Timer timer;
  const double gamma =
      std::abs(circuit::reflection_coefficient(sample.zl, rs));
  TuningResult r;
  r.method = "none";
  r.final_gamma = gamma;
  r.steps = 0;
  r.success = gamma < 0.01;
  r.wall_time_s = timer.seconds();
  r.final_cp = 0.0;  // no matching network in this case
  r.final_cs = 0.0;
  return r;
}

}  // namespace ltune::baselines
