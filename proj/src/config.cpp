#include "ltune/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ltune::config {

using nlohmann::ordered_json;

void RunConfig::validate() const {
  grid.validate();
  env.validate();
  train.validate();
  net.validate();
}

RunConfig defaults() { return RunConfig{}; }

void apply_toy_preset(RunConfig& cfg) {
  const std::uint64_t seed = cfg.grid.seed;
  cfg.grid = dataset::toy_grid(seed);
}

namespace {

// pF fields are scaled at this boundary; everything stays SI internally.
constexpr double kPf = 1e-12;

void require_known_keys(const ordered_json& obj,
                        std::initializer_list<const char*> known,
                        const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " +
                                  where);
    }
  }
}

template <typename T>
void get(const ordered_json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

void get_pf(const ordered_json& obj, const char* key, double& target) {
  if (obj.contains(key)) target = obj.at(key).get<double>() * kPf;
}

}  // namespace

RunConfig load_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: " + path + " is not valid JSON: " +
                                e.what());
  }

  require_known_keys(j, {"seed", "grid", "env", "train", "net", "baselines",
                         "paths"},
                     "top level");
  get(j, "seed", base.seed);

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    require_known_keys(g,
                       {"cap_min_pf", "cap_max_pf", "cap_step_pf", "f_min_hz",
                        "f_max_hz", "f_step_hz", "train_fraction"},
                       "grid");
    get_pf(g, "cap_min_pf", base.grid.cap_min);
    get_pf(g, "cap_max_pf", base.grid.cap_max);
    get_pf(g, "cap_step_pf", base.grid.cap_step);
    get(g, "f_min_hz", base.grid.f_min);
    get(g, "f_max_hz", base.grid.f_max);
    get(g, "f_step_hz", base.grid.f_step);
    get(g, "train_fraction", base.grid.train_fraction);
  }

  if (j.contains("env")) {
    const auto& e = j.at("env");
    require_known_keys(e,
                       {"cap_min_pf", "cap_max_pf", "delta_c_pf", "cap_init_pf",
                        "eps_threshold", "max_steps_train", "max_steps_test",
                        "rs_ohm", "f_min_hz", "f_max_hz"},
                       "env");
    get_pf(e, "cap_min_pf", base.env.cap_min);
    get_pf(e, "cap_max_pf", base.env.cap_max);
    get_pf(e, "delta_c_pf", base.env.delta_c);
    get_pf(e, "cap_init_pf", base.env.cap_init);
    get(e, "eps_threshold", base.env.eps_threshold);
    get(e, "max_steps_train", base.env.max_steps_train);
    get(e, "max_steps_test", base.env.max_steps_test);
    get(e, "rs_ohm", base.env.rs);
    get(e, "f_min_hz", base.env.f_min);
    get(e, "f_max_hz", base.env.f_max);
  }

  if (j.contains("train")) {
    const auto& t = j.at("train");
    require_known_keys(t,
                       {"episodes", "discount", "batch_size", "target_sync",
                        "replay_capacity", "lr", "eps0", "eps_min",
                        "eps_decay"},
                       "train");
    get(t, "episodes", base.train.episodes);
    get(t, "discount", base.train.discount);
    get(t, "batch_size", base.train.batch_size);
    get(t, "target_sync", base.train.target_sync);
    get(t, "replay_capacity", base.train.replay_capacity);
    get(t, "lr", base.train.lr);
    get(t, "eps0", base.train.eps.eps0);
    get(t, "eps_min", base.train.eps.eps_min);
    get(t, "eps_decay", base.train.eps.decay);
  }

  if (j.contains("net")) {
    const auto& n = j.at("net");
    require_known_keys(n, {"hidden", "dropout"}, "net");
    if (n.contains("hidden")) {
      const auto hidden = n.at("hidden").get<std::vector<int>>();
      base.net.layer_sizes.clear();
      base.net.layer_sizes.push_back(6);
      for (int h : hidden) base.net.layer_sizes.push_back(h);
      base.net.layer_sizes.push_back(env::Action::kCount);
    }
    get(n, "dropout", base.net.dropout_rate);
  }

  if (j.contains("baselines")) {
    const auto& b = j.at("baselines");
    require_known_keys(b,
                       {"max_iters", "threshold", "cap_min_pf", "cap_max_pf",
                        "lattice_step_pf", "ga", "sapso", "adam"},
                       "baselines");
    get(b, "max_iters", base.baselines.max_iters);
    get(b, "threshold", base.baselines.threshold);
    get_pf(b, "cap_min_pf", base.baselines.cap_min);
    get_pf(b, "cap_max_pf", base.baselines.cap_max);
    get_pf(b, "lattice_step_pf", base.baselines.lattice_step);
    if (b.contains("ga")) {
      const auto& g = b.at("ga");
      require_known_keys(g, {"population", "crossover", "mutation"}, "ga");
      get(g, "population", base.baselines.ga.population);
      get(g, "crossover", base.baselines.ga.crossover);
      get(g, "mutation", base.baselines.ga.mutation);
    }
    if (b.contains("sapso")) {
      const auto& s = b.at("sapso");
      require_known_keys(s,
                         {"particles", "c1", "c2", "cooling", "inertia_start",
                          "inertia_end"},
                         "sapso");
      get(s, "particles", base.baselines.sapso.particles);
      get(s, "c1", base.baselines.sapso.c1);
      get(s, "c2", base.baselines.sapso.c2);
      get(s, "cooling", base.baselines.sapso.cooling);
      get(s, "inertia_start", base.baselines.sapso.inertia_start);
      get(s, "inertia_end", base.baselines.sapso.inertia_end);
    }
    if (b.contains("adam")) {
      const auto& a = b.at("adam");
      require_known_keys(a, {"init_pf", "lr", "beta1", "beta2", "stability"},
                         "adam");
      get_pf(a, "init_pf", base.baselines.adam.init);
      get(a, "lr", base.baselines.adam.lr);
      get(a, "beta1", base.baselines.adam.beta1);
      get(a, "beta2", base.baselines.adam.beta2);
      get(a, "stability", base.baselines.adam.stability);
    }
  }

  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    require_known_keys(p, {"pool", "model", "results", "reports"}, "paths");
    get(p, "pool", base.paths.pool);
    get(p, "model", base.paths.model);
    get(p, "results", base.paths.results);
    get(p, "reports", base.paths.reports);
  }

  return base;
}

std::string to_json(const RunConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["grid"] = {{"cap_min_pf", cfg.grid.cap_min / kPf},
               {"cap_max_pf", cfg.grid.cap_max / kPf},
               {"cap_step_pf", cfg.grid.cap_step / kPf},
               {"f_min_hz", cfg.grid.f_min},
               {"f_max_hz", cfg.grid.f_max},
               {"f_step_hz", cfg.grid.f_step},
               {"train_fraction", cfg.grid.train_fraction}};
  j["env"] = {{"cap_min_pf", cfg.env.cap_min / kPf},
              {"cap_max_pf", cfg.env.cap_max / kPf},
              {"delta_c_pf", cfg.env.delta_c / kPf},
              {"cap_init_pf", cfg.env.cap_init / kPf},
              {"eps_threshold", cfg.env.eps_threshold},
              {"max_steps_train", cfg.env.max_steps_train},
              {"max_steps_test", cfg.env.max_steps_test},
              {"rs_ohm", cfg.env.rs},
              {"f_min_hz", cfg.env.f_min},
              {"f_max_hz", cfg.env.f_max}};
  j["train"] = {{"episodes", cfg.train.episodes},
                {"discount", cfg.train.discount},
                {"batch_size", cfg.train.batch_size},
                {"target_sync", cfg.train.target_sync},
                {"replay_capacity", cfg.train.replay_capacity},
                {"lr", cfg.train.lr},
                {"eps0", cfg.train.eps.eps0},
                {"eps_min", cfg.train.eps.eps_min},
                {"eps_decay", cfg.train.eps.decay}};
  std::vector<int> hidden(cfg.net.layer_sizes.begin() + 1,
                          cfg.net.layer_sizes.end() - 1);
  j["net"] = {{"hidden", hidden}, {"dropout", cfg.net.dropout_rate}};
  j["baselines"] = {
      {"max_iters", cfg.baselines.max_iters},
      {"threshold", cfg.baselines.threshold},
      {"cap_min_pf", cfg.baselines.cap_min / kPf},
      {"cap_max_pf", cfg.baselines.cap_max / kPf},
      {"lattice_step_pf", cfg.baselines.lattice_step / kPf},
      {"ga",
       {{"population", cfg.baselines.ga.population},
        {"crossover", cfg.baselines.ga.crossover},
        {"mutation", cfg.baselines.ga.mutation}}},
      {"sapso",
       {{"particles", cfg.baselines.sapso.particles},
        {"c1", cfg.baselines.sapso.c1},
        {"c2", cfg.baselines.sapso.c2},
        {"cooling", cfg.baselines.sapso.cooling},
        {"inertia_start", cfg.baselines.sapso.inertia_start},
        {"inertia_end", cfg.baselines.sapso.inertia_end}}},
      {"adam",
       {{"init_pf", cfg.baselines.adam.init / kPf},
        {"lr", cfg.baselines.adam.lr},
        {"beta1", cfg.baselines.adam.beta1},
        {"beta2", cfg.baselines.adam.beta2},
        {"stability", cfg.baselines.adam.stability}}}};
  j["paths"] = {{"pool", cfg.paths.pool},
                {"model", cfg.paths.model},
                {"results", cfg.paths.results},
                {"reports", cfg.paths.reports}};
  return j.dump(2);
}

}  // namespace ltune::config
