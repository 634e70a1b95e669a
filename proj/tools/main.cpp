// ltune command-line tool: dataset generation, agent training, tuner
// evaluation, report generation, exploration sweeps and landscape dumps.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
// stdout carries data summaries; diagnostics go to stderr.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltune/agent.hpp"
#include "ltune/baselines.hpp"
#include "ltune/config.hpp"
#include "ltune/dataset.hpp"
#include "ltune/eval.hpp"
#include "ltune/format.hpp"

namespace {

using namespace ltune;
using nlohmann::ordered_json;

struct CommonOpts {
  std::string config_path;
  bool toy = false;
  bool has_seed = false;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "JSON config file (default: $LTUNE_CONFIG if set)");
  cmd->add_flag("--toy", opts.toy, "use the small CI preset grid");
  cmd->add_option("--seed", opts.seed, "global seed override")
      ->each([&opts](const std::string&) { opts.has_seed = true; });
}

config::RunConfig resolve_config(const CommonOpts& opts) {
  config::RunConfig cfg = config::defaults();
  std::string path = opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("LTUNE_CONFIG")) path = env;
  }
  if (!path.empty()) cfg = config::load_file(path);
  if (opts.has_seed) cfg.seed = opts.seed;
  if (opts.toy) config::apply_toy_preset(cfg);
  cfg.propagate_seed();
  cfg.validate();
  return cfg;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("rename to " + path + " failed");
  }
}

std::vector<dataset::LoadSample> load_pool_checked(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw CLI::ValidationError("pool file not found: " + path +
                               " (run `ltune gen-data` first)");
  }
  return dataset::load_pool(path);
}

// Fan-out over sample positions; output slots are preallocated so the row
// order never depends on the job count.
template <typename Fn>
void eval_parallel(const std::vector<std::size_t>& ids,
                   std::vector<TuningResult>& rows, int jobs, Fn&& fn) {
  (void)rows;
  if (jobs <= 1 || ids.size() < 2) {
    for (std::size_t k = 0; k < ids.size(); ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= ids.size()) return;
      fn(k);
    }
  };
  std::vector<std::thread> threads;
  const int n = std::min<int>(jobs, static_cast<int>(ids.size()));
  for (int t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

int cmd_gen_data(const CommonOpts& opts, const std::string& out_override) {
  config::RunConfig cfg = resolve_config(opts);
  const std::string pool_path =
      out_override.empty() ? cfg.paths.pool : out_override;

  auto pool = dataset::generate_pool(cfg.grid, cfg.env.rs);
  dataset::stratified_split(pool, cfg.grid);
  dataset::save_pool(pool, pool_path);

  const auto train_ids = dataset::split_indices(pool, dataset::Split::train);
  ordered_json manifest;
  manifest["pool"] = pool_path;
  manifest["total"] = pool.size();
  manifest["train"] = train_ids.size();
  manifest["test"] = pool.size() - train_ids.size();
  manifest["seed"] = cfg.seed;
  manifest["grid"] = ordered_json::parse(config::to_json(cfg))["grid"];
  atomic_write(pool_path + ".manifest.json", manifest.dump(2) + "\n");

  std::cout << manifest.dump(2) << "\n";
  return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& pool_override,
              const std::string& model_override,
              const std::string& log_override, int episodes_override) {
  config::RunConfig cfg = resolve_config(opts);
  if (episodes_override > 0) cfg.train.episodes = episodes_override;
  const std::string pool_path =
      pool_override.empty() ? cfg.paths.pool : pool_override;
  const std::string model_path =
      model_override.empty() ? cfg.paths.model : model_override;
  const std::string log_path =
      log_override.empty() ? model_path + ".train_log.csv" : log_override;

  const auto pool = load_pool_checked(pool_path);
  const auto train_pool = dataset::filter_split(pool, dataset::Split::train);
  if (train_pool.empty()) {
    throw CLI::ValidationError("pool has no train-tagged samples");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const agent::TrainResult result =
      agent::train(train_pool, cfg.env, cfg.train, cfg.net);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const nn::NormConstants norm{cfg.env.cap_min, cfg.env.cap_max, cfg.env.f_min,
                               cfg.env.f_max};
  nn::save_weights(result.weights, norm, model_path);

  std::string log = "episode,cum_reward,final_gamma,steps,epsilon\n";
  for (const auto& row : result.log) {
    log += std::to_string(row.episode) + ',' + fmt::num(row.cum_reward) + ',' +
           fmt::num(row.final_gamma) + ',' + std::to_string(row.steps) + ',' +
           fmt::num(row.eps) + '\n';
  }
  atomic_write(log_path, log);

  const auto& last = result.log.back();
  ordered_json summary;
  summary["model"] = model_path;
  summary["train_log"] = log_path;
  summary["episodes"] = cfg.train.episodes;
  summary["total_env_steps"] = result.total_env_steps;
  summary["train_time_s"] = elapsed;
  summary["final_episode"] = {{"cum_reward", last.cum_reward},
                              {"final_gamma", last.final_gamma},
                              {"steps", last.steps},
                              {"epsilon", last.eps}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

struct EvalSummary {
  eval::SummaryStats gamma;
  double success_001 = 0.0;
  double success_02 = 0.0;
  double mean_steps = 0.0;
  double total_time = 0.0;
};

EvalSummary summarize(const std::vector<TuningResult>& rows) {
  std::vector<double> gammas, steps;
  std::size_t ok001 = 0, ok02 = 0;
  double total_time = 0.0;
  for (const auto& r : rows) {
    gammas.push_back(r.final_gamma);
    steps.push_back(static_cast<double>(r.steps));
    if (r.final_gamma < 0.01) ++ok001;
    if (r.final_gamma < 0.2) ++ok02;
    total_time += r.wall_time_s;
  }
  EvalSummary s;
  s.gamma = eval::summary_stats(gammas);
  s.success_001 = static_cast<double>(ok001) / static_cast<double>(rows.size());
  s.success_02 = static_cast<double>(ok02) / static_cast<double>(rows.size());
  s.mean_steps = eval::summary_stats(steps).mean;
  s.total_time = total_time;
  return s;
}

ordered_json summary_json(const EvalSummary& s) {
  return {{"n", s.gamma.n},
          {"mean", s.gamma.mean},
          {"median", s.gamma.median},
          {"sd", s.gamma.sd},
          {"success_rate_0p01", s.success_001},
          {"success_rate_0p2", s.success_02},
          {"mean_steps", s.mean_steps},
          {"total_wall_time_s", s.total_time}};
}

int cmd_eval(const CommonOpts& opts, const std::string& method,
             double eps_test, const std::string& pool_override,
             const std::string& model_override,
             const std::string& out_override, int jobs, long limit,
             bool include_train) {
  config::RunConfig cfg = resolve_config(opts);
  const std::string pool_path =
      pool_override.empty() ? cfg.paths.pool : pool_override;
  const std::string out_path =
      out_override.empty() ? cfg.paths.results : out_override;

  const auto pool = load_pool_checked(pool_path);
  std::vector<std::size_t> ids =
      include_train
          ? [&] {
              std::vector<std::size_t> all(pool.size());
              for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
              return all;
            }()
          : dataset::split_indices(pool, dataset::Split::test);
  if (limit > 0 && static_cast<std::size_t>(limit) < ids.size()) {
    ids.resize(static_cast<std::size_t>(limit));
  }
  if (ids.empty()) throw CLI::ValidationError("no samples selected");

  std::vector<TuningResult> rows(ids.size());

  if (method == "agent") {
    const std::string model_path =
        model_override.empty() ? cfg.paths.model : model_override;
    if (!std::filesystem::exists(model_path)) {
      throw CLI::ValidationError("model file not found: " + model_path +
                                 " (run `ltune train` first)");
    }
    const nn::LoadedModel model = nn::load_weights(model_path);
    env::EnvConfig env_cfg = cfg.env;
    env_cfg.cap_min = model.norm.cap_min;
    env_cfg.cap_max = model.norm.cap_max;
    env_cfg.f_min = model.norm.f_min;
    env_cfg.f_max = model.norm.f_max;
    eval_parallel(ids, rows, jobs, [&](std::size_t k) {
      const std::size_t id = ids[k];
      auto stream = rng::derive(cfg.seed, rng::kEvalTune, id);
      auto outcome = agent::tune(pool[id], model.weights, env_cfg, eps_test,
                                 env_cfg.max_steps_test, stream);
      outcome.result.sample_id = id;
      rows[k] = outcome.result;
    });
  } else if (method == "none") {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      rows[k] = baselines::none_tune(pool[ids[k]], cfg.env.rs);
      rows[k].sample_id = ids[k];
    }
  } else if (method == "ga" || method == "sapso" || method == "adam") {
    eval_parallel(ids, rows, jobs, [&](std::size_t k) {
      const std::size_t id = ids[k];
      baselines::BaselineConfig bc = cfg.baselines;
      bc.seed = rng::mix_seed(cfg.seed, rng::kEvalTune, id);
      baselines::BaselineOutcome outcome;
      if (method == "ga") {
        outcome = baselines::ga_tune(pool[id], bc);
      } else if (method == "sapso") {
        outcome = baselines::sapso_tune(pool[id], bc);
      } else {
        outcome = baselines::adam_tune(pool[id], bc);
      }
      outcome.result.sample_id = id;
      rows[k] = outcome.result;
    });
  } else {
    throw CLI::ValidationError("unknown method '" + method + "'");
  }

  for (auto& r : rows) r.eps_test = (method == "agent") ? eps_test : 0.0;
  eval::save_results(rows, out_path, /*append=*/true);

  const EvalSummary s = summarize(rows);
  ordered_json j;
  j["method"] = method;
  j["eps_test"] = (method == "agent") ? eps_test : 0.0;
  j["results"] = out_path;
  j["summary"] = summary_json(s);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& results_paths,
               const std::string& pool_path, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<TuningResult> all;
  for (const auto& p : results_paths) {
    auto part = eval::load_results(p);
    all.insert(all.end(), part.begin(), part.end());
  }
  if (all.empty()) throw CLI::ValidationError("no result rows to report");

  std::vector<dataset::LoadSample> pool;
  if (!pool_path.empty()) pool = dataset::load_pool(pool_path);

  // group rows by (method, eps_test)
  std::map<std::pair<std::string, double>, std::vector<TuningResult>> groups;
  for (const auto& r : all) groups[{r.method, r.eps_test}].push_back(r);

  ordered_json summary;
  summary["groups"] = ordered_json::array();
  std::string sweep_csv = "method,eps_test,n,mean,sd,success_rate,total_time_s\n";
  for (const auto& [key, rows] : groups) {
    const auto& [method, eps] = key;
    const std::string tag =
        method + (method == "agent" ? "_eps" + fmt::num(eps) : "");

    const EvalSummary s = summarize(rows);
    ordered_json g;
    g["method"] = method;
    g["eps_test"] = eps;
    g["stats"] = summary_json(s);

    std::vector<double> gammas;
    for (const auto& r : rows) gammas.push_back(r.final_gamma);
    const eval::Ecdf ecdf(gammas);
    std::string ecdf_csv = "threshold,fraction\n";
    for (const auto& [v, frac] : ecdf.points()) {
      ecdf_csv += fmt::num(v) + ',' + fmt::num(frac) + '\n';
    }
    atomic_write(out_dir + "/ecdf_" + tag + ".csv", ecdf_csv);

    if (!pool.empty()) {
      const auto freq = eval::per_frequency_stats(rows, pool);
      std::string freq_csv = "f_hz,mean_gamma,sd_gamma,mean_steps,sd_steps,n\n";
      for (const auto& row : freq) {
        freq_csv += fmt::num(row.f) + ',' + fmt::num(row.mean_gamma) + ',' +
                    fmt::num(row.sd_gamma) + ',' + fmt::num(row.mean_steps) +
                    ',' + fmt::num(row.sd_steps) + ',' +
                    std::to_string(row.n) + '\n';
      }
      atomic_write(out_dir + "/per_frequency_" + tag + ".csv", freq_csv);

      if (method != "none") {
        const auto caps = eval::cap_error_stats(rows, pool);
        std::string cap_csv = "capacitor,rel_error,fraction\n";
        for (const auto& [v, frac] : caps.cp_errors.points()) {
          cap_csv += "cp," + fmt::num(v) + ',' + fmt::num(frac) + '\n';
        }
        for (const auto& [v, frac] : caps.cs_errors.points()) {
          cap_csv += "cs," + fmt::num(v) + ',' + fmt::num(frac) + '\n';
        }
        atomic_write(out_dir + "/cap_error_ecdf_" + tag + ".csv", cap_csv);
        g["cap_error_below_1pct"] = {{"cp", caps.cp_errors.at(0.01)},
                                     {"cs", caps.cs_errors.at(0.01)}};
      }
    }

    sweep_csv += method + ',' + fmt::num(eps) + ',' +
                 std::to_string(rows.size()) + ',' + fmt::num(s.gamma.mean) +
                 ',' + fmt::num(s.gamma.sd) + ',' + fmt::num(s.success_001) +
                 ',' + fmt::num(s.total_time) + '\n';
    summary["groups"].push_back(g);
  }
  atomic_write(out_dir + "/sweep_table.csv", sweep_csv);
  atomic_write(out_dir + "/summary.json", summary.dump(2) + "\n");

  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& pool_override,
              const std::string& model_override, const std::string& out_path,
              std::vector<double> eps_list, std::vector<std::uint64_t> seeds,
              int jobs) {
  config::RunConfig cfg = resolve_config(opts);
  const std::string pool_path =
      pool_override.empty() ? cfg.paths.pool : pool_override;
  const std::string model_path =
      model_override.empty() ? cfg.paths.model : model_override;
  if (!std::filesystem::exists(model_path)) {
    throw CLI::ValidationError("model file not found: " + model_path);
  }
  if (eps_list.empty()) eps_list = {0.0, 0.05, 0.1, 0.2, 0.3};
  if (seeds.empty()) seeds = {cfg.seed};

  const auto pool = load_pool_checked(pool_path);
  const auto test_pool = dataset::filter_split(pool, dataset::Split::test);
  const nn::LoadedModel model = nn::load_weights(model_path);
  env::EnvConfig env_cfg = cfg.env;
  env_cfg.cap_min = model.norm.cap_min;
  env_cfg.cap_max = model.norm.cap_max;
  env_cfg.f_min = model.norm.f_min;
  env_cfg.f_max = model.norm.f_max;

  const auto rows =
      eval::exploration_sweep(model.weights, env_cfg, test_pool, eps_list,
                              seeds, env_cfg.max_steps_test, jobs);

  std::string csv = "eps_test,seed,n,mean,median,sd,success_rate,total_time_s\n";
  for (const auto& r : rows) {
    csv += fmt::num(r.eps_test) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.gamma.n) + ',' + fmt::num(r.gamma.mean) + ',' +
           fmt::num(r.gamma.median) + ',' + fmt::num(r.gamma.sd) + ',' +
           fmt::num(r.success_rate) + ',' + fmt::num(r.total_time_s) + '\n';
  }
  atomic_write(out_path, csv);
  std::cout << csv;
  return 0;
}

int cmd_landscape(const CommonOpts& opts, double cp_pf, double cs_pf,
                  double f_hz, const std::string& out_path) {
  config::RunConfig cfg = resolve_config(opts);
  const circuit::Complex zl =
      circuit::load_from_optimal_caps(cp_pf * 1e-12, cs_pf * 1e-12, f_hz,
                                      cfg.env.rs);
  const auto grid = eval::landscape_grid(zl, f_hz, cfg.env.cap_min,
                                         cfg.env.cap_max, cfg.env.delta_c,
                                         cfg.env.rs);
  std::string csv = "cp_pf,cs_pf,gamma\n";
  for (std::size_t i = 0; i < grid.caps.size(); ++i) {
    for (std::size_t j = 0; j < grid.caps.size(); ++j) {
      csv += fmt::num(grid.caps[i] * 1e12) + ',' +
             fmt::num(grid.caps[j] * 1e12) + ',' + fmt::num(grid.gamma[i][j]) +
             '\n';
    }
  }
  atomic_write(out_path, csv);

  ordered_json j;
  j["load"] = {{"rl_ohm", zl.real()}, {"xl_ohm", zl.imag()}, {"f_hz", f_hz}};
  j["argmin_cp_pf"] =
      grid.caps[static_cast<std::size_t>(grid.argmin_cp)] * 1e12;
  j["argmin_cs_pf"] =
      grid.caps[static_cast<std::size_t>(grid.argmin_cs)] * 1e12;
  j["min_gamma"] = grid.min_gamma;
  j["max_adjacent_diff"] = grid.max_adjacent_diff();
  j["grid_csv"] = out_path;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L-network impedance tuning lab"};
  app.require_subcommand(1);

  CommonOpts gen_opts, train_opts, eval_opts, sweep_opts, land_opts;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data",
                                 "generate the load-frequency pool and split");
  add_common(gen, gen_opts);
  gen->add_option("--out", gen_out, "pool CSV path (default from config)");

  std::string train_pool, train_model, train_log;
  int train_episodes = 0;
  auto* train = app.add_subcommand("train", "train the tuning agent");
  add_common(train, train_opts);
  train->add_option("--pool", train_pool, "pool CSV path");
  train->add_option("--model", train_model, "output model path");
  train->add_option("--log", train_log, "output training-log CSV path");
  train->add_option("--episodes", train_episodes, "episode count override");

  std::string eval_method = "agent", eval_pool, eval_model, eval_out;
  double eval_eps = 0.0;
  int eval_jobs = 1;
  long eval_limit = 0;
  bool eval_all = false;
  auto* evalc = app.add_subcommand("eval", "run a tuner over the test split");
  add_common(evalc, eval_opts);
  evalc->add_option("--method", eval_method, "agent|ga|sapso|adam|none")
      ->check(CLI::IsMember({"agent", "ga", "sapso", "adam", "none"}));
  evalc->add_option("--eps-test", eval_eps, "test-phase exploration rate")
      ->check(CLI::Range(0.0, 1.0));
  evalc->add_option("--pool", eval_pool, "pool CSV path");
  evalc->add_option("--model", eval_model, "model path (agent method)");
  evalc->add_option("--out", eval_out, "results CSV path (appends)");
  evalc->add_option("--jobs", eval_jobs, "parallel workers")
      ->check(CLI::PositiveNumber);
  evalc->add_option("--limit", eval_limit, "evaluate only the first N samples");
  evalc->add_flag("--all-samples", eval_all,
                  "evaluate the whole pool, not just the test split");

  std::vector<std::string> report_results;
  std::string report_pool, report_out = "reports";
  auto* report = app.add_subcommand("report",
                                    "emit ECDF/stat reports from results");
  report->add_option("--results", report_results, "results CSV file(s)")
      ->required()
      ->expected(-1);
  report->add_option("--pool", report_pool,
                     "pool CSV (enables per-frequency and cap-error reports)");
  report->add_option("--out-dir", report_out, "output directory");

  std::string sweep_pool, sweep_model, sweep_out = "sweep.csv";
  std::vector<double> sweep_eps;
  std::vector<std::uint64_t> sweep_seeds;
  int sweep_jobs = 1;
  auto* sweep = app.add_subcommand(
      "sweep", "evaluate the agent across exploration rates");
  add_common(sweep, sweep_opts);
  sweep->add_option("--pool", sweep_pool, "pool CSV path");
  sweep->add_option("--model", sweep_model, "model path");
  sweep->add_option("--out", sweep_out, "sweep table CSV path");
  sweep->add_option("--eps-list", sweep_eps, "exploration rates");
  sweep->add_option("--seeds", sweep_seeds, "sweep seeds");
  sweep->add_option("--jobs", sweep_jobs, "parallel workers")
      ->check(CLI::PositiveNumber);

  double land_cp = 11.0, land_cs = 11.0, land_f = 1.0e9;
  std::string land_out = "landscape.csv";
  auto* land = app.add_subcommand(
      "landscape", "dump the |Gamma| surface for a synthesized load");
  add_common(land, land_opts);
  land->add_option("--cp", land_cp, "generating shunt capacitance [pF]");
  land->add_option("--cs", land_cs, "generating series capacitance [pF]");
  land->add_option("--f", land_f, "frequency [Hz]");
  land->add_option("--out", land_out, "grid CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_opts, gen_out);
    if (train->parsed()) {
      return cmd_train(train_opts, train_pool, train_model, train_log,
                       train_episodes);
    }
    if (evalc->parsed()) {
      return cmd_eval(eval_opts, eval_method, eval_eps, eval_pool, eval_model,
                      eval_out, eval_jobs, eval_limit, eval_all);
    }
    if (report->parsed()) {
      return cmd_report(report_results, report_pool, report_out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_opts, sweep_pool, sweep_model, sweep_out,
                       sweep_eps, sweep_seeds, sweep_jobs);
    }
    if (land->parsed()) {
      return cmd_landscape(land_opts, land_cp, land_cs, land_f, land_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
