#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ltune/agent.hpp"
#include "ltune/eval.hpp"
#include "ltune/rng.hpp"

using namespace ltune;

namespace {

std::string scratch_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ltune_eval";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

// Independent long-double reference for mean/median/population SD.
void reference_stats(std::vector<double> v, double& mean, double& median,
                     double& sd) {
  long double acc = 0.0L;
  for (double x : v) acc += x;
  mean = static_cast<double>(acc / static_cast<long double>(v.size()));
  std::sort(v.begin(), v.end());
  median = v.size() % 2 ? v[v.size() / 2]
                        : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  long double sq = 0.0L;
  for (double x : v) {
    sq += (static_cast<long double>(x) - mean) *
          (static_cast<long double>(x) - mean);
  }
  sd = static_cast<double>(
      std::sqrt(static_cast<double>(sq / static_cast<long double>(v.size()))));
}

}  // namespace

TEST_CASE("ecdf basics") {
  const eval::Ecdf e({0.1, 0.2, 0.3});
  CHECK(e.at(0.2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(e.at(0.05) == 0.0);
  CHECK(e.at(0.9) == 1.0);
  CHECK(e.at(std::numeric_limits<double>::infinity()) == 1.0);

  const auto pts = e.points();
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].first == 0.1);
  CHECK(pts.back().second == 1.0);
  double prev = 0.0;
  for (const auto& [v, frac] : pts) {
    CHECK(frac >= prev);
    prev = frac;
  }
}

TEST_CASE("ecdf with repeated values collapses steps") {
  const eval::Ecdf e({1.0, 1.0, 2.0, 2.0, 2.0});
  const auto pts = e.points();
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].second == doctest::Approx(0.4));
  CHECK(pts[1].second == 1.0);
  CHECK(e.at(1.0) == doctest::Approx(0.4));
}

TEST_CASE("summary stats basics") {
  const auto s = eval::summary_stats({1.0, 2.0, 3.0});
  CHECK(s.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s.median == 2.0);
  CHECK(s.sd == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));

  const auto c = eval::summary_stats({4.2, 4.2, 4.2, 4.2});
  CHECK(c.sd == 0.0);
  CHECK(c.median == 4.2);

  CHECK_THROWS_AS(eval::summary_stats({}), std::invalid_argument);
}

TEST_CASE("summary stats agree with the independent oracle") {
  auto rng = rng::derive(23, 600);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next_below(40);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-100.0, 100.0);
    double mean, median, sd;
    reference_stats(v, mean, median, sd);
    const auto s = eval::summary_stats(v);
    REQUIRE(s.mean == doctest::Approx(mean).epsilon(1e-12));
    REQUIRE(s.median == doctest::Approx(median).epsilon(1e-12));
    REQUIRE(s.sd == doctest::Approx(sd).epsilon(1e-12));
  }
}

TEST_CASE("per-frequency grouping") {
  dataset::GridSpec g = dataset::toy_grid();
  auto pool = dataset::generate_pool(g);

  std::vector<TuningResult> results;
  for (std::size_t i = 0; i < pool.size(); i += 37) {
    TuningResult r;
    r.sample_id = i;
    r.final_gamma = pool[i].f == 1.0e9 ? 0.25 : 0.5;
    r.steps = 10;
    results.push_back(r);
  }
  const auto stats = eval::per_frequency_stats(results, pool);
  REQUIRE(!stats.empty());
  std::size_t total = 0;
  double prev_f = 0.0;
  for (const auto& row : stats) {
    CHECK(row.f > prev_f);
    prev_f = row.f;
    CHECK(row.sd_gamma == 0.0);  // constant within each group
    CHECK(row.mean_steps == 10.0);
    total += row.n;
  }
  CHECK(total == results.size());
  CHECK(stats.front().mean_gamma == 0.25);
}

TEST_CASE("capacitance error ecdf") {
  dataset::GridSpec g = dataset::toy_grid();
  auto pool = dataset::generate_pool(g);

  TuningResult exact;
  exact.sample_id = 0;
  exact.final_cp = pool[0].cp_opt;
  exact.final_cs = pool[0].cs_opt;
  TuningResult off;
  off.sample_id = 36;  // cp_opt = 11 pF at the toy grid
  REQUIRE(pool[36].cp_opt == doctest::Approx(11e-12));
  off.final_cp = 11.5e-12;
  off.final_cs = pool[36].cs_opt;

  const auto stats = eval::cap_error_stats({exact, off}, pool);
  const auto pts = stats.cp_errors.points();
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].first == 0.0);
  CHECK(pts[1].first == doctest::Approx(0.5 / 11.0).epsilon(1e-12));
  CHECK(stats.cs_errors.at(0.0) == 1.0);
}

TEST_CASE("landscape grid finds the generating optimum") {
  const auto zl = circuit::load_from_optimal_caps(11e-12, 11e-12, 1e9);
  const auto grid =
      eval::landscape_grid(zl, 1e9, 0.5e-12, 21e-12, 0.5e-12);
  REQUIRE(grid.caps.size() == 42);
  CHECK(grid.caps[grid.argmin_cp] == doctest::Approx(11e-12));
  CHECK(grid.caps[grid.argmin_cs] == doctest::Approx(11e-12));
  CHECK(grid.min_gamma < 1e-12);
  CHECK(grid.max_adjacent_diff() > 0.0);

  SUBCASE("the 2 GHz surface is steeper") {
    const auto zl2 = circuit::load_from_optimal_caps(11e-12, 11e-12, 2e9);
    const auto grid2 =
        eval::landscape_grid(zl2, 2e9, 0.5e-12, 21e-12, 0.5e-12);
    CHECK(grid2.caps[grid2.argmin_cp] == doctest::Approx(11e-12));
    CHECK(grid2.max_adjacent_diff() > grid.max_adjacent_diff());
  }

  SUBCASE("re-evaluation is identical") {
    const auto again =
        eval::landscape_grid(zl, 1e9, 0.5e-12, 21e-12, 0.5e-12);
    CHECK(again.gamma == grid.gamma);
  }
}

TEST_CASE("results csv round trip and append") {
  std::vector<TuningResult> rows;
  TuningResult r;
  r.sample_id = 3;
  r.method = "sapso";
  r.final_gamma = 0.004;
  r.steps = 17;
  r.success = true;
  r.wall_time_s = 0.01;
  r.final_cp = 10.5e-12;
  r.final_cs = 7e-12;
  rows.push_back(r);
  r.sample_id = 9;
  r.method = "agent";
  r.eps_test = 0.1;
  rows.push_back(r);

  const std::string path = scratch_path("results.csv");
  eval::save_results(rows, path, false);
  eval::save_results(rows, path, true);  // append a second copy

  const auto loaded = eval::load_results(path);
  REQUIRE(loaded.size() == 4);
  CHECK(loaded[0].sample_id == 3);
  CHECK(loaded[0].method == "sapso");
  CHECK(loaded[1].eps_test == 0.1);
  CHECK(loaded[2].sample_id == 3);
  CHECK(loaded[3].final_cp == doctest::Approx(10.5e-12).epsilon(1e-12));

  SUBCASE("bad header is rejected") {
    const std::string bad = scratch_path("bad.csv");
    std::ofstream out(bad);
    out << "something,else\n";
    out.close();
    CHECK_THROWS_AS(eval::load_results(bad), std::runtime_error);
  }
}

TEST_CASE("exploration sweep rows follow input order and eps=0 is stable") {
  // train nothing: random weights are fine for the mechanics of the sweep
  nn::MlpSpec spec;
  spec.layer_sizes = {6, 16, 16, 8};
  const nn::Weights w = nn::init_weights(spec, 55);

  dataset::GridSpec g = dataset::toy_grid();
  auto pool = dataset::generate_pool(g);
  dataset::stratified_split(pool, g);
  auto test_pool = dataset::filter_split(pool, dataset::Split::test);
  test_pool.resize(40);

  const std::vector<double> eps_list{0.0, 0.2};
  const auto rows = eval::exploration_sweep(w, env::EnvConfig{}, test_pool,
                                            eps_list, {1, 2}, 50, 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].eps_test == 0.0);
  CHECK(rows[0].seed == 1);
  CHECK(rows[1].eps_test == 0.0);
  CHECK(rows[1].seed == 2);
  CHECK(rows[2].eps_test == 0.2);
  for (const auto& row : rows) CHECK(row.gamma.n == 40);

  // greedy rows are identical across sweep seeds
  CHECK(rows[0].gamma.mean == rows[1].gamma.mean);
  CHECK(rows[0].gamma.sd == rows[1].gamma.sd);
  CHECK(rows[0].success_rate == rows[1].success_rate);

  // and across repeat invocations regardless of the job count
  const auto again = eval::exploration_sweep(w, env::EnvConfig{}, test_pool,
                                             {0.0}, {99}, 50, 1);
  CHECK(again[0].gamma.mean == rows[0].gamma.mean);
}
