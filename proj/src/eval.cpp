#include "ltune/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "ltune/agent.hpp"
#include "ltune/format.hpp"

namespace ltune::eval {

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::at(double t) const {
  if (sorted_.empty()) throw std::logic_error("ecdf: empty sample");
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, double>> Ecdf::points() const {
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
    out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

SummaryStats summary_stats(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("stats: empty sample");
  SummaryStats s;
  s.n = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = (s.n % 2 == 1) ? sorted[mid]
                            : 0.5 * (sorted[mid - 1] + sorted[mid]);

  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(sq / static_cast<double>(s.n));
  return s;
}

std::vector<FrequencyStats> per_frequency_stats(
    const std::vector<TuningResult>& results,
    const std::vector<dataset::LoadSample>& pool) {
  std::map<double, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : results) {
    if (r.sample_id >= pool.size()) {
      throw std::out_of_range("stats: result references a missing sample");
    }
    auto& g = groups[pool[r.sample_id].f];
    g.first.push_back(r.final_gamma);
    g.second.push_back(static_cast<double>(r.steps));
  }
  std::vector<FrequencyStats> out;
  for (const auto& [f, g] : groups) {
    const SummaryStats gs = summary_stats(g.first);
    const SummaryStats ss = summary_stats(g.second);
    FrequencyStats row;
    row.f = f;
    row.mean_gamma = gs.mean;
    row.sd_gamma = gs.sd;
    row.mean_steps = ss.mean;
    row.sd_steps = ss.sd;
    row.n = gs.n;
    out.push_back(row);
  }
  return out;
}

CapErrorStats cap_error_stats(const std::vector<TuningResult>& results,
                              const std::vector<dataset::LoadSample>& pool) {
  std::vector<double> cp_err, cs_err;
  cp_err.reserve(results.size());
  cs_err.reserve(results.size());
  for (const auto& r : results) {
    if (r.sample_id >= pool.size()) {
      throw std::out_of_range("stats: result references a missing sample");
    }
    const auto& s = pool[r.sample_id];
    if (s.cp_opt == 0.0 || s.cs_opt == 0.0) {
      throw std::domain_error("stats: relative error undefined for zero "
                              "optimal capacitance");
    }
    cp_err.push_back(std::abs(r.final_cp - s.cp_opt) / s.cp_opt);
    cs_err.push_back(std::abs(r.final_cs - s.cs_opt) / s.cs_opt);
  }
  return {Ecdf(std::move(cp_err)), Ecdf(std::move(cs_err))};
}

double LandscapeGrid::max_adjacent_diff() const {
  double best = 0.0;
  const std::size_t n = caps.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i + 1 < n) {
        best = std::max(best, std::abs(gamma[i + 1][j] - gamma[i][j]));
      }
      if (j + 1 < n) {
        best = std::max(best, std::abs(gamma[i][j + 1] - gamma[i][j]));
      }
    }
  }
  return best;
}

LandscapeGrid landscape_grid(circuit::Complex zl, double f, double cap_min,
                             double cap_max, double cap_step, double rs) {
  LandscapeGrid grid;
  const int n =
      static_cast<int>(std::round((cap_max - cap_min) / cap_step)) + 1;
  grid.caps.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid.caps[static_cast<std::size_t>(i)] = cap_min + i * cap_step;

  grid.gamma.assign(static_cast<std::size_t>(n),
                    std::vector<double>(static_cast<std::size_t>(n), 0.0));
  grid.min_gamma = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double g = circuit::gamma_magnitude(
          {grid.caps[static_cast<std::size_t>(i)],
           grid.caps[static_cast<std::size_t>(j)], f, rs},
          zl);
      grid.gamma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g;
      if (g < grid.min_gamma) {
        grid.min_gamma = g;
        grid.argmin_cp = i;
        grid.argmin_cs = j;
      }
    }
  }
  return grid;
}

namespace {

// Deterministic fan-out: results land in slots indexed by position, so the
// output is independent of the job count.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> threads;
  const int n_threads = std::min<int>(jobs, static_cast<int>(count));
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

}  // namespace

std::vector<SweepRow> exploration_sweep(
    const nn::Weights& weights, const env::EnvConfig& env_cfg,
    const std::vector<dataset::LoadSample>& pool_test,
    const std::vector<double>& eps_list,
    const std::vector<std::uint64_t>& seeds, int max_steps, int jobs) {
  if (pool_test.empty()) throw std::invalid_argument("sweep: empty pool");
  std::vector<SweepRow> rows;
  for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
    for (std::uint64_t seed : seeds) {
      std::vector<double> gammas(pool_test.size());
      std::vector<double> times(pool_test.size());
      std::vector<char> ok(pool_test.size());
      parallel_for(pool_test.size(), jobs, [&](std::size_t i) {
        auto stream = rng::Stream(
            rng::mix_seed(seed, rng::kSweep + ei, static_cast<std::uint64_t>(i)));
        const auto outcome = agent::tune(pool_test[i], weights, env_cfg,
                                         eps_list[ei], max_steps, stream);
        gammas[i] = outcome.result.final_gamma;
        times[i] = outcome.result.wall_time_s;
        ok[i] = outcome.result.success ? 1 : 0;
      });
      SweepRow row;
      row.eps_test = eps_list[ei];
      row.seed = seed;
      row.gamma = summary_stats(gammas);
      std::size_t n_ok = 0;
      double total = 0.0;
      for (std::size_t i = 0; i < pool_test.size(); ++i) {
        n_ok += ok[i];
        total += times[i];
      }
      row.success_rate = static_cast<double>(n_ok) /
                         static_cast<double>(pool_test.size());
      row.total_time_s = total;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {
constexpr char kResultsHeader[] =
    "sample_id,method,eps_test,final_gamma,steps,success,wall_time_s,"
    "final_cp_pf,final_cs_pf";
}

void save_results(const std::vector<TuningResult>& results,
                  const std::string& path, bool append) {
  bool write_header = true;
  if (append) {
    std::ifstream probe(path);
    if (probe) {
      std::string first;
      std::getline(probe, first);
      if (!first.empty() && first != kResultsHeader) {
        throw std::runtime_error("results: existing file " + path +
                                 " has a different header");
      }
      write_header = first.empty();
    }
  }
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("results: cannot open " + path);
  if (write_header) out << kResultsHeader << "\n";
  for (const auto& r : results) {
    out << r.sample_id << ',' << r.method << ',' << fmt::num(r.eps_test) << ','
        << fmt::num(r.final_gamma) << ',' << r.steps << ','
        << (r.success ? 1 : 0) << ',' << fmt::num(r.wall_time_s) << ','
        << fmt::num(r.final_cp * 1e12) << ',' << fmt::num(r.final_cs * 1e12)
        << "\n";
  }
  if (!out) throw std::runtime_error("results: write failed for " + path);
}

std::vector<TuningResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("results: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw std::runtime_error("results: bad header in " + path);
  }
  std::vector<TuningResult> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 9) {
      throw std::runtime_error("results: row " + std::to_string(row) +
                               " has " + std::to_string(f.size()) +
                               " fields, expected 9");
    }
    TuningResult r;
    try {
      r.sample_id = std::stoul(f[0]);
      r.method = f[1];
      r.eps_test = std::stod(f[2]);
      r.final_gamma = std::stod(f[3]);
      r.steps = std::stoi(f[4]);
      r.success = std::stoi(f[5]) != 0;
      r.wall_time_s = std::stod(f[6]);
      r.final_cp = std::stod(f[7]) * 1e-12;
      r.final_cs = std::stod(f[8]) * 1e-12;
    } catch (const std::exception&) {
      throw std::runtime_error("results: row " + std::to_string(row) +
                               " is malformed");
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace ltune::eval
