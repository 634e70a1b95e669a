#include "ltune/dataset.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ltune/format.hpp"
#include "ltune/rng.hpp"

namespace ltune::dataset {

namespace {

int grid_count(double lo, double hi, double step, const char* what) {
  if (step <= 0.0 || hi < lo) {
    throw std::invalid_argument(std::string("grid: bad ") + what + " range");
  }
  const double ratio = (hi - lo) / step;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    throw std::invalid_argument(std::string("grid: ") + what +
                                " step does not divide the range");
  }
  return static_cast<int>(rounded) + 1;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

constexpr char kHeader[] = "f_hz,rl_ohm,xl_ohm,cp_opt_pf,cs_opt_pf,split";

}  // namespace

int GridSpec::cap_count() const {
  return grid_count(cap_min, cap_max, cap_step, "capacitance");
}

int GridSpec::f_count() const { return grid_count(f_min, f_max, f_step, "frequency"); }

void GridSpec::validate() const {
  cap_count();
  f_count();
  if (cap_min <= 0.0) throw std::invalid_argument("grid: cap_min must be > 0");
  if (f_min <= 0.0) throw std::invalid_argument("grid: f_min must be > 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("grid: train_fraction must be in (0,1)");
  }
}

GridSpec toy_grid(std::uint64_t seed) {
  GridSpec g;
  g.cap_min = 5.0e-12;
  g.cap_max = 17.0e-12;
  g.cap_step = 1.5e-12;
  g.f_min = 1.0e9;
  g.f_max = 2.0e9;
  g.f_step = 0.1e9;
  g.seed = seed;
  return g;
}

std::vector<LoadSample> generate_pool(const GridSpec& grid, double rs) {
  grid.validate();
  const int nc = grid.cap_count();
  const int nf = grid.f_count();

  std::vector<LoadSample> pool;
  pool.reserve(static_cast<std::size_t>(nc) * nc * nf);
  for (int fi = 0; fi < nf; ++fi) {
    const double f = grid.f_min + fi * grid.f_step;
    for (int pi = 0; pi < nc; ++pi) {
      const double cp = grid.cap_min + pi * grid.cap_step;
      for (int si = 0; si < nc; ++si) {
        const double cs = grid.cap_min + si * grid.cap_step;
        LoadSample s;
        s.f = f;
        s.zl = circuit::load_from_optimal_caps(cp, cs, f, rs);
        s.cp_opt = cp;
        s.cs_opt = cs;
        pool.push_back(s);
      }
    }
  }
  return pool;
}

void stratified_split(std::vector<LoadSample>& pool, const GridSpec& grid) {
  grid.validate();
  const int nf = grid.f_count();
  for (int fi = 0; fi < nf; ++fi) {
    const double f = grid.f_min + fi * grid.f_step;
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].f == f) group.push_back(i);
    }
    if (group.empty()) {
      throw std::runtime_error("split: empty frequency group at " +
                               fmt::num(f) + " Hz");
    }
    auto stream = rng::derive(grid.seed, rng::kDatasetSplit,
                              static_cast<std::uint64_t>(fi));
    stream.shuffle(group);
    const int n_train =
        round_half_up(grid.train_fraction * static_cast<double>(group.size()));
    for (std::size_t k = 0; k < group.size(); ++k) {
      pool[group[k]].split =
          (static_cast<int>(k) < n_train) ? Split::train : Split::test;
    }
  }
}

void save_pool(const std::vector<LoadSample>& pool, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("save_pool: cannot open " + tmp);
    out << kHeader << "\n";
    for (const auto& s : pool) {
      out << fmt::num(s.f) << ',' << fmt::num(s.zl.real()) << ','
          << fmt::num(s.zl.imag()) << ',' << fmt::num(s.cp_opt * 1e12) << ','
          << fmt::num(s.cs_opt * 1e12) << ','
          << (s.split == Split::train ? "train" : "test") << "\n";
    }
    if (!out) throw std::runtime_error("save_pool: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("save_pool: rename to " + path + " failed");
  }
}

std::vector<LoadSample> load_pool(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_pool: cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("load_pool: bad or missing header in " + path);
  }

  std::vector<LoadSample> pool;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::array<std::string, 6> field;
    std::size_t start = 0;
    for (int i = 0; i < 6; ++i) {
      const std::size_t comma = line.find(',', start);
      if (i < 5 && comma == std::string::npos) {
        throw std::runtime_error("load_pool: row " + std::to_string(row) +
                                 " has too few fields");
      }
      field[i] = line.substr(start, comma - start);
      start = comma + 1;
    }
    LoadSample s;
    try {
      s.f = std::stod(field[0]);
      s.zl = {std::stod(field[1]), std::stod(field[2])};
      s.cp_opt = std::stod(field[3]) * 1e-12;
      s.cs_opt = std::stod(field[4]) * 1e-12;
    } catch (const std::exception&) {
      throw std::runtime_error("load_pool: row " + std::to_string(row) +
                               " is not numeric");
    }
    if (field[5] == "train") {
      s.split = Split::train;
    } else if (field[5] == "test") {
      s.split = Split::test;
    } else {
      throw std::runtime_error("load_pool: row " + std::to_string(row) +
                               " has unknown split tag '" + field[5] + "'");
    }
    if (!(s.f > 0.0) || !(s.zl.real() > 0.0) || !std::isfinite(s.zl.imag()) ||
        !(s.cp_opt > 0.0) || !(s.cs_opt > 0.0)) {
      throw std::runtime_error("load_pool: row " + std::to_string(row) +
                               " violates basic sample invariants");
    }
    const auto solutions = circuit::closed_form_caps(s.zl, s.f);
    bool contained = false;
    for (const auto& p : solutions) {
      if (std::abs(p.cp - s.cp_opt) <= 1e-9 * s.cp_opt &&
          std::abs(p.cs - s.cs_opt) <= 1e-9 * s.cs_opt) {
        contained = true;
        break;
      }
    }
    if (!contained) {
      throw std::runtime_error(
          "load_pool: row " + std::to_string(row) +
          " fails the closed-form containment check");
    }
    pool.push_back(s);
  }
  return pool;
}

std::vector<LoadSample> filter_split(const std::vector<LoadSample>& pool,
                                     Split which) {
  std::vector<LoadSample> out;
  for (const auto& s : pool) {
    if (s.split == which) out.push_back(s);
  }
  return out;
}

std::vector<std::size_t> split_indices(const std::vector<LoadSample>& pool,
                                       Split which) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].split == which) out.push_back(i);
  }
  return out;
}

}  // namespace ltune::dataset
