#pragma once

// Run configuration shared by the CLI commands. Defaults reproduce the
// reference experimental setup; a JSON config file and command-line flags
// can override any field (flags win).

#include <cstdint>
#include <string>

#include "ltune/agent.hpp"
#include "ltune/baselines.hpp"
#include "ltune/dataset.hpp"
#include "ltune/env.hpp"
#include "ltune/nn.hpp"

namespace ltune::config {

struct Paths {
  std::string pool = "pool.csv";
  std::string model = "model.bin";
  std::string results = "results.csv";
  std::string reports = "reports";
};

struct RunConfig {
  std::uint64_t seed = 1;
  dataset::GridSpec grid;
  env::EnvConfig env;
  agent::TrainConfig train;
  nn::MlpSpec net;
  baselines::BaselineConfig baselines;
  Paths paths;

  void validate() const;

  // Copies the global seed into the sub-configs that own RNG streams.
  void propagate_seed() {
    grid.seed = seed;
    train.seed = seed;
    baselines.seed = seed;
  }
};

RunConfig defaults();

// Applies the CI-sized preset: reduced optima grid, fewer frequencies.
void apply_toy_preset(RunConfig& cfg);

// Parses a JSON config file over the given base config. Unknown keys are
// an error; missing keys keep their base values.
RunConfig load_file(const std::string& path, RunConfig base = defaults());

// JSON snapshot of a config (used by manifests).
std::string to_json(const RunConfig& cfg);

}  // namespace ltune::config
