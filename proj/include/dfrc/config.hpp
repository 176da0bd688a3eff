// SPDX-License-Identifier: Apache-2.0
//
// Run configuration. JSON layout (every field optional):
//
//   {
//     "scenario": { <ScenarioConfig> },
//     "method": "mm" | "rmo" | "mbnb",
//     "alpha": 0.5, "outer_tol": 1e-5, "outer_max_iter": 100,
//     "beampattern_mode": false,
//     "mm":   { "tol", "max_iter", "shift": "gershgorin" | "power" },
//     "rmo":  { "armijo_initial_step", "armijo_shrink", "armijo_slope",
//               "grad_tol", "max_iter", "objective_tol" },
//     "mbnb": { "tol", "max_iter", "relative_epsilon", "max_nodes" },
//     "precoder": { "eig_tol", "eig_max_iter", "rho_schedule",
//                   "max_inner_iter", "penalty_tol" },
//     "experiment": { "trials", "alphas", "n_list", "bench_methods",
//                     "bench_trials", "seed_mode": "shared" | "per_alpha",
//                     "threads" },
//     "output": { "path", "format": "csv" | "json" }
//   }
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/bnb_solver.hpp"
#include "dfrc/mm_solver.hpp"
#include "dfrc/precoder.hpp"
#include "dfrc/rmo_solver.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/scenario_io.hpp"

namespace dfrc {

enum class Method { mm, rmo, mbnb };

std::string to_string(Method m);
/// Throws ConfigError for anything other than mm, rmo or mbnb.
Method method_from_string(const std::string& s);

enum class OutputFormat { csv, json };

/// How sweep_alpha assigns channel seeds. `shared`: trial t uses the same
/// seed at every alpha (common random numbers). `per_alpha`: every
/// (alpha, trial) pair draws its own seed.
enum class SeedMode { shared, per_alpha };

std::string to_string(SeedMode m);
SeedMode seed_mode_from_string(const std::string& s);

std::string to_string(OutputFormat f);
OutputFormat output_format_from_string(const std::string& s);

struct PrecoderSettings {
  double eig_tol = 1e-12;
  std::size_t eig_max_iter = 100000;
  PenaltyOptions penalty;
};

struct ExperimentSettings {
  std::size_t trials = 50;
  std::vector<double> alphas{0.99, 0.9, 0.5, 0.1, 0.01};
  std::vector<std::size_t> n_list{16, 36, 64, 100};
  std::vector<Method> bench_methods{Method::mm, Method::rmo};
  std::size_t bench_trials = 5;
  SeedMode seed_mode = SeedMode::shared;
  /// Worker threads for trials; 0 uses the hardware concurrency.
  std::size_t threads = 0;
};

struct OutputSettings {
  std::optional<std::string> path;
  OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
  ScenarioConfig scenario;
  Method method = Method::mm;
  double alpha = 0.5;
  double outer_tol = 1e-5;
  std::size_t outer_max_iter = 100;
  bool beampattern_mode = false;
  MmOptions mm;
  RmoParams rmo;
  MbnbOptions mbnb;
  PrecoderSettings precoder;
  ExperimentSettings experiment;
  OutputSettings output;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

json run_config_to_json(const RunConfig& cfg);
/// Applies defaults for absent fields, rejects unknown keys, validates.
RunConfig run_config_from_json(const json& j);
/// Reads and parses a config file. Syntax errors carry line/column context.
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace dfrc
