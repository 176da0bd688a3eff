// SPDX-License-Identifier: Apache-2.0
//
// dfrc: command-line front end.
//
//   dfrc solve           one alternating optimization, per-iteration trace
//   dfrc sweep-alpha     final dB gains (mean, variance) per alpha
//   dfrc bench-n         runtime per IRS size and method
//   dfrc oracle-validate phase engines against the exhaustive grid (N <= 4)
//   dfrc gen-scenario    draw a scenario and write it as JSON
//
// Exit codes: 0 success, 2 config error, 3 solver non-convergence,
// 4 oracle-guard refusal, 1 anything else.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dfrc/driver.hpp"
#include "dfrc/scenario_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitOracleGuard = 4;

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> method;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--method", f.method, "phase engine: mm, rmo or mbnb");
  cmd->add_option("--alpha", f.alpha, "radar weight in [0, 1]");
  cmd->add_option("--seed", f.seed, "scenario seed");
  cmd->add_option("--out", f.out, "output file (default: stdout)");
  cmd->add_option("--format", f.format, "csv or json");
}

dfrc::RunConfig load_config(const CommonFlags& f) {
  dfrc::RunConfig cfg = f.config ? dfrc::parse_config(*f.config) : dfrc::RunConfig{};
  if (f.method) cfg.method = dfrc::method_from_string(*f.method);
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.seed) cfg.scenario.rng_seed = *f.seed;
  if (f.out) cfg.output.path = *f.out;
  if (f.format) cfg.output.format = dfrc::output_format_from_string(*f.format);
  cfg.validate();
  return cfg;
}

void emit(const dfrc::RunConfig& cfg, const std::string& text) {
  if (cfg.output.path) {
    std::ofstream os(*cfg.output.path);
    if (!os) throw dfrc::ConfigError(fmt::format("output.path: cannot open '{}' for writing", *cfg.output.path));
    os << text;
  } else {
    std::cout << text;
  }
}

template <typename CsvFn, typename JsonFn>
void emit_table(const dfrc::RunConfig& cfg, CsvFn csv, JsonFn to_json) {
  if (cfg.output.format == dfrc::OutputFormat::json) {
    emit(cfg, to_json().dump(2) + "\n");
  } else {
    std::ostringstream os;
    csv(os);
    emit(cfg, os.str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint precoder / IRS phase design for dual-function radar-communication"};
  app.require_subcommand(1);

  CommonFlags solve_f, sweep_f, bench_f, oracle_f, gen_f;

  auto* solve = app.add_subcommand("solve", "run one alternating optimization");
  add_common(solve, solve_f);
  std::optional<std::string> scenario_path;
  solve->add_option("--scenario", scenario_path, "scenario JSON written by gen-scenario");

  auto* sweep = app.add_subcommand("sweep-alpha", "mean/variance of final dB gains per alpha");
  add_common(sweep, sweep_f);
  std::optional<std::size_t> sweep_trials;
  std::vector<double> sweep_alphas;
  sweep->add_option("--trials", sweep_trials, "trials per alpha");
  sweep->add_option("--alphas", sweep_alphas, "alpha values")->delimiter(',');

  auto* bench = app.add_subcommand("bench-n", "runtime versus IRS size");
  add_common(bench, bench_f);
  std::optional<std::size_t> bench_trials;
  std::vector<std::size_t> bench_n;
  bench->add_option("--trials", bench_trials, "trials per (N, method)");
  bench->add_option("--n-list", bench_n, "IRS sizes, ascending")->delimiter(',');

  auto* oracle = app.add_subcommand("oracle-validate", "compare engines with the exhaustive grid");
  add_common(oracle, oracle_f);
  std::size_t instances = 20;
  std::size_t k_levels = 64;
  oracle->add_option("--instances", instances, "number of seeded instances");
  oracle->add_option("--k-levels", k_levels, "grid levels per element");

  auto* gen = app.add_subcommand("gen-scenario", "draw a scenario and write it as JSON");
  add_common(gen, gen_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) {
      const dfrc::RunConfig cfg = load_config(solve_f);
      const dfrc::Scenario s =
          scenario_path ? dfrc::load_scenario(*scenario_path) : dfrc::generate_random_scenario(cfg.scenario);
      const dfrc::ExperimentReport rep = dfrc::alternate_optimize(s, cfg);
      emit_table(
          cfg, [&](std::ostream& os) { dfrc::write_report_csv(rep, os); }, [&] { return dfrc::report_to_json(rep); });
      if (!rep.converged) {
        std::cerr << fmt::format("dfrc: outer loop did not converge within {} iterations\n", cfg.outer_max_iter);
        return kExitNoConvergence;
      }
    } else if (*sweep) {
      dfrc::RunConfig cfg = load_config(sweep_f);
      if (sweep_trials) cfg.experiment.trials = *sweep_trials;
      if (!sweep_alphas.empty()) cfg.experiment.alphas = sweep_alphas;
      cfg.validate();
      const auto rows = dfrc::sweep_alpha(cfg, cfg.experiment.alphas);
      emit_table(
          cfg, [&](std::ostream& os) { dfrc::write_sweep_csv(rows, os); }, [&] { return dfrc::sweep_to_json(rows); });
    } else if (*bench) {
      dfrc::RunConfig cfg = load_config(bench_f);
      if (bench_trials) cfg.experiment.bench_trials = *bench_trials;
      if (!bench_n.empty()) cfg.experiment.n_list = bench_n;
      if (bench_f.method) cfg.experiment.bench_methods = {cfg.method};
      cfg.validate();
      const auto rows =
          dfrc::bench_runtime(cfg, cfg.experiment.n_list, cfg.experiment.bench_methods, cfg.experiment.bench_trials);
      emit_table(
          cfg, [&](std::ostream& os) { dfrc::write_bench_csv(rows, os); }, [&] { return dfrc::bench_to_json(rows); });
    } else if (*oracle) {
      dfrc::RunConfig cfg = load_config(oracle_f);
      const auto rows = dfrc::oracle_validate(cfg, instances, k_levels);
      emit_table(
          cfg, [&](std::ostream& os) { dfrc::write_oracle_csv(rows, os); }, [&] { return dfrc::oracle_to_json(rows); });
    } else if (*gen) {
      const dfrc::RunConfig cfg = load_config(gen_f);
      emit(cfg, dfrc::scenario_to_json(dfrc::generate_random_scenario(cfg.scenario)).dump(2) + "\n");
    }
  } catch (const dfrc::ConfigError& e) {
    std::cerr << "dfrc: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dfrc::OracleGuardError& e) {
    std::cerr << "dfrc: " << e.what() << "\n";
    return kExitOracleGuard;
  } catch (const std::exception& e) {
    std::cerr << "dfrc: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
