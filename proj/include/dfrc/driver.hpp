// SPDX-License-Identifier: Apache-2.0
//
// Alternating optimization of (w, phi) and the experiment harness built on it.
#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/oracle.hpp"
#include "dfrc/trace.hpp"

namespace dfrc {

struct OuterRecord {
  std::size_t iteration = 0;  // 0 is the initial (random phi, eigen w) point
  double objective = 0.0;
  double gamma_r = 0.0;
  double gamma_u = 0.0;
  double gamma_r_db_gain = 0.0;
  double gamma_u_db_gain = 0.0;
  std::int64_t wall_ns = 0;
  std::size_t inner_iterations = 0;
  bool inner_converged = true;
  /// Beampattern constraint violation of the precoder (0 when the mode is off).
  double bp_violation = 0.0;
};

struct ExperimentReport {
  Method method = Method::mm;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<OuterRecord> records;
  std::vector<SolverTrace> inner_traces;  // one per outer iteration
  Precoder w;
  PhaseVector phi;
  bool converged = false;
  bool inner_converged = true;  // every inner solve converged
  std::size_t flagged_entries = 0;
  bool precoder_feasible = true;
  std::int64_t wall_ns = 0;

  double final_objective() const { return records.back().objective; }
};

/// 10 log10(value / reference); exactly 0 when value == reference.
double db_gain(double value, double reference);

/// One phi-subproblem solve with w fixed.
using PhaseStep =
    std::function<PhaseSolveResult(const Scenario&, const Precoder&, const PhaseVector&, double alpha)>;

/// The engine selected by cfg.method with its configured options.
PhaseStep engine_step(const RunConfig& cfg);

/// Starting phases: uniform on the circle product, seeded from the scenario seed.
PhaseVector initial_phases(const ScenarioConfig& cfg);

/// Alternates the phi-engine and the precoder solve until the relative change
/// of the objective drops below cfg.outer_tol or cfg.outer_max_iter is hit.
ExperimentReport alternate_optimize(const Scenario& s, const RunConfig& cfg, const PhaseStep& step);
ExperimentReport alternate_optimize(const Scenario& s, const RunConfig& cfg);
/// Draws the scenario from cfg.scenario (seeded) first.
ExperimentReport alternate_optimize(const RunConfig& cfg);

struct SweepRow {
  double alpha = 0.0;
  std::size_t trials = 0;
  double radar_gain_mean = 0.0;
  double radar_gain_var = 0.0;
  double comm_gain_mean = 0.0;
  double comm_gain_var = 0.0;
  double objective_mean = 0.0;
  double converged_fraction = 0.0;
};

/// Seed used for trial `t` of the `alpha_index`-th sweep point (index 0 in
/// shared seed mode). Trial 0 of the first point uses the configured seed.
std::uint64_t sweep_seed(std::uint64_t base, std::size_t alpha_index, std::size_t trial);

/// Per alpha, runs cfg.experiment.trials independent alternations (a fresh
/// channel draw per trial, see SeedMode) and reports mean and population variance of the final dB
/// gains. Trials run on cfg.experiment.threads workers.
std::vector<SweepRow> sweep_alpha(const RunConfig& cfg, const std::vector<double>& alphas);

struct BenchRow {
  std::size_t n_irs = 0;
  Method method = Method::mm;
  std::size_t trials = 0;
  double mean_seconds = 0.0;
  double mean_outer_iterations = 0.0;
  double converged_fraction = 0.0;
};

/// Wall-clock time of a full alternation per IRS size and method, averaged
/// over trials. Runs sequentially so timings do not compete for cores.
std::vector<BenchRow> bench_runtime(const RunConfig& cfg, const std::vector<std::size_t>& n_list,
                                    const std::vector<Method>& methods, std::size_t trials);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct OracleRow {
  std::uint64_t seed = 0;
  double grid_value = 0.0;
  double grid_slack = 0.0;
  double mm = 0.0;
  double rmo = 0.0;
  double mbnb = 0.0;
};

/// Phase engines against the exhaustive grid with w fixed at the eigen
/// precoder of the random start. N > 4 throws OracleGuardError.
std::vector<OracleRow> oracle_validate(const RunConfig& cfg, std::size_t instances, std::size_t k_levels);

/// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

// Emission ------------------------------------------------------------------

/// Columns: iteration,objective,gamma_r_db_gain,gamma_u_db_gain,wall_ns
void write_report_csv(const ExperimentReport& r, std::ostream& os);
json report_to_json(const ExperimentReport& r);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);
json sweep_to_json(const std::vector<SweepRow>& rows);
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os);
json bench_to_json(const std::vector<BenchRow>& rows);
void write_oracle_csv(const std::vector<OracleRow>& rows, std::ostream& os);
json oracle_to_json(const std::vector<OracleRow>& rows);
json bnb_report_to_json(const BnbReport& r);

}  // namespace dfrc
