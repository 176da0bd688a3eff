// SPDX-License-Identifier: Apache-2.0
#include "dfrc/driver.hpp"

#include <fmt/format.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace dfrc {

double db_gain(double value, double reference) {
  if (value == reference) return 0.0;
  if (!(reference > 0.0)) return value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return 10.0 * std::log10(value / reference);
}

PhaseStep engine_step(const RunConfig& cfg) {
  switch (cfg.method) {
    case Method::rmo:
      return [opts = cfg.rmo](const Scenario& s, const Precoder& w, const PhaseVector& phi, double alpha) {
        return solve_rmo(s, w, phi, alpha, opts);
      };
    case Method::mbnb:
      return [opts = cfg.mbnb](const Scenario& s, const Precoder& w, const PhaseVector& phi, double alpha) {
        return static_cast<PhaseSolveResult>(solve_mbnb(s, w, phi, alpha, opts));
      };
    case Method::mm:
    default:
      return [opts = cfg.mm](const Scenario& s, const Precoder& w, const PhaseVector& phi, double alpha) {
        return solve_mm(s, w, phi, alpha, opts);
      };
  }
}

PhaseVector initial_phases(const ScenarioConfig& cfg) {
  std::mt19937_64 rng(cfg.rng_seed ^ 0x9E3779B97F4A7C15ULL);
  return PhaseVector::random(cfg.n_irs(), rng);
}

namespace {

EigOptions eig_options(const RunConfig& cfg, const Precoder* warm) {
  EigOptions e;
  e.tol = cfg.precoder.eig_tol;
  e.max_iter = cfg.precoder.eig_max_iter;
  if (warm && warm->power() > 0.0) e.start = warm->w;
  return e;
}

OuterRecord make_record(const Scenario& s, const Precoder& w, const PhaseVector& phi, double alpha,
                        std::size_t iteration) {
  OuterRecord r;
  r.iteration = iteration;
  r.gamma_r = radar_snr(s, w, phi);
  r.gamma_u = comm_snr(s, w, phi);
  r.objective = alpha * r.gamma_r + (1.0 - alpha) * r.gamma_u;
  return r;
}

}  // namespace

ExperimentReport alternate_optimize(const Scenario& s, const RunConfig& cfg, const PhaseStep& step) {
  cfg.validate();
  s.validate();
  const Stopwatch clock;
  const double alpha = cfg.alpha;

  ExperimentReport rep;
  rep.method = cfg.method;
  rep.alpha = alpha;
  rep.seed = s.config.rng_seed;

  PhaseVector phi = initial_phases(s.config);
  Precoder w = solve_precoder_eigen(make_precoder_problem(s, phi, alpha, false), eig_options(cfg, nullptr)).precoder;

  OuterRecord r0 = make_record(s, w, phi, alpha, 0);
  r0.wall_ns = clock.elapsed_ns();
  if (cfg.beampattern_mode) {
    const ComplexMatrix r_d = desired_covariance(s, s.config.desired_angles);
    r0.bp_violation = std::max(0.0, beampattern_deviation(w, r_d) - s.config.beampattern_threshold);
  }
  rep.records.push_back(r0);
  const double r_ref = r0.gamma_r;
  const double u_ref = r0.gamma_u;

  double f = r0.objective;
  for (std::size_t it = 1; it <= cfg.outer_max_iter; ++it) {
    PhaseSolveResult ps = step(s, w, phi, alpha);
    rep.flagged_entries += ps.trace.flagged_entries;
    rep.inner_converged = rep.inner_converged && ps.converged;
    phi = ps.phi;

    double bp_violation = 0.0;
    const PrecoderProblem prob = make_precoder_problem(s, phi, alpha, cfg.beampattern_mode);
    if (cfg.beampattern_mode) {
      const PenaltyResult pr = solve_precoder_penalty(prob, w, cfg.precoder.penalty);
      w = pr.precoder;
      bp_violation = pr.violation;
      rep.precoder_feasible = pr.feasible;
    } else {
      const PrecoderResult pr = solve_precoder_eigen(prob, eig_options(cfg, &w));
      // The eigen solution is the global maximizer; keep the old w only when
      // the power iteration fell short of it numerically.
      if (pr.objective >= quadratic_form(prob.g_matrix, w.w)) w = pr.precoder;
    }

    OuterRecord rec = make_record(s, w, phi, alpha, it);
    rec.gamma_r_db_gain = db_gain(rec.gamma_r, r_ref);
    rec.gamma_u_db_gain = db_gain(rec.gamma_u, u_ref);
    rec.inner_iterations = ps.trace.iterations();
    rec.inner_converged = ps.converged;
    rec.bp_violation = bp_violation;
    rec.wall_ns = clock.elapsed_ns();
    rep.records.push_back(rec);
    rep.inner_traces.push_back(std::move(ps.trace));

    const double rel = std::abs(rec.objective - f) / std::max(std::abs(f), 1e-300);
    f = rec.objective;
    if (rel < cfg.outer_tol) {
      rep.converged = true;
      break;
    }
  }
  rep.w = std::move(w);
  rep.phi = std::move(phi);
  rep.wall_ns = clock.elapsed_ns();
  return rep;
}

ExperimentReport alternate_optimize(const Scenario& s, const RunConfig& cfg) {
  return alternate_optimize(s, cfg, engine_step(cfg));
}

ExperimentReport alternate_optimize(const RunConfig& cfg) {
  cfg.validate();
  return alternate_optimize(generate_random_scenario(cfg.scenario), cfg);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

std::uint64_t sweep_seed(std::uint64_t base, std::size_t alpha_index, std::size_t trial) {
  return base + 1000003ULL * alpha_index + trial;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

MeanVar mean_var(const std::vector<double>& v) {
  MeanVar out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double x : v) out.var += (x - out.mean) * (x - out.mean);
  out.var /= static_cast<double>(v.size());
  return out;
}

}  // namespace

std::vector<SweepRow> sweep_alpha(const RunConfig& cfg, const std::vector<double>& alphas) {
  if (alphas.empty()) throw ConfigError("sweep_alpha: alpha list must not be empty");
  cfg.validate();
  const std::size_t trials = cfg.experiment.trials;
  const std::size_t jobs = alphas.size() * trials;
  // Each slot is written by exactly one job, so the result is independent of
  // scheduling order.
  std::vector<ExperimentReport> reports(jobs);
  parallel_for(jobs, cfg.experiment.threads, [&](std::size_t job) {
    const std::size_t ai = job / trials;
    const std::size_t t = job % trials;
    RunConfig run = cfg;
    run.alpha = alphas[ai];
    const std::size_t seed_index = cfg.experiment.seed_mode == SeedMode::shared ? 0 : ai;
    run.scenario.rng_seed = sweep_seed(cfg.scenario.rng_seed, seed_index, t);
    reports[job] = alternate_optimize(run);
  });

  std::vector<SweepRow> rows;
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    std::vector<double> rg, cg, obj;
    std::size_t converged = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const ExperimentReport& r = reports[ai * trials + t];
      rg.push_back(r.records.back().gamma_r_db_gain);
      cg.push_back(r.records.back().gamma_u_db_gain);
      obj.push_back(r.final_objective());
      converged += r.converged ? 1 : 0;
    }
    SweepRow row;
    row.alpha = alphas[ai];
    row.trials = trials;
    const MeanVar r = mean_var(rg), c = mean_var(cg), o = mean_var(obj);
    row.radar_gain_mean = r.mean;
    row.radar_gain_var = r.var;
    row.comm_gain_mean = c.mean;
    row.comm_gain_var = c.var;
    row.objective_mean = o.mean;
    row.converged_fraction = static_cast<double>(converged) / static_cast<double>(trials);
    rows.push_back(row);
  }
  return rows;
}

std::vector<BenchRow> bench_runtime(const RunConfig& cfg, const std::vector<std::size_t>& n_list,
                                    const std::vector<Method>& methods, std::size_t trials) {
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw ConfigError("bench_runtime: n_list must be sorted ascending");
  if (trials < 1) throw ConfigError("bench_runtime: trials must be >= 1");
  std::vector<BenchRow> rows;
  for (std::size_t n : n_list) {
    for (Method m : methods) {
      BenchRow row;
      row.n_irs = n;
      row.method = m;
      row.trials = trials;
      std::size_t converged = 0;
      for (std::size_t t = 0; t < trials; ++t) {
        RunConfig run = cfg;
        run.method = m;
        std::tie(run.scenario.irs_rows, run.scenario.irs_cols) = factor_grid(n);
        run.scenario.rng_seed = cfg.scenario.rng_seed + t;
        const Scenario s = generate_random_scenario(run.scenario);
        const ExperimentReport r = alternate_optimize(s, run);
        row.mean_seconds += 1e-9 * static_cast<double>(r.wall_ns);
        row.mean_outer_iterations += static_cast<double>(r.records.size() - 1);
        converged += r.converged ? 1 : 0;
      }
      row.mean_seconds /= static_cast<double>(trials);
      row.mean_outer_iterations /= static_cast<double>(trials);
      row.converged_fraction = static_cast<double>(converged) / static_cast<double>(trials);
      rows.push_back(row);
    }
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("loglog_slope: need at least two matching points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ContractError("loglog_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ContractError("loglog_slope: x values must not all be equal");
  return sxy / sxx;
}

std::vector<OracleRow> oracle_validate(const RunConfig& cfg, std::size_t instances, std::size_t k_levels) {
  cfg.validate();
  if (cfg.scenario.n_irs() > kOracleMaxElements)
    throw OracleGuardError(
        fmt::format("oracle-validate refused: N = {} exceeds {} elements", cfg.scenario.n_irs(), kOracleMaxElements));
  std::vector<OracleRow> rows(instances);
  parallel_for(instances, cfg.experiment.threads, [&](std::size_t i) {
    ScenarioConfig sc = cfg.scenario;
    sc.rng_seed = cfg.scenario.rng_seed + i;
    const Scenario s = generate_random_scenario(sc);
    const PhaseVector phi0 = initial_phases(sc);
    const Precoder w =
        solve_precoder_eigen(make_precoder_problem(s, phi0, cfg.alpha, false), eig_options(cfg, nullptr)).precoder;
    const GridResult g = grid_search_objective(s, w, cfg.alpha, k_levels);
    OracleRow row;
    row.seed = sc.rng_seed;
    row.grid_value = g.value;
    row.grid_slack = g.slack;
    row.mm = solve_mm(s, w, phi0, cfg.alpha, cfg.mm).trace.final_objective();
    row.rmo = solve_rmo(s, w, phi0, cfg.alpha, cfg.rmo).trace.final_objective();
    row.mbnb = solve_mbnb(s, w, phi0, cfg.alpha, cfg.mbnb).trace.final_objective();
    rows[i] = row;
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

void write_report_csv(const ExperimentReport& r, std::ostream& os) {
  os << "iteration,objective,gamma_r_db_gain,gamma_u_db_gain,wall_ns\n";
  for (const auto& rec : r.records)
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{}\n", rec.iteration, rec.objective, rec.gamma_r_db_gain,
                      rec.gamma_u_db_gain, rec.wall_ns);
}

json report_to_json(const ExperimentReport& r) {
  json records = json::array();
  for (const auto& rec : r.records)
    records.push_back({{"iteration", rec.iteration},
                       {"objective", rec.objective},
                       {"gamma_r", rec.gamma_r},
                       {"gamma_u", rec.gamma_u},
                       {"gamma_r_db_gain", rec.gamma_r_db_gain},
                       {"gamma_u_db_gain", rec.gamma_u_db_gain},
                       {"wall_ns", rec.wall_ns},
                       {"inner_iterations", rec.inner_iterations},
                       {"inner_converged", rec.inner_converged},
                       {"bp_violation", rec.bp_violation}});
  return json{{"method", to_string(r.method)},
              {"alpha", r.alpha},
              {"seed", r.seed},
              {"converged", r.converged},
              {"inner_converged", r.inner_converged},
              {"flagged_entries", r.flagged_entries},
              {"precoder_feasible", r.precoder_feasible},
              {"wall_ns", r.wall_ns},
              {"records", std::move(records)},
              {"w", vector_to_json(r.w.w)},
              {"phi", r.phi.angles()}};
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "alpha,trials,radar_gain_mean,radar_gain_var,comm_gain_mean,comm_gain_var,objective_mean,converged_fraction\n";
  for (const auto& r : rows)
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.alpha, r.trials, r.radar_gain_mean,
                      r.radar_gain_var, r.comm_gain_mean, r.comm_gain_var, r.objective_mean, r.converged_fraction);
}

json sweep_to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"alpha", r.alpha},
                   {"trials", r.trials},
                   {"radar_gain_mean", r.radar_gain_mean},
                   {"radar_gain_var", r.radar_gain_var},
                   {"comm_gain_mean", r.comm_gain_mean},
                   {"comm_gain_var", r.comm_gain_var},
                   {"objective_mean", r.objective_mean},
                   {"converged_fraction", r.converged_fraction}});
  return arr;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
  os << "n_irs,method,trials,mean_seconds,mean_outer_iterations,converged_fraction\n";
  for (const auto& r : rows)
    os << fmt::format("{},{},{},{:.9g},{},{}\n", r.n_irs, to_string(r.method), r.trials, r.mean_seconds,
                      r.mean_outer_iterations, r.converged_fraction);
}

json bench_to_json(const std::vector<BenchRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"n_irs", r.n_irs},
                   {"method", to_string(r.method)},
                   {"trials", r.trials},
                   {"mean_seconds", r.mean_seconds},
                   {"mean_outer_iterations", r.mean_outer_iterations},
                   {"converged_fraction", r.converged_fraction}});
  return arr;
}

void write_oracle_csv(const std::vector<OracleRow>& rows, std::ostream& os) {
  os << "seed,grid_value,grid_slack,mm,rmo,mbnb\n";
  for (const auto& r : rows)
    os << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.seed, r.grid_value, r.grid_slack, r.mm, r.rmo,
                      r.mbnb);
}

json oracle_to_json(const std::vector<OracleRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"seed", r.seed},
                   {"grid_value", r.grid_value},
                   {"grid_slack", r.grid_slack},
                   {"mm", r.mm},
                   {"rmo", r.rmo},
                   {"mbnb", r.mbnb}});
  return arr;
}

json bnb_report_to_json(const BnbReport& r) {
  return json{{"incumbent", r.incumbent.angles()},
              {"incumbent_value", r.incumbent_value},
              {"global_upper_bound", r.global_upper_bound},
              {"gap", r.gap},
              {"epsilon", r.epsilon},
              {"nodes_expanded", r.nodes_expanded},
              {"nodes_pruned", r.nodes_pruned},
              {"hit_node_limit", r.hit_node_limit},
              {"wall_ns", r.wall_ns}};
}

}  // namespace dfrc
