// SPDX-License-Identifier: Apache-2.0
//
// Precoder subproblem: maximize w^H G w on the power sphere ||w||^2 = P_R,
// optionally subject to ||w w^H - R_D||_F^2 <= gamma_BP.
#pragma once

#include <optional>
#include <vector>

#include "dfrc/numerics.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

struct PrecoderProblem {
  ComplexMatrix g_matrix;
  double power_budget = 1.0;
  std::optional<ComplexMatrix> r_d;
  std::optional<double> bp_threshold;

  void validate() const;
};

/// G = (alpha / sigma_R^2) C_T^H C_T + ((1 - alpha) / sigma_U^2) conj(c_U) c_U^T, so
/// that w^H G w is the design objective for any w.
ComplexMatrix objective_matrix(const Scenario& s, const PhaseVector& phi, double alpha);

/// Builds the subproblem at phi; the beampattern constraint is attached when
/// `with_beampattern` is set (R_D from the scenario's desired angles).
PrecoderProblem make_precoder_problem(const Scenario& s, const PhaseVector& phi, double alpha,
                                      bool with_beampattern);

struct PrecoderResult {
  Precoder precoder;
  /// w^H G w.
  double objective = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

/// w = sqrt(P_R) times the principal eigenvector of G; the global maximizer of
/// the Rayleigh quotient on the power sphere.
PrecoderResult solve_precoder_eigen(const PrecoderProblem& p, const EigOptions& eig = {});

/// ||w w^H - R_D||_F^2.
double beampattern_deviation(const Precoder& w, const ComplexMatrix& r_d);

struct PenaltyOptions {
  std::vector<double> rho_schedule{1.0, 10.0, 100.0, 1000.0};
  std::size_t max_inner_iter = 500;
  double initial_step = 1.0;
  /// Relative change of the penalized objective that ends a rho phase.
  double tol = 1e-12;
};

struct PenaltyPhase {
  double rho = 0.0;
  /// Penalized objective of every accepted iterate in this phase (first entry
  /// is the warm start).
  std::vector<double> accepted;
};

struct PenaltyResult {
  Precoder precoder;
  double objective = 0.0;   // w^H G w
  double deviation = 0.0;   // ||ww^H - R_D||_F^2
  double violation = 0.0;   // max(0, deviation - gamma_BP)
  bool feasible = false;    // violation <= 1e-3 * gamma_BP
  std::size_t iterations = 0;
  std::vector<PenaltyPhase> phases;
};

/// Penalty method: for each rho in the schedule (warm-started from the
/// previous phase) runs projected gradient ascent on the sphere of
///   w^H G w - rho * max(0, ||ww^H - R_D||_F^2 - gamma_BP)^2
/// with backtracking step halving. Returns the last iterate.
PenaltyResult solve_precoder_penalty(const PrecoderProblem& p, const Precoder& w0,
                                     const PenaltyOptions& options = {});

}  // namespace dfrc
