// SPDX-License-Identifier: Apache-2.0
//
// Twice-minorization engine for the IRS phase subproblem.
//
// With w fixed the radar SNR factors as gamma_R = c (phi^H A phi)(phi^H B phi)
// and the user SNR as |u^T phi + v|^2 / sigma_U^2. Writing R = phi phi^H,
// gamma_R = c tr(R A R B) is convex in R (B^T kron A is PSD), so its tangent
// plane at R_t is a global lower bound that is quadratic in phi. A second
// tangent bound on the PSD-shifted quadratic then leaves a function that is
// linear in phi and is maximized elementwise in closed form.
#pragma once

#include <functional>

#include "dfrc/numerics.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/trace.hpp"

namespace dfrc {

struct QuarticFactors {
  ComplexMatrix a_mat;   // (H_ul diag(a))^H (H_ul diag(a))
  ComplexMatrix b_mat;   // conj(b) b^T
  ComplexVector b_vec;   // b = diag(a) H_dl w
  double scale = 0.0;    // |beta|^2 / sigma_R^2
  ComplexVector u_vec;   // sqrt(beta_H) diag(f) H_dl w
  cdouble v_scalar{};    // g^T w
  double user_noise_power = 1.0;

  std::size_t size() const { return a_mat.rows(); }
  double radar(const PhaseVector& phi) const;
  double comm(const PhaseVector& phi) const;
  double objective(const PhaseVector& phi, double alpha) const;
};

QuarticFactors quartic_factors(const Scenario& s, const Precoder& w);

/// Throws ContractError unless the factored radar/user SNRs reproduce the
/// direct channel evaluation at phi (relative tolerance `rel_tol`).
void check_quartic_identity(const Scenario& s, const Precoder& w, const QuarticFactors& qf,
                            const PhaseVector& phi, double rel_tol = 1e-8);

/// phi^H Q phi + Re(phi^H lin_h) + Re(phi^T lin_t) + const_term.
struct QuadraticSurrogate {
  ComplexMatrix q_mat;
  ComplexVector lin_h;
  ComplexVector lin_t;
  double const_term = 0.0;

  std::size_t size() const { return q_mat.rows(); }
  double value(const PhaseVector& phi) const;
};

/// Re(phi^H nu + phi^T eta) + const_term.
struct LinearSurrogate {
  ComplexVector nu;
  ComplexVector eta;
  double const_term = 0.0;

  double value(const PhaseVector& phi) const;
};

/// Quadratic minorizer of alpha gamma_R + (1 - alpha) gamma_U, tangent at phi_t.
/// The user term is represented exactly.
QuadraticSurrogate minorize_quartic(const QuarticFactors& qf, const PhaseVector& phi_t, double alpha);

/// Shift used to make Q - shift I PSD.
double psd_shift(const ComplexMatrix& q, ShiftRule rule);

/// Linear minorizer of the quadratic surrogate on the unit-modulus set, tangent
/// at phi_t. Requires Q - shift I to be PSD (Gershgorin check, falling back to
/// a Cholesky test); throws ContractError otherwise.
LinearSurrogate minorize_quadratic(const QuadraticSurrogate& qs, const PhaseVector& phi_t, double shift);

struct PhaseUpdate {
  PhaseVector phi;
  std::size_t flagged = 0;
};

/// phi = exp(j arg(nu + conj(eta))). Elements where nu + conj(eta) vanishes
/// keep their phase from `previous` (angle 0 when absent).
PhaseUpdate update_phases(const ComplexVector& nu, const ComplexVector& eta, const PhaseVector* previous = nullptr);

struct MmOptions {
  double tol = 1e-6;  // relative objective change
  std::size_t max_iter = 500;
  ShiftRule shift = ShiftRule::gershgorin;
  IterateObserver observer;
};

/// Power-method-like MM iteration. The true objective is non-decreasing.
PhaseSolveResult solve_mm(const Scenario& s, const Precoder& w, const PhaseVector& phi0, double alpha,
                          const MmOptions& options = {});

}  // namespace dfrc
