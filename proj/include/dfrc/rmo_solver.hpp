// SPDX-License-Identifier: Apache-2.0
//
// Riemannian ascent of the quartic objective on the product of unit circles.
//
// Gradient convention: euclidean_gradient returns 2 df/d(conj phi), i.e. the
// real gradient df/dRe + j df/dIm, so a perturbation dphi changes f by
// Re(dphi^H grad) to first order. For a phase perturbation of element n this
// gives df/dtheta_n = Im(conj(phi_n) grad_n).
#pragma once

#include <functional>
#include <optional>

#include "dfrc/mm_solver.hpp"
#include "dfrc/trace.hpp"

namespace dfrc {

struct RmoParams {
  double armijo_initial_step = 1.0;
  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  std::size_t armijo_max_shrinks = 50;
  /// Stop once ||grad|| <= grad_tol * max(1, |f|). Defaults to 1e-6 * N.
  std::optional<double> grad_tol;
  std::size_t max_iter = 1000;
  /// Optional relative objective-change stop; 0 disables it.
  double objective_tol = 0.0;
  IterateObserver observer;

  void validate() const;
};

ComplexVector euclidean_gradient(const QuarticFactors& qf, const PhaseVector& phi, double alpha);

/// Tangent projection egrad - Re(egrad o conj(phi)) o phi.
ComplexVector riemannian_gradient(const ComplexVector& egrad, const PhaseVector& phi);

struct Retraction {
  PhaseVector phi;
  double step = 0.0;       // step actually used (halved when an entry vanished)
  std::size_t flagged = 0; // entries that kept their old phase
};

/// Elementwise normalization of phi + step * rgrad back onto the unit circles.
Retraction retract(const PhaseVector& phi, double step, const ComplexVector& rgrad);

/// Largest step = initial * shrink^k (k <= armijo_max_shrinks) with
///   f(retract(phi, step, rgrad)) >= f(phi) + slope * step * ||rgrad||^2,
/// or 0 when no such step exists.
double armijo_step(const std::function<double(const PhaseVector&)>& f, const PhaseVector& phi,
                   const ComplexVector& rgrad, const RmoParams& params);

PhaseSolveResult solve_rmo(const Scenario& s, const Precoder& w, const PhaseVector& phi0, double alpha,
                           const RmoParams& params = {});

}  // namespace dfrc
