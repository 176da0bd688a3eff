// SPDX-License-Identifier: Apache-2.0
#include "dfrc/rmo_solver.hpp"

#include <cmath>

namespace dfrc {

void RmoParams::validate() const {
  if (!(armijo_initial_step > 0.0)) throw ContractError("rmo.armijo_initial_step: must be > 0");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw ContractError("rmo.armijo_shrink: must lie in (0, 1)");
  if (!(armijo_slope >= 0.0 && armijo_slope < 1.0)) throw ContractError("rmo.armijo_slope: must lie in [0, 1)");
  if (grad_tol && !(*grad_tol >= 0.0)) throw ContractError("rmo.grad_tol: must be >= 0");
  if (!(objective_tol >= 0.0)) throw ContractError("rmo.objective_tol: must be >= 0");
}

ComplexVector euclidean_gradient(const QuarticFactors& qf, const PhaseVector& phi, double alpha) {
  const auto& p = phi.values();
  if (p.size() != qf.size()) throw ShapeError("euclidean_gradient: phi has wrong length");
  ComplexVector grad(p.size());
  if (alpha > 0.0) {
    const ComplexVector ap = matvec(qf.a_mat, p);
    const ComplexVector bp = matvec(qf.b_mat, p);
    const double qa = dot(p, ap).real();
    const double qb = dot(p, bp).real();
    // Product rule on (phi^H A phi)(phi^H B phi).
    const double w = 2.0 * alpha * qf.scale;
    for (std::size_t n = 0; n < p.size(); ++n) grad[n] = w * (qb * ap[n] + qa * bp[n]);
  }
  if (alpha < 1.0) {
    // |u^T phi + v|^2 = phi^H conj(u) u^T phi + 2 Re(conj(v) u^T phi) + |v|^2.
    const double w = 2.0 * (1.0 - alpha) / qf.user_noise_power;
    const cdouble h = dotu(qf.u_vec, p) + qf.v_scalar;
    for (std::size_t n = 0; n < p.size(); ++n) grad[n] += w * std::conj(qf.u_vec[n]) * h;
  }
  return grad;
}

ComplexVector riemannian_gradient(const ComplexVector& egrad, const PhaseVector& phi) {
  if (egrad.size() != phi.size()) throw ShapeError("riemannian_gradient: size mismatch");
  ComplexVector g(egrad.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const cdouble p = phi[n];
    const double radial = (egrad[n] * std::conj(p)).real();
    g[n] = egrad[n] - radial * p;
  }
  return g;
}

Retraction retract(const PhaseVector& phi, double step, const ComplexVector& rgrad) {
  if (rgrad.size() != phi.size()) throw ShapeError("retract: size mismatch");
  constexpr int kMaxRetries = 30;
  Retraction out;
  std::vector<double> angles(phi.size());
  for (int attempt = 0;; ++attempt) {
    std::size_t zeros = 0;
    for (std::size_t n = 0; n < phi.size(); ++n) {
      const cdouble z = phi[n] + step * rgrad[n];
      if (std::abs(z) == 0.0) {
        ++zeros;
        angles[n] = phi.angle(n);
      } else {
        angles[n] = std::arg(z);
      }
    }
    if (zeros == 0 || attempt == kMaxRetries) {
      out.flagged = zeros;
      break;
    }
    step *= 0.5;
  }
  out.step = step;
  out.phi = PhaseVector::from_angles(std::move(angles));
  return out;
}

double armijo_step(const std::function<double(const PhaseVector&)>& f, const PhaseVector& phi,
                   const ComplexVector& rgrad, const RmoParams& params) {
  const double g2 = squared_norm(rgrad);
  if (!(g2 > 0.0)) return 0.0;
  const double f0 = f(phi);
  double step = params.armijo_initial_step;
  for (std::size_t k = 0; k <= params.armijo_max_shrinks; ++k, step *= params.armijo_shrink) {
    const Retraction r = retract(phi, step, rgrad);
    if (f(r.phi) >= f0 + params.armijo_slope * r.step * g2) return r.step;
  }
  return 0.0;
}

PhaseSolveResult solve_rmo(const Scenario& s, const Precoder& w, const PhaseVector& phi0, double alpha,
                           const RmoParams& params) {
  params.validate();
  const Stopwatch clock;
  const QuarticFactors qf = quartic_factors(s, w);
  if (phi0.size() != qf.size()) throw ShapeError("solve_rmo: phi0 has wrong length");
  const double grad_tol = params.grad_tol.value_or(1e-6 * static_cast<double>(qf.size()));
  const auto objective = [&](const PhaseVector& p) { return qf.objective(p, alpha); };

  PhaseSolveResult result;
  PhaseVector phi = phi0;
  double f = objective(phi);
  result.trace.initial_objective = f;
  if (params.observer) params.observer(phi);

  for (std::size_t it = 1; it <= params.max_iter; ++it) {
    const ComplexVector rgrad = riemannian_gradient(euclidean_gradient(qf, phi, alpha), phi);
    if (norm(rgrad) <= grad_tol * std::max(1.0, std::abs(f))) {
      result.converged = true;
      break;
    }
    const double step = armijo_step(objective, phi, rgrad, params);
    if (step == 0.0) {
      // No ascent step left at double precision: numerically stationary.
      result.converged = true;
      break;
    }
    Retraction r = retract(phi, step, rgrad);
    result.trace.flagged_entries += r.flagged;

    TraceRecord rec;
    rec.iteration = it;
    rec.gamma_r = qf.radar(r.phi);
    rec.gamma_u = qf.comm(r.phi);
    rec.objective = alpha * rec.gamma_r + (1.0 - alpha) * rec.gamma_u;
    rec.surrogate = rec.objective;
    rec.change_norm = phase_change_norm(r.phi, phi);
    rec.step = r.step;
    rec.wall_ns = clock.elapsed_ns();
    result.trace.records.push_back(rec);
    if (params.observer) params.observer(r.phi);

    const double rel = std::abs(rec.objective - f) / std::max(std::abs(f), 1e-300);
    phi = std::move(r.phi);
    f = rec.objective;
    if (params.objective_tol > 0.0 && rel < params.objective_tol) {
      result.converged = true;
      break;
    }
  }
  result.trace.converged = result.converged;
  result.phi = std::move(phi);
  return result;
}

}  // namespace dfrc
