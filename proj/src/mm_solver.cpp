// SPDX-License-Identifier: Apache-2.0
#include "dfrc/mm_solver.hpp"

#include <fmt/format.h>

#include <cmath>

namespace dfrc {

double phase_change_norm(const PhaseVector& a, const PhaseVector& b) {
  return norm(a.values() - b.values());
}

// ---------------------------------------------------------------------------
// Factored objective
// ---------------------------------------------------------------------------

double QuarticFactors::radar(const PhaseVector& phi) const {
  return scale * quadratic_form(a_mat, phi.values()) * std::norm(dotu(b_vec, phi.values()));
}

double QuarticFactors::comm(const PhaseVector& phi) const {
  return std::norm(dotu(u_vec, phi.values()) + v_scalar) / user_noise_power;
}

double QuarticFactors::objective(const PhaseVector& phi, double alpha) const {
  return alpha * radar(phi) + (1.0 - alpha) * comm(phi);
}

QuarticFactors quartic_factors(const Scenario& s, const Precoder& w) {
  s.validate();
  const auto& c = s.channels;
  if (w.w.size() != s.config.n_tx) throw ShapeError("quartic_factors: precoder has wrong length");
  const std::size_t n = s.config.n_irs();

  QuarticFactors qf;
  // H_ul diag(a): scale column n by a_n.
  ComplexMatrix hd = c.h_ul;
  for (std::size_t r = 0; r < hd.rows(); ++r)
    for (std::size_t k = 0; k < n; ++k) hd(r, k) *= c.a_irs[k];
  qf.a_mat = hermitian_part(matmul(adjoint(hd), hd));

  const ComplexVector dl_w = matvec(c.h_dl, w.w);
  qf.b_vec = hadamard(c.a_irs, dl_w);
  const ComplexVector b_conj = conj(qf.b_vec);
  qf.b_mat = hermitian_part(outer(b_conj, b_conj));
  qf.scale = std::norm(s.config.cascaded_gain) / s.config.radar_noise_power;

  qf.u_vec = hadamard(c.f_user, dl_w);
  qf.u_vec *= std::sqrt(s.config.irs_pathloss);
  qf.v_scalar = dotu(c.g_user, w.w);
  qf.user_noise_power = s.config.user_noise_power;
  return qf;
}

void check_quartic_identity(const Scenario& s, const Precoder& w, const QuarticFactors& qf,
                            const PhaseVector& phi, double rel_tol) {
  const auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1e-300});
  };
  const double direct_r = radar_snr(s, w, phi);
  const double direct_u = comm_snr(s, w, phi);
  // tr(R A R B) route, independent of QuarticFactors::radar().
  const ComplexVector ap = matvec(qf.a_mat, phi.values());
  const ComplexVector bp = matvec(qf.b_mat, phi.values());
  const double trace_form = qf.scale * dot(phi.values(), ap).real() * dot(phi.values(), bp).real();
  if (!close(direct_r, qf.radar(phi)) || !close(direct_r, trace_form))
    throw ContractError(fmt::format("quartic identity failed: radar_snr {} vs factored {}", direct_r, trace_form));
  if (!close(direct_u, qf.comm(phi)))
    throw ContractError(fmt::format("quartic identity failed: comm_snr {} vs factored {}", direct_u, qf.comm(phi)));
}

// ---------------------------------------------------------------------------
// Surrogates
// ---------------------------------------------------------------------------

double QuadraticSurrogate::value(const PhaseVector& phi) const {
  const auto& x = phi.values();
  return quadratic_form(q_mat, x) + dot(x, lin_h).real() + dotu(x, lin_t).real() + const_term;
}

double LinearSurrogate::value(const PhaseVector& phi) const {
  const auto& x = phi.values();
  return dot(x, nu).real() + dotu(x, eta).real() + const_term;
}

QuadraticSurrogate minorize_quartic(const QuarticFactors& qf, const PhaseVector& phi_t, double alpha) {
  const std::size_t n = qf.size();
  if (phi_t.size() != n) throw ShapeError("minorize_quartic: phi has wrong length");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError("minorize_quartic: alpha must lie in [0, 1]");
  const auto& p = phi_t.values();

  QuadraticSurrogate qs;
  qs.q_mat = ComplexMatrix(n, n);
  qs.lin_h = ComplexVector(n);
  qs.lin_t = ComplexVector(n);

  if (alpha > 0.0) {
    // Q_R = c (A R_t B + B R_t A) = c (x y^H + y x^H), x = A phi_t, y = B phi_t.
    const ComplexVector x = matvec(qf.a_mat, p);
    const ComplexVector y = matvec(qf.b_mat, p);
    const double w = alpha * qf.scale;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        qs.q_mat(i, j) = w * (x[i] * std::conj(y[j]) + y[i] * std::conj(x[j]));
    // const_R = -c tr(R_t A R_t B) = -c (phi_t^H A phi_t)(phi_t^H B phi_t).
    qs.const_term -= w * dot(p, x).real() * dot(p, y).real();
  }

  if (alpha < 1.0) {
    const double w = (1.0 - alpha) / qf.user_noise_power;
    const ComplexVector u_conj = conj(qf.u_vec);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) qs.q_mat(i, j) += w * u_conj[i] * qf.u_vec[j];
    qs.lin_t += (2.0 * w * std::conj(qf.v_scalar)) * qf.u_vec;
    qs.const_term += w * std::norm(qf.v_scalar);
  }
  qs.q_mat = hermitian_part(qs.q_mat);
  return qs;
}

double psd_shift(const ComplexMatrix& q, ShiftRule rule) {
  switch (rule) {
    case ShiftRule::power: {
      EigOptions opts;
      opts.tol = 1e-10;
      opts.max_iter = 5000;
      return tight_smallest_eig_lower_bound(q, opts);
    }
    case ShiftRule::gershgorin:
    default:
      return smallest_eig_lower_bound(q);
  }
}

LinearSurrogate minorize_quadratic(const QuadraticSurrogate& qs, const PhaseVector& phi_t, double shift) {
  const std::size_t n = qs.size();
  if (phi_t.size() != n) throw ShapeError("minorize_quadratic: phi has wrong length");
  const double scale = std::max(1.0, max_abs(qs.q_mat));
  if (shift > smallest_eig_lower_bound(qs.q_mat) + 1e-12 * scale) {
    ComplexMatrix shifted = qs.q_mat;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= shift;
    if (!is_positive_semidefinite(shifted, 1e-10 * scale))
      throw ContractError(fmt::format("minorize_quadratic: Q - {} I is not PSD", shift));
  }

  const auto& p = phi_t.values();
  ComplexVector qp = matvec(qs.q_mat, p);
  for (std::size_t i = 0; i < n; ++i) qp[i] -= shift * p[i];  // (Q - shift I) phi_t

  LinearSurrogate lin;
  lin.nu = 2.0 * qp;
  lin.nu += qs.lin_h;
  lin.eta = qs.lin_t;
  lin.const_term = qs.const_term + shift * static_cast<double>(n) - dot(p, qp).real();
  return lin;
}

PhaseUpdate update_phases(const ComplexVector& nu, const ComplexVector& eta, const PhaseVector* previous) {
  if (nu.size() != eta.size()) throw ShapeError("update_phases: nu and eta differ in length");
  if (previous && previous->size() != nu.size()) throw ShapeError("update_phases: previous has wrong length");
  PhaseUpdate out;
  std::vector<double> angles(nu.size());
  double scale = 0.0;
  for (std::size_t n = 0; n < nu.size(); ++n) scale = std::max(scale, std::abs(nu[n]) + std::abs(eta[n]));
  for (std::size_t n = 0; n < nu.size(); ++n) {
    const cdouble z = nu[n] + std::conj(eta[n]);
    if (std::abs(z) <= 1e-14 * scale || z == cdouble{}) {
      angles[n] = previous ? previous->angle(n) : 0.0;
      ++out.flagged;
    } else {
      angles[n] = std::arg(z);
    }
  }
  out.phi = PhaseVector::from_angles(std::move(angles));
  return out;
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

PhaseSolveResult solve_mm(const Scenario& s, const Precoder& w, const PhaseVector& phi0, double alpha,
                          const MmOptions& options) {
  const Stopwatch clock;
  const QuarticFactors qf = quartic_factors(s, w);
  if (phi0.size() != qf.size()) throw ShapeError("solve_mm: phi0 has wrong length");
  check_quartic_identity(s, w, qf, phi0);

  PhaseSolveResult result;
  PhaseVector phi = phi0;
  double f = qf.objective(phi, alpha);
  result.trace.initial_objective = f;
  if (options.observer) options.observer(phi);

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const QuadraticSurrogate qs = minorize_quartic(qf, phi, alpha);
    const LinearSurrogate lin = minorize_quadratic(qs, phi, psd_shift(qs.q_mat, options.shift));
    PhaseUpdate upd = update_phases(lin.nu, lin.eta, &phi);
    result.trace.flagged_entries += upd.flagged;

    TraceRecord rec;
    rec.iteration = it;
    rec.gamma_r = qf.radar(upd.phi);
    rec.gamma_u = qf.comm(upd.phi);
    rec.objective = alpha * rec.gamma_r + (1.0 - alpha) * rec.gamma_u;
    rec.surrogate = lin.value(upd.phi);
    rec.change_norm = phase_change_norm(upd.phi, phi);
    rec.wall_ns = clock.elapsed_ns();
    result.trace.records.push_back(rec);
    if (options.observer) options.observer(upd.phi);

    const double rel = std::abs(rec.objective - f) / std::max(std::abs(f), 1e-300);
    phi = std::move(upd.phi);
    f = rec.objective;
    if (rel < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.trace.converged = result.converged;
  result.phi = std::move(phi);
  return result;
}

}  // namespace dfrc
