// SPDX-License-Identifier: Apache-2.0
#include "dfrc/precoder.hpp"

#include <fmt/format.h>

#include <cmath>

namespace dfrc {

namespace {

struct PenaltyModel {
  const ComplexMatrix& g;
  const ComplexMatrix& r_d;
  double threshold;
  double rho;

  double excess(const ComplexVector& w) const {
    return std::max(0.0, beampattern_deviation(Precoder{w}, r_d) - threshold);
  }

  double value(const ComplexVector& w) const {
    const double e = excess(w);
    return quadratic_form(g, w) - rho * e * e;
  }

  // d/dw* of value(w), with d/dw* ||ww^H - R_D||_F^2 = 2 ||w||^2 w - 2 R_D w.
  ComplexVector conj_gradient(const ComplexVector& w) const {
    ComplexVector grad = matvec(g, w);
    const double e = excess(w);
    if (e > 0.0) {
      ComplexVector dd = 2.0 * squared_norm(w) * w;
      dd -= 2.0 * matvec(r_d, w);
      grad -= 2.0 * rho * e * dd;
    }
    return grad;
  }
};

ComplexVector project_to_sphere(ComplexVector w, double power) {
  return Precoder::normalized(std::move(w), power).w;
}

}  // namespace

void PrecoderProblem::validate() const {
  if (!g_matrix.is_square()) throw ShapeError("PrecoderProblem: G must be square");
  if (!is_hermitian(g_matrix)) throw ContractError("PrecoderProblem: G must be Hermitian");
  if (!(power_budget > 0.0)) throw ContractError("PrecoderProblem: power budget must be > 0");
  if (r_d.has_value() != bp_threshold.has_value())
    throw ContractError("PrecoderProblem: R_D and gamma_BP must be given together");
  if (r_d && (r_d->rows() != g_matrix.rows() || r_d->cols() != g_matrix.cols()))
    throw ShapeError("PrecoderProblem: R_D must match G");
}

ComplexMatrix objective_matrix(const Scenario& s, const PhaseVector& phi, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractError("objective_matrix: alpha must lie in [0, 1]");
  const ComplexMatrix ct = build_cascaded_target_channel(s, phi);
  const ComplexVector cu = build_user_channel(s, phi);
  ComplexMatrix g = matmul(adjoint(ct), ct);
  g *= alpha / s.config.radar_noise_power;
  // conj(c_U) c_U^T == outer(conj(c_U), conj(c_U)).
  const ComplexVector cu_conj = conj(cu);
  g += ((1.0 - alpha) / s.config.user_noise_power) * outer(cu_conj, cu_conj);
  return hermitian_part(g);
}

PrecoderProblem make_precoder_problem(const Scenario& s, const PhaseVector& phi, double alpha,
                                      bool with_beampattern) {
  PrecoderProblem p;
  p.g_matrix = objective_matrix(s, phi, alpha);
  p.power_budget = s.config.power_budget;
  if (with_beampattern) {
    p.r_d = desired_covariance(s, s.config.desired_angles);
    p.bp_threshold = s.config.beampattern_threshold;
  }
  return p;
}

PrecoderResult solve_precoder_eigen(const PrecoderProblem& p, const EigOptions& eig) {
  p.validate();
  const EigResult e = dominant_eigpair(p.g_matrix, eig);
  PrecoderResult r;
  r.precoder = Precoder::normalized(e.vector, p.power_budget);
  r.objective = quadratic_form(p.g_matrix, r.precoder.w);
  r.converged = e.converged;
  r.iterations = e.iterations;
  return r;
}

double beampattern_deviation(const Precoder& w, const ComplexMatrix& r_d) {
  if (!r_d.is_square() || r_d.rows() != w.w.size()) throw ShapeError("beampattern_deviation: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < r_d.rows(); ++i)
    for (std::size_t j = 0; j < r_d.cols(); ++j) s += std::norm(w.w[i] * std::conj(w.w[j]) - r_d(i, j));
  return s;
}

PenaltyResult solve_precoder_penalty(const PrecoderProblem& p, const Precoder& w0, const PenaltyOptions& options) {
  p.validate();
  if (!p.r_d) throw ContractError("solve_precoder_penalty: requires R_D and gamma_BP");
  if (w0.w.size() != p.g_matrix.rows()) throw ShapeError("solve_precoder_penalty: w0 has wrong length");
  for (std::size_t i = 1; i < options.rho_schedule.size(); ++i)
    if (!(options.rho_schedule[i] > options.rho_schedule[i - 1]))
      throw ContractError("solve_precoder_penalty: rho schedule must be increasing");

  const double power = p.power_budget;
  ComplexVector w = project_to_sphere(w0.w, power);
  PenaltyResult result;

  for (double rho : options.rho_schedule) {
    const PenaltyModel model{p.g_matrix, *p.r_d, *p.bp_threshold, rho};
    PenaltyPhase phase;
    phase.rho = rho;
    double f = model.value(w);
    phase.accepted.push_back(f);
    bool done = false;
    for (std::size_t it = 0; it < options.max_inner_iter && !done; ++it) {
      ComplexVector grad = model.conj_gradient(w);
      // Tangent component on the sphere.
      const cdouble radial = dot(w, grad) / squared_norm(w);
      ComplexVector tangent = grad;
      tangent -= cdouble(radial.real(), 0.0) * w;
      if (norm(tangent) <= 1e-14 * std::max(1.0, norm(grad))) break;

      double step = options.initial_step;
      bool accepted = false;
      for (int k = 0; k < 60; ++k, step *= 0.5) {
        ComplexVector candidate = w;
        candidate += step * tangent;
        candidate = project_to_sphere(std::move(candidate), power);
        const double fc = model.value(candidate);
        if (fc >= f) {
          const double change = fc - f;
          w = std::move(candidate);
          f = fc;
          accepted = true;
          phase.accepted.push_back(f);
          ++result.iterations;
          // A tiny gain after backtracking says nothing about stationarity,
          // so that case also needs a small tangent gradient.
          const double scale = std::max(1.0, std::abs(f));
          done = change <= options.tol * scale && (k == 0 || norm(tangent) * std::sqrt(power) <= 1e-7 * scale);
          break;
        }
      }
      if (!accepted) break;
    }
    result.phases.push_back(std::move(phase));
  }

  result.precoder = Precoder::normalized(std::move(w), power);
  result.objective = quadratic_form(p.g_matrix, result.precoder.w);
  result.deviation = beampattern_deviation(result.precoder, *p.r_d);
  result.violation = std::max(0.0, result.deviation - *p.bp_threshold);
  result.feasible = result.violation <= 1e-3 * *p.bp_threshold;
  return result;
}

}  // namespace dfrc
