// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "dfrc/precoder.hpp"
#include "test_support.hpp"

namespace dfrc {
namespace {

using testing::random_hermitian;
using testing::random_matrix;
using testing::random_precoder;
using testing::random_vector;
using testing::rel_err;
using testing::small_scenario;

ComplexMatrix random_psd(std::size_t n, std::size_t rank, std::mt19937_64& rng) {
  const ComplexMatrix a = random_matrix(n, rank, rng);
  return hermitian_part(matmul(a, adjoint(a)));
}

PrecoderProblem plain_problem(ComplexMatrix g, double power) {
  PrecoderProblem p;
  p.g_matrix = std::move(g);
  p.power_budget = power;
  return p;
}

// Best constrained objective over a grid on the N_T = 3 power sphere. Up to
// the irrelevant common phase every point is
//   sqrt(P) (cos a, sin a cos b e^{j p1}, sin a sin b e^{j p2}),
// a, b in [0, pi/2], p1, p2 in [0, 2pi).
struct SphereGridBest {
  double value = -1.0;
  ComplexVector w;
};

SphereGridBest sphere_grid(const PrecoderProblem& p, std::size_t k_angle, std::size_t k_phase) {
  SphereGridBest best;
  const double s = std::sqrt(p.power_budget);
  for (std::size_t ia = 0; ia <= k_angle; ++ia) {
    const double a = 0.5 * kPi * static_cast<double>(ia) / static_cast<double>(k_angle);
    for (std::size_t ib = 0; ib <= k_angle; ++ib) {
      const double b = 0.5 * kPi * static_cast<double>(ib) / static_cast<double>(k_angle);
      for (std::size_t i1 = 0; i1 < k_phase; ++i1) {
        const double p1 = kTwoPi * static_cast<double>(i1) / static_cast<double>(k_phase);
        for (std::size_t i2 = 0; i2 < k_phase; ++i2) {
          const double p2 = kTwoPi * static_cast<double>(i2) / static_cast<double>(k_phase);
          const ComplexVector w{s * std::cos(a), s * std::sin(a) * std::cos(b) * std::polar(1.0, p1),
                                s * std::sin(a) * std::sin(b) * std::polar(1.0, p2)};
          if (p.r_d && beampattern_deviation(Precoder{w}, *p.r_d) > *p.bp_threshold) continue;
          const double v = quadratic_form(p.g_matrix, w);
          if (v > best.value) best = {v, w};
        }
      }
    }
  }
  return best;
}

TEST(ObjectiveMatrix, DirectPathOnlyIsRankOne) {
  Scenario s = small_scenario(4, 2, 2, 2, 1);
  s.config.irs_pathloss = 0.0;
  s.config.user_noise_power = 2.0;
  std::mt19937_64 rng(1);
  const ComplexMatrix g = objective_matrix(s, PhaseVector::random(4, rng), 0.0);
  const ComplexVector gc = conj(s.channels.g_user);
  ComplexMatrix expected = outer(gc, gc);
  expected *= 0.5;
  EXPECT_LT(max_abs(g - expected), 1e-14);
}

TEST(ObjectiveMatrix, RadarOnlyWithZeroGainIsZero) {
  Scenario s = small_scenario(4, 2, 2, 2, 2);
  s.config.cascaded_gain = 0.0;
  std::mt19937_64 rng(2);
  EXPECT_EQ(max_abs(objective_matrix(s, PhaseVector::random(4, rng), 1.0)), 0.0);
}

TEST(ObjectiveMatrix, QuadraticFormEqualsDesignObjective) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    Scenario s = small_scenario(4, 3, 2, 3, 10 + t);
    s.config.cascaded_gain = {0.3, 0.2};
    const PhaseVector phi = PhaseVector::random(6, rng);
    const Precoder w = random_precoder(4, 1.5, rng);
    const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const ComplexMatrix g = objective_matrix(s, phi, alpha);
    EXPECT_TRUE(is_hermitian(g));
    EXPECT_TRUE(is_positive_semidefinite(g, 1e-12 * max_abs(g)));
    EXPECT_LT(rel_err(quadratic_form(g, w.w), design_objective(s, w, phi, alpha)), 1e-10);
  }
}

TEST(ObjectiveMatrix, AlphaOutOfRangeThrows) {
  const Scenario s = small_scenario(2, 1, 1, 2, 3);
  EXPECT_THROW(objective_matrix(s, PhaseVector::zeros(2), 1.5), ContractError);
  EXPECT_THROW(objective_matrix(s, PhaseVector::zeros(2), -0.1), ContractError);
}

TEST(SolvePrecoderEigen, DiagonalMatrix) {
  const PrecoderResult r = solve_precoder_eigen(plain_problem(ComplexMatrix::diagonal(ComplexVector{2, 1}), 4.0));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(std::abs(r.precoder.w[0]), 2.0, 1e-8);
  EXPECT_NEAR(std::abs(r.precoder.w[1]), 0.0, 1e-5);
  EXPECT_NEAR(r.objective, 8.0, 1e-9);
}

TEST(SolvePrecoderEigen, RankOneAlignsWithGenerator) {
  std::mt19937_64 rng(4);
  const ComplexVector u = random_vector(5, rng);
  const PrecoderResult r = solve_precoder_eigen(plain_problem(outer(u, u), 2.0));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(std::abs(dot(u, r.precoder.w)), norm(u) * std::sqrt(2.0), 1e-9);
}

TEST(SolvePrecoderEigen, BeatsRandomSphereSamples) {
  std::mt19937_64 rng(5);
  const ComplexMatrix g = random_psd(4, 4, rng);
  const PrecoderResult r = solve_precoder_eigen(plain_problem(g, 3.0));
  double best = 0.0;
  for (int t = 0; t < 100000; ++t) best = std::max(best, quadratic_form(g, random_precoder(4, 3.0, rng).w));
  EXPECT_GE(r.objective, best);
  EXPECT_GT(best, 0.95 * r.objective);  // the sampler did get close
}

TEST(SolvePrecoderEigen, ObjectiveIsLargestEigenvalueTimesPower) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix g = random_psd(6, 3, rng);
    const PrecoderResult r = solve_precoder_eigen(plain_problem(g, 2.5));
    ASSERT_TRUE(r.converged);
    EXPECT_LT(rel_err(r.objective, 2.5 * dominant_eigpair(g).value), 1e-9);
    EXPECT_LT(rel_err(r.precoder.power(), 2.5), 1e-12);
  }
}

TEST(SolvePrecoderEigen, NonConvergenceIsFlagged) {
  EigOptions o;
  o.max_iter = 1;
  const PrecoderResult r =
      solve_precoder_eigen(plain_problem(ComplexMatrix::diagonal(ComplexVector{1.0, 0.999999, 0.5}), 1.0), o);
  EXPECT_FALSE(r.converged);
  EXPECT_LT(rel_err(r.precoder.power(), 1.0), 1e-12);
}

TEST(PrecoderProblem, RejectsMalformedInput) {
  PrecoderProblem p = plain_problem(ComplexMatrix{{1, 2}, {0, 1}}, 1.0);
  EXPECT_THROW(p.validate(), ContractError);
  p = plain_problem(ComplexMatrix::identity(2), 1.0);
  p.r_d = ComplexMatrix::identity(2);
  EXPECT_THROW(p.validate(), ContractError);  // threshold missing
  p.bp_threshold = 1.0;
  EXPECT_NO_THROW(p.validate());
  p.r_d = ComplexMatrix::identity(3);
  EXPECT_THROW(p.validate(), ShapeError);
}

TEST(BeampatternDeviation, SelfCovarianceGivesZero) {
  std::mt19937_64 rng(7);
  const Precoder w = random_precoder(4, 1.0, rng);
  EXPECT_NEAR(beampattern_deviation(w, outer(w.w, w.w)), 0.0, 1e-28);
}

TEST(BeampatternDeviation, ZeroTargetGivesSquaredPower) {
  std::mt19937_64 rng(8);
  const Precoder w = random_precoder(5, 3.0, rng);
  EXPECT_NEAR(beampattern_deviation(w, ComplexMatrix(5, 5)), 9.0, 1e-12);
}

TEST(BeampatternDeviation, MatchesExpandedIdentity) {
  // ||ww^H - R||_F^2 = ||w||^4 - 2 w^H R w + ||R||_F^2 for Hermitian R.
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const Precoder w = random_precoder(4, 1.7, rng);
    const ComplexMatrix r = random_hermitian(4, rng);
    const double expected = std::pow(w.power(), 2) - 2.0 * quadratic_form(r, w.w) + std::pow(frobenius_norm(r), 2);
    EXPECT_NEAR(beampattern_deviation(w, r), expected, 1e-11 * std::max(1.0, expected));
  }
}

TEST(BeampatternDeviation, ShapeMismatchThrows) {
  EXPECT_THROW(beampattern_deviation(Precoder{ComplexVector(3)}, ComplexMatrix(2, 2)), ShapeError);
}

TEST(SolvePrecoderPenalty, SlackConstraintMatchesEigenSolution) {
  std::mt19937_64 rng(10);
  const ComplexMatrix g = random_psd(4, 2, rng);
  PrecoderProblem p = plain_problem(g, 1.0);
  const PrecoderResult eig = solve_precoder_eigen(p);
  p.r_d = ComplexMatrix::identity(4);
  p.bp_threshold = 1e6;
  const PenaltyResult pen = solve_precoder_penalty(p, random_precoder(4, 1.0, rng));
  EXPECT_LT(rel_err(pen.objective, eig.objective), 1e-6);
  EXPECT_TRUE(pen.feasible);
  EXPECT_EQ(pen.violation, 0.0);
}

TEST(SolvePrecoderPenalty, FeasibleEigenSolutionUnchanged) {
  std::mt19937_64 rng(11);
  PrecoderProblem p = plain_problem(random_psd(3, 3, rng), 1.0);
  const PrecoderResult eig = solve_precoder_eigen(p);
  p.r_d = outer(eig.precoder.w, eig.precoder.w);
  p.bp_threshold = 0.1;
  const PenaltyResult pen = solve_precoder_penalty(p, eig.precoder);
  EXPECT_TRUE(pen.feasible);
  EXPECT_LT(rel_err(pen.objective, eig.objective), 1e-9);
  EXPECT_LT(beampattern_deviation(pen.precoder, *p.r_d), 1e-8);
}

TEST(SolvePrecoderPenalty, MatchesSphereGridOracle) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 3; ++t) {
    const ComplexMatrix g = random_psd(3, 3, rng);
    PrecoderProblem p = plain_problem(g, 1.0);
    const PrecoderResult eig = solve_precoder_eigen(p);
    const ComplexVector a = steering_vector_ula(3, 0.5, 0.3);
    ComplexMatrix rd = outer(a, a);
    rd *= 1.0 / 3.0;
    p.r_d = rd;
    // Threshold halfway between the best achievable deviation (0) and the
    // deviation of the unconstrained optimum, so the constraint is active.
    p.bp_threshold = 0.5 * beampattern_deviation(eig.precoder, rd);
    const PenaltyResult pen = solve_precoder_penalty(p, eig.precoder);
    const SphereGridBest grid = sphere_grid(p, 40, 80);
    ASSERT_GT(grid.value, 0.0);
    EXPECT_LT(pen.violation, 1e-2 * *p.bp_threshold);
    EXPECT_GE(pen.objective, 0.99 * grid.value) << "trial " << t;
    EXPECT_LE(pen.objective, 1.01 * grid.value) << "trial " << t;
    EXPECT_LT(pen.objective, eig.objective);
  }
}

TEST(SolvePrecoderPenalty, AcceptedIteratesNonDecreasingPerPhase) {
  std::mt19937_64 rng(13);
  const Scenario s = small_scenario(6, 1, 2, 2, 14);
  const PrecoderProblem p = make_precoder_problem(s, PhaseVector::random(4, rng), 0.5, true);
  const PenaltyResult pen = solve_precoder_penalty(p, random_precoder(6, 1.0, rng));
  ASSERT_EQ(pen.phases.size(), 4u);
  for (const auto& ph : pen.phases)
    for (std::size_t i = 1; i < ph.accepted.size(); ++i) EXPECT_GE(ph.accepted[i], ph.accepted[i - 1]);
  EXPECT_LT(rel_err(pen.precoder.power(), 1.0), 1e-12);
}

TEST(SolvePrecoderPenalty, RejectsBadInputs) {
  PrecoderProblem p = plain_problem(ComplexMatrix::identity(2), 1.0);
  EXPECT_THROW(solve_precoder_penalty(p, Precoder{ComplexVector{1.0, 0.0}}), ContractError);
  p.r_d = ComplexMatrix::identity(2);
  p.bp_threshold = 1.0;
  EXPECT_THROW(solve_precoder_penalty(p, Precoder{ComplexVector{1.0}}), ShapeError);
  PenaltyOptions o;
  o.rho_schedule = {10.0, 1.0};
  EXPECT_THROW(solve_precoder_penalty(p, Precoder{ComplexVector{1.0, 0.0}}, o), ContractError);
}

}  // namespace
}  // namespace dfrc
