// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>

#include "dfrc/scenario.hpp"
#include "dfrc/scenario_io.hpp"
#include "test_support.hpp"

namespace dfrc {
namespace {

using testing::random_precoder;
using testing::random_vector;
using testing::rel_err;
using testing::small_scenario;

// Scenario with every channel set to scalar 1 and a single IRS element.
Scenario scalar_chain(cdouble beta) {
  ScenarioConfig c;
  c.n_tx = 1;
  c.n_rx = 1;
  c.irs_rows = 1;
  c.irs_cols = 1;
  c.cascaded_gain = beta;
  Scenario s;
  s.config = c;
  s.channels.h_ul = ComplexMatrix{{1.0}};
  s.channels.h_dl = ComplexMatrix{{1.0}};
  s.channels.f_user = ComplexVector{1.0};
  s.channels.g_user = ComplexVector{0.0};
  s.channels.a_irs = ComplexVector{1.0};
  return s;
}

TEST(SteeringVectorUpa, BroadsideIsAllOnes) {
  const ComplexVector a = steering_vector_upa(3, 4, 0.5, 0.0, 0.0);
  ASSERT_EQ(a.size(), 12u);
  for (const auto& z : a) EXPECT_EQ(z, cdouble(1.0));
}

TEST(SteeringVectorUpa, SingleElement) {
  const ComplexVector a = steering_vector_upa(1, 1, 0.5, 0.7, -0.3);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0], cdouble(1.0));
}

TEST(SteeringVectorUpa, RowMajorFlattening) {
  const ComplexVector a = steering_vector_upa(2, 2, 0.5, kPi / 2, 0.0);
  const cdouble expected[] = {1.0, 1.0, -1.0, -1.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(std::abs(a[i] - expected[i]), 1e-12) << i;
}

TEST(SteeringVectorUpa, UnitModulus) {
  const ComplexVector a = steering_vector_upa(5, 7, 0.5, 0.4, 0.9);
  for (const auto& z : a) EXPECT_NEAR(std::abs(z), 1.0, 1e-14);
}

TEST(CascadedTargetChannel, ZeroGainGivesZeroMatrix) {
  Scenario s = small_scenario(4, 3, 2, 2, 7);
  s.config.cascaded_gain = 0.0;
  std::mt19937_64 rng(1);
  const ComplexMatrix ct = build_cascaded_target_channel(s, PhaseVector::random(4, rng));
  EXPECT_EQ(max_abs(ct), 0.0);
}

TEST(CascadedTargetChannel, ScalarChain) {
  const Scenario s = scalar_chain({0.3, -0.2});
  const ComplexMatrix ct = build_cascaded_target_channel(s, PhaseVector::zeros(1));
  ASSERT_EQ(ct.rows(), 1u);
  ASSERT_EQ(ct.cols(), 1u);
  EXPECT_LT(std::abs(ct(0, 0) - cdouble(0.3, -0.2)), 1e-15);
}

TEST(CascadedTargetChannel, MatchesLiteralMatrixProduct) {
  Scenario s = small_scenario(3, 2, 2, 2, 8);
  s.config.cascaded_gain = {0.4, 0.1};
  std::mt19937_64 rng(2);
  const PhaseVector phi = PhaseVector::random(4, rng);
  const ComplexMatrix big_phi = ComplexMatrix::diagonal(phi.values());
  const ComplexVector& a = s.channels.a_irs;
  const ComplexMatrix aat = outer(a, conj(a));  // a a^T
  const ComplexMatrix literal =
      s.config.cascaded_gain * matmul(matmul(matmul(matmul(s.channels.h_ul, big_phi), aat), big_phi), s.channels.h_dl);
  const ComplexMatrix ct = build_cascaded_target_channel(s, phi);
  for (std::size_t i = 0; i < ct.rows(); ++i)
    for (std::size_t j = 0; j < ct.cols(); ++j) EXPECT_LT(std::abs(ct(i, j) - literal(i, j)), 1e-12);
}

TEST(CascadedTargetChannel, NumericallyRankOne) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = small_scenario(6, 4, 3, 3, seed);
    const ComplexMatrix ct = build_cascaded_target_channel(s, PhaseVector::random(9, rng));
    const ComplexMatrix gram = matmul(adjoint(ct), ct);
    const EigResult first = dominant_eigpair(gram);
    ASSERT_TRUE(first.converged);
    // Deflating the dominant right singular vector leaves C_T (I - v v^H),
    // whose Frobenius norm bounds the second singular value from above.
    const ComplexMatrix deflated = ct - matmul(ct, outer(first.vector, first.vector));
    EXPECT_LE(frobenius_norm(deflated), 1e-10 * std::sqrt(first.value));
  }
}

TEST(CascadedTargetChannel, ShapeMismatchThrows) {
  const Scenario s = small_scenario(2, 1, 2, 2, 1);
  EXPECT_THROW(build_cascaded_target_channel(s, PhaseVector::zeros(3)), ShapeError);
  EXPECT_THROW(build_user_channel(s, PhaseVector::zeros(5)), ShapeError);
}

TEST(UserChannel, IrsPathOffGivesDirectChannel) {
  Scenario s = small_scenario(4, 1, 2, 3, 9);
  s.config.irs_pathloss = 0.0;
  std::mt19937_64 rng(4);
  EXPECT_EQ(build_user_channel(s, PhaseVector::random(6, rng)), s.channels.g_user);
}

TEST(UserChannel, ScalarChainWithOnesRow) {
  ScenarioConfig c;
  c.n_tx = 3;
  c.irs_rows = c.irs_cols = 1;
  c.irs_pathloss = 0.25;
  Scenario s;
  s.config = c;
  s.channels.h_ul = ComplexMatrix(1, 1, 1.0);
  s.channels.h_dl = ComplexMatrix(1, 3, 1.0);
  s.channels.f_user = ComplexVector{1.0};
  s.channels.g_user = ComplexVector(3);
  s.channels.a_irs = ComplexVector{1.0};
  const ComplexVector cu = build_user_channel(s, PhaseVector::zeros(1));
  for (const auto& z : cu) EXPECT_LT(std::abs(z - 0.5), 1e-15);
}

TEST(UserChannel, MatchesLiteralMatrixProduct) {
  Scenario s = small_scenario(5, 1, 2, 2, 10);
  s.config.irs_pathloss = 0.7;
  std::mt19937_64 rng(5);
  const PhaseVector phi = PhaseVector::random(4, rng);
  // c_U^T = sqrt(beta_H) f^T Phi H_dl + g^T
  const ComplexMatrix big_phi = ComplexMatrix::diagonal(phi.values());
  const ComplexVector row = vecmat(s.channels.f_user, matmul(big_phi, s.channels.h_dl));
  const ComplexVector cu = build_user_channel(s, phi);
  for (std::size_t i = 0; i < 5; ++i)
    EXPECT_LT(std::abs(cu[i] - (std::sqrt(0.7) * row[i] + s.channels.g_user[i])), 1e-12);
}

TEST(RadarSnr, ZeroGainGivesZero) {
  Scenario s = small_scenario(4, 2, 2, 2, 11);
  s.config.cascaded_gain = 0.0;
  std::mt19937_64 rng(6);
  EXPECT_EQ(radar_snr(s, random_precoder(4, 1.0, rng), PhaseVector::random(4, rng)), 0.0);
}

TEST(RadarSnr, ScalarChainGivesSquaredGain) {
  const Scenario s = scalar_chain({0.6, 0.8});
  EXPECT_NEAR(radar_snr(s, Precoder{ComplexVector{1.0}}, PhaseVector::zeros(1)), 1.0, 1e-14);
  const Scenario t = scalar_chain({0.3, 0.0});
  EXPECT_NEAR(radar_snr(t, Precoder{ComplexVector{1.0}}, PhaseVector::zeros(1)), 0.09, 1e-15);
}

TEST(RadarSnr, MatchesFactoredForm) {
  std::mt19937_64 rng(7);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario s = small_scenario(4, 3, 2, 3, seed);
    s.config.cascaded_gain = {0.2, 0.5};
    s.config.radar_noise_power = 0.3;
    const PhaseVector phi = PhaseVector::random(6, rng);
    const Precoder w = random_precoder(4, 2.0, rng);
    const ComplexVector weighted = hadamard(s.channels.a_irs, phi.values());
    const double left = squared_norm(matvec(s.channels.h_ul, weighted));
    const double right = std::norm(dotu(vecmat(weighted, s.channels.h_dl), w.w));
    const double expected = std::norm(s.config.cascaded_gain) / 0.3 * left * right;
    EXPECT_LT(rel_err(radar_snr(s, w, phi), expected), 1e-10);
  }
}

TEST(RadarSnr, ScalingInvariance) {
  std::mt19937_64 rng(8);
  Scenario s = small_scenario(4, 2, 2, 2, 12);
  const PhaseVector phi = PhaseVector::random(4, rng);
  const Precoder w = random_precoder(4, 1.0, rng);
  const double base = radar_snr(s, w, phi);
  s.config.radar_noise_power *= 7.0;
  s.config.cascaded_gain *= std::sqrt(7.0);
  EXPECT_LT(rel_err(radar_snr(s, w, phi), base), 1e-12);
}

TEST(CommSnr, OrthogonalPrecoderGivesZero) {
  const Scenario s = small_scenario(2, 1, 2, 2, 13);
  const PhaseVector phi = PhaseVector::zeros(4);
  const ComplexVector cu = build_user_channel(s, phi);
  // c_U^T w = 0 for w = (c_U[1], -c_U[0]).
  const Precoder w{ComplexVector{cu[1], -cu[0]}};
  EXPECT_LT(comm_snr(s, w, phi), 1e-24);
}

TEST(CommSnr, DirectPathOnly) {
  Scenario s = small_scenario(3, 1, 2, 2, 14);
  s.config.irs_pathloss = 0.0;
  s.config.user_noise_power = 0.5;
  std::mt19937_64 rng(9);
  const Precoder w = random_precoder(3, 1.0, rng);
  EXPECT_LT(rel_err(comm_snr(s, w, PhaseVector::random(4, rng)), std::norm(dotu(s.channels.g_user, w.w)) / 0.5),
            1e-12);
}

TEST(CommSnr, MatchesFactoredForm) {
  std::mt19937_64 rng(10);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Scenario s = small_scenario(4, 1, 3, 2, seed);
    s.config.irs_pathloss = 0.4;
    s.config.user_noise_power = 2.0;
    const PhaseVector phi = PhaseVector::random(6, rng);
    const Precoder w = random_precoder(4, 1.0, rng);
    ComplexVector u = hadamard(s.channels.f_user, matvec(s.channels.h_dl, w.w));
    u *= std::sqrt(0.4);
    const cdouble v = dotu(s.channels.g_user, w.w);
    EXPECT_LT(rel_err(comm_snr(s, w, phi), std::norm(dotu(phi.values(), u) + v) / 2.0), 1e-10);
  }
}

TEST(DesignObjective, EndpointsAndMidpoint) {
  std::mt19937_64 rng(11);
  const Scenario s = small_scenario(4, 2, 2, 2, 15);
  const PhaseVector phi = PhaseVector::random(4, rng);
  const Precoder w = random_precoder(4, 1.0, rng);
  const double gr = radar_snr(s, w, phi), gu = comm_snr(s, w, phi);
  EXPECT_EQ(design_objective(s, w, phi, 1.0), gr);
  EXPECT_EQ(design_objective(s, w, phi, 0.0), gu);
  EXPECT_NEAR(design_objective(s, w, phi, 0.5), 0.5 * (gr + gu), 1e-14 * (gr + gu));
}

TEST(DesignObjective, WeightedArithmetic) {
  // gamma_R = 4 and gamma_U = 2 on scalar chains.
  Scenario s = scalar_chain(2.0);
  s.channels.g_user = ComplexVector{std::sqrt(2.0) - 1.0};
  s.config.irs_pathloss = 1.0;
  const Precoder w{ComplexVector{1.0}};
  const PhaseVector phi = PhaseVector::zeros(1);
  ASSERT_NEAR(radar_snr(s, w, phi), 4.0, 1e-14);
  ASSERT_NEAR(comm_snr(s, w, phi), 2.0, 1e-14);
  EXPECT_NEAR(design_objective(s, w, phi, 0.5), 3.0, 1e-14);
}

TEST(Snr, NonNegativeOnRandomInputs) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 100; ++t) {
    const Scenario s = small_scenario(3, 2, 2, 2, 100 + t);
    const PhaseVector phi = PhaseVector::random(4, rng);
    const Precoder w = random_precoder(3, 1.0, rng);
    EXPECT_GE(radar_snr(s, w, phi), 0.0);
    EXPECT_GE(comm_snr(s, w, phi), 0.0);
  }
}

TEST(DesiredCovariance, SingleAngleIsRankOne) {
  Scenario s = small_scenario(6, 1, 2, 2, 16);
  s.config.power_budget = 6.0;
  const ComplexMatrix rd = desired_covariance(s, {0.4});
  const ComplexVector a = steering_vector_ula(6, 0.5, 0.4);
  EXPECT_LT(max_abs(rd - outer(a, a)), 1e-13);
  EXPECT_NEAR(trace(rd).real(), 6.0, 1e-12);
}

TEST(DesiredCovariance, TraceEqualsPowerBudget) {
  Scenario s = small_scenario(5, 1, 2, 2, 17);
  s.config.power_budget = 2.5;
  for (const auto& angles : std::vector<std::vector<double>>{{0.0}, {-0.3, 0.6}, {0.1, 0.2, 1.0}}) {
    const ComplexMatrix rd = desired_covariance(s, angles);
    EXPECT_NEAR(trace(rd).real(), 2.5, 1e-12);
    EXPECT_TRUE(is_hermitian(rd));
  }
}

TEST(DesiredCovariance, SymmetricAnglesGiveRealMatrix) {
  const Scenario s = small_scenario(7, 1, 2, 2, 18);
  const ComplexMatrix rd = desired_covariance(s, {0.35, -0.35});
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      EXPECT_NEAR(rd(i, j).imag(), 0.0, 1e-14);
      EXPECT_NEAR(rd(i, j).real(), rd(j, i).real(), 1e-14);
    }
}

TEST(DesiredCovariance, EmptyAngleListThrows) {
  const Scenario s = small_scenario(2, 1, 1, 2, 19);
  EXPECT_THROW(desired_covariance(s, {}), ContractError);
}

TEST(GenerateRandomScenario, DeterministicGivenSeed) {
  const Scenario a = small_scenario(4, 2, 3, 3, 42);
  const Scenario b = small_scenario(4, 2, 3, 3, 42);
  EXPECT_EQ(a, b);
  EXPECT_NO_THROW(a.validate());
}

TEST(GenerateRandomScenario, DifferentSeedsDiffer) {
  EXPECT_NE(small_scenario(4, 2, 3, 3, 42).channels, small_scenario(4, 2, 3, 3, 43).channels);
}

TEST(GenerateRandomScenario, UnitVarianceEntries) {
  // 10^4 draws of one H_dl entry across seeds, plus the full f vector.
  double acc = 0.0, mean_re = 0.0;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) {
    const Scenario s = small_scenario(1, 1, 1, 1, 5000 + t);
    acc += std::norm(s.channels.h_dl(0, 0));
    mean_re += s.channels.h_dl(0, 0).real();
  }
  EXPECT_NEAR(acc / draws, 1.0, 0.05);
  EXPECT_NEAR(mean_re / draws, 0.0, 0.05);
}

TEST(GenerateRandomScenario, InvalidConfigRejected) {
  ScenarioConfig c;
  c.power_budget = 0.0;
  EXPECT_THROW(generate_random_scenario(c), ContractError);
  c = {};
  c.target_elevation = kPi / 2;
  EXPECT_THROW(generate_random_scenario(c), ContractError);
  c = {};
  c.target_azimuth = -kPi;
  EXPECT_THROW(generate_random_scenario(c), ContractError);
  c = {};
  c.target_azimuth = kPi;
  EXPECT_NO_THROW(c.validate());
}

TEST(FactorGrid, LargestDivisorBelowRoot) {
  EXPECT_EQ(factor_grid(36), (std::pair<std::size_t, std::size_t>{6, 6}));
  EXPECT_EQ(factor_grid(16), (std::pair<std::size_t, std::size_t>{4, 4}));
  EXPECT_EQ(factor_grid(12), (std::pair<std::size_t, std::size_t>{3, 4}));
  EXPECT_EQ(factor_grid(7), (std::pair<std::size_t, std::size_t>{1, 7}));
}

TEST(DbmToWatts, ThirtyDbmIsOneWatt) {
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_NEAR(dbm_to_watts(0.0), 1e-3, 1e-18);
}

TEST(ScenarioJson, RoundTripIsExact) {
  Scenario s = small_scenario(3, 2, 2, 3, 77);
  s.config.cascaded_gain = {0.123456789012345, -1e-7};
  s.config.desired_angles = {0.1, -0.2};
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(back, s);
}

TEST(ScenarioJson, FileRoundTrip) {
  const Scenario s = small_scenario(2, 1, 2, 2, 78);
  const auto path = std::filesystem::temp_directory_path() / "dfrc_scenario_roundtrip.json";
  save_scenario(s, path);
  EXPECT_EQ(load_scenario(path), s);
  std::filesystem::remove(path);
}

TEST(ScenarioJson, UnknownKeyRejected) {
  json j = scenario_config_to_json(ScenarioConfig{});
  j["n_txx"] = 3;
  try {
    scenario_config_from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("n_txx"), std::string::npos);
  }
}

TEST(ScenarioJson, WrongTypeNamesField) {
  json j = json::object();
  j["power_budget"] = "lots";
  try {
    scenario_config_from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("scenario.power_budget"), std::string::npos);
  }
}

TEST(ScenarioJson, DefaultsForAbsentFields) {
  EXPECT_EQ(scenario_config_from_json(json::object()), ScenarioConfig{});
}

TEST(ScenarioJson, DimensionMismatchRejected) {
  json j = scenario_to_json(small_scenario(2, 1, 2, 2, 79));
  j["channels"]["g_user"] = vector_to_json(ComplexVector(5));
  EXPECT_ANY_THROW(scenario_from_json(j));
}

TEST(ScenarioJson, SyntaxErrorCarriesLine) {
  try {
    parse_json_document("{\n  \"a\": 1,\n  \"b\": ]\n}", "doc.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("doc.json"), std::string::npos) << msg;
    EXPECT_NE(msg.find("doc.json:3:"), std::string::npos) << msg;
  }
}

}  // namespace
}  // namespace dfrc
