// SPDX-License-Identifier: Apache-2.0
#include "dfrc/scenario.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace dfrc {

namespace {

void fail(const char* field, const std::string& why) {
  throw ContractError(fmt::format("scenario.{}: {}", field, why));
}

// Circularly-symmetric complex Gaussian with unit variance.
cdouble draw_cn(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_tx < 1) fail("n_tx", "must be >= 1");
  if (n_rx < 1) fail("n_rx", "must be >= 1");
  if (irs_rows < 1 || irs_cols < 1) fail("n_irs", "IRS grid dimensions must be >= 1");
  if (!(element_spacing > 0.0)) fail("element_spacing", "must be > 0");
  if (!(target_azimuth > -kPi && target_azimuth <= kPi)) fail("target_azimuth", "must lie in (-pi, pi]");
  if (!(target_elevation > -kPi / 2 && target_elevation < kPi / 2))
    fail("target_elevation", "must lie in (-pi/2, pi/2)");
  if (!(power_budget > 0.0)) fail("power_budget", "must be > 0");
  if (!(radar_noise_power > 0.0)) fail("radar_noise_power", "must be > 0");
  if (!(user_noise_power > 0.0)) fail("user_noise_power", "must be > 0");
  if (!(irs_pathloss >= 0.0)) fail("irs_pathloss", "must be >= 0");
  if (!(beampattern_threshold >= 0.0)) fail("beampattern_threshold", "must be >= 0");
  if (desired_angles.empty()) fail("desired_angles", "must not be empty");
  if (!std::isfinite(cascaded_gain.real()) || !std::isfinite(cascaded_gain.imag()))
    fail("cascaded_gain", "must be finite");
}

void Scenario::validate() const {
  config.validate();
  const auto& c = channels;
  const std::size_t n = config.n_irs();
  if (c.h_ul.rows() != config.n_rx || c.h_ul.cols() != n) throw ShapeError("scenario: h_ul must be N_R x N");
  if (c.h_dl.rows() != n || c.h_dl.cols() != config.n_tx) throw ShapeError("scenario: h_dl must be N x N_T");
  if (c.f_user.size() != n) throw ShapeError("scenario: f_user must have length N");
  if (c.g_user.size() != config.n_tx) throw ShapeError("scenario: g_user must have length N_T");
  if (c.a_irs.size() != n) throw ShapeError("scenario: a_irs must have length N");
  for (const auto& a : c.a_irs)
    if (std::abs(std::abs(a) - 1.0) > 1e-12) throw ContractError("scenario: a_irs entries must be unit modulus");
}

Precoder Precoder::normalized(ComplexVector w, double power) {
  const double nw = norm(w);
  if (nw > 0.0) w *= std::sqrt(power) / nw;
  return Precoder{std::move(w)};
}

ComplexVector steering_vector_upa(std::size_t n_y, std::size_t n_z, double d_over_lambda,
                                  double azimuth, double elevation) {
  ComplexVector a(n_y * n_z);
  const double ky = std::sin(azimuth) * std::cos(elevation);
  const double kz = std::sin(elevation);
  for (std::size_t p = 0; p < n_y; ++p) {
    for (std::size_t q = 0; q < n_z; ++q) {
      const double phase = kTwoPi * d_over_lambda * (static_cast<double>(p) * ky + static_cast<double>(q) * kz);
      a[p * n_z + q] = std::polar(1.0, phase);
    }
  }
  return a;
}

ComplexVector steering_vector_ula(std::size_t n, double d_over_lambda, double theta) {
  ComplexVector a(n);
  for (std::size_t k = 0; k < n; ++k)
    a[k] = std::polar(1.0, kTwoPi * d_over_lambda * static_cast<double>(k) * std::sin(theta));
  return a;
}

ComplexMatrix build_cascaded_target_channel(const Scenario& s, const PhaseVector& phi) {
  const auto& c = s.channels;
  if (phi.size() != c.a_irs.size()) throw ShapeError("build_cascaded_target_channel: phi has wrong length");
  const ComplexVector weighted = hadamard(c.a_irs, phi.values());
  // Column factor H_ul diag(a) phi and row factor phi^T diag(a) H_dl.
  const ComplexVector col = matvec(c.h_ul, weighted);
  const ComplexVector row = vecmat(weighted, c.h_dl);
  ComplexMatrix ct(col.size(), row.size());
  for (std::size_t i = 0; i < col.size(); ++i)
    for (std::size_t j = 0; j < row.size(); ++j) ct(i, j) = s.config.cascaded_gain * col[i] * row[j];
  return ct;
}

ComplexVector build_user_channel(const Scenario& s, const PhaseVector& phi) {
  const auto& c = s.channels;
  if (phi.size() != c.f_user.size()) throw ShapeError("build_user_channel: phi has wrong length");
  ComplexVector irs = vecmat(hadamard(c.f_user, phi.values()), c.h_dl);
  irs *= std::sqrt(s.config.irs_pathloss);
  return irs + c.g_user;
}

double radar_snr(const Scenario& s, const Precoder& w, const PhaseVector& phi) {
  const ComplexVector y = matvec(build_cascaded_target_channel(s, phi), w.w);
  return squared_norm(y) / s.config.radar_noise_power;
}

double comm_snr(const Scenario& s, const Precoder& w, const PhaseVector& phi) {
  return std::norm(dotu(build_user_channel(s, phi), w.w)) / s.config.user_noise_power;
}

double design_objective(const Scenario& s, const Precoder& w, const PhaseVector& phi, double alpha) {
  return alpha * radar_snr(s, w, phi) + (1.0 - alpha) * comm_snr(s, w, phi);
}

ComplexMatrix desired_covariance(const Scenario& s, const std::vector<double>& desired_angles) {
  if (desired_angles.empty()) throw ContractError("desired_covariance: angle list is empty");
  const std::size_t nt = s.config.n_tx;
  ComplexMatrix rd(nt, nt);
  for (double theta : desired_angles) rd += outer(steering_vector_ula(nt, s.config.element_spacing, theta),
                                                  steering_vector_ula(nt, s.config.element_spacing, theta));
  // Each outer product has trace N_T, so this scaling gives tr(R_D) = P_R.
  rd *= s.config.power_budget / (static_cast<double>(nt) * static_cast<double>(desired_angles.size()));
  return rd;
}

Scenario generate_random_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_irs();
  std::mt19937_64 rng(cfg.rng_seed);
  Scenario s;
  s.config = cfg;
  auto& c = s.channels;
  c.h_ul = ComplexMatrix(cfg.n_rx, n);
  for (std::size_t i = 0; i < cfg.n_rx; ++i)
    for (std::size_t j = 0; j < n; ++j) c.h_ul(i, j) = draw_cn(rng);
  c.h_dl = ComplexMatrix(n, cfg.n_tx);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cfg.n_tx; ++j) c.h_dl(i, j) = draw_cn(rng);
  c.f_user = ComplexVector(n);
  for (auto& x : c.f_user) x = draw_cn(rng);
  c.g_user = ComplexVector(cfg.n_tx);
  for (auto& x : c.g_user) x = draw_cn(rng);
  c.a_irs = steering_vector_upa(cfg.irs_rows, cfg.irs_cols, cfg.element_spacing, cfg.target_azimuth,
                                cfg.target_elevation);
  return s;
}

std::pair<std::size_t, std::size_t> factor_grid(std::size_t n) {
  if (n == 0) return {0, 0};
  std::size_t rows = 1;
  for (std::size_t r = 1; r * r <= n; ++r)
    if (n % r == 0) rows = r;
  return {rows, n / rows};
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace dfrc
