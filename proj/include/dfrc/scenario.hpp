// SPDX-License-Identifier: Apache-2.0
//
// System model of the IRS-aided dual-function radar-communication link: a
// collocated N_T-transmit / N_R-receive ULA radar, an N-element planar IRS that
// provides the only path to the target, and a single-antenna user reached both
// directly and through the IRS.
#pragma once

#include <cstdint>
#include <vector>

#include "dfrc/numerics.hpp"
#include "dfrc/phase_vector.hpp"

namespace dfrc {

struct ScenarioConfig {
  std::size_t n_tx = 16;
  std::size_t n_rx = 1;
  /// IRS grid; n_irs() == irs_rows * irs_cols.
  std::size_t irs_rows = 6;
  std::size_t irs_cols = 6;
  double element_spacing = 0.5;  // d / lambda
  double target_azimuth = 0.5;   // radians, (-pi, pi]
  double target_elevation = 0.2; // radians, (-pi/2, pi/2)
  double power_budget = 1.0;     // watts (30 dBm)
  double radar_noise_power = 1.0;
  double user_noise_power = 1.0;
  cdouble cascaded_gain{0.01, 0.0};
  double irs_pathloss = 1.0;
  double beampattern_threshold = 1.0;
  /// Directions used to build the desired covariance R_D.
  std::vector<double> desired_angles{0.0};
  std::uint64_t rng_seed = 1;

  std::size_t n_irs() const { return irs_rows * irs_cols; }

  /// Throws ContractError naming the offending field.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct Channels {
  ComplexMatrix h_ul;  // N_R x N, IRS -> radar receiver
  ComplexMatrix h_dl;  // N x N_T, radar transmitter -> IRS
  ComplexVector f_user;  // N, user <- IRS
  ComplexVector g_user;  // N_T, user <- radar (direct)
  ComplexVector a_irs;   // N, IRS steering vector toward the target

  friend bool operator==(const Channels&, const Channels&) = default;
};

struct Scenario {
  ScenarioConfig config;
  Channels channels;

  /// Checks channel dimensions against the config and |a_irs[n]| = 1.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Radar precoding vector, kept on the power sphere ||w||^2 = P_R.
struct Precoder {
  ComplexVector w;

  /// Rescales `w` so that ||w||^2 == power. A zero vector stays zero.
  static Precoder normalized(ComplexVector w, double power);
  double power() const { return squared_norm(w); }

  friend bool operator==(const Precoder&, const Precoder&) = default;
};

/// Planar-array steering vector, row-major over the (p, q) grid:
///   a[p * n_z + q] = exp(j 2pi d (p sin(az) cos(el) + q sin(el))).
ComplexVector steering_vector_upa(std::size_t n_y, std::size_t n_z, double d_over_lambda,
                                  double azimuth, double elevation);

/// ULA steering vector a[k] = exp(j 2pi d k sin(theta)).
ComplexVector steering_vector_ula(std::size_t n, double d_over_lambda, double theta);

/// C_T = beta * H_ul diag(a) phi * phi^T diag(a) H_dl  (N_R x N_T, rank one).
ComplexMatrix build_cascaded_target_channel(const Scenario& s, const PhaseVector& phi);

/// c_U with c_U^T = sqrt(beta_H) phi^T diag(f) H_dl + g^T.
ComplexVector build_user_channel(const Scenario& s, const PhaseVector& phi);

/// ||C_T w||^2 / sigma_R^2.
double radar_snr(const Scenario& s, const Precoder& w, const PhaseVector& phi);
/// |c_U^T w|^2 / sigma_U^2.
double comm_snr(const Scenario& s, const Precoder& w, const PhaseVector& phi);
/// alpha * radar_snr + (1 - alpha) * comm_snr.
double design_objective(const Scenario& s, const Precoder& w, const PhaseVector& phi, double alpha);

/// R_D = (P_R / (N_T K)) sum_k a(theta_k) a(theta_k)^H, so that tr(R_D) = P_R.
ComplexMatrix desired_covariance(const Scenario& s, const std::vector<double>& desired_angles);

/// Draws i.i.d. CN(0, 1) entries for H_ul, H_dl, f and g from cfg.rng_seed.
Scenario generate_random_scenario(const ScenarioConfig& cfg);

/// Factors n into rows x cols with rows the largest divisor <= sqrt(n).
std::pair<std::size_t, std::size_t> factor_grid(std::size_t n);

double dbm_to_watts(double dbm);

}  // namespace dfrc
