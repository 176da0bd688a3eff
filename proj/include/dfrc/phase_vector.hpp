// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dfrc/numerics.hpp"

namespace dfrc {

/// IRS phase configuration: angles in [0, 2pi) and the matching unit-modulus
/// complex values exp(j * angle). Values are always rebuilt from the angles,
/// so the two views cannot drift apart.
class PhaseVector {
 public:
  PhaseVector() = default;

  static PhaseVector from_angles(std::vector<double> angles);
  /// Takes arg() of every entry. Zero entries map to angle 0.
  static PhaseVector from_complex(const ComplexVector& values);
  static PhaseVector zeros(std::size_t n) { return from_angles(std::vector<double>(n, 0.0)); }
  static PhaseVector random(std::size_t n, std::mt19937_64& rng);

  std::size_t size() const { return angles_.size(); }
  const std::vector<double>& angles() const { return angles_; }
  const ComplexVector& values() const { return values_; }
  double angle(std::size_t n) const { return angles_[n]; }
  cdouble operator[](std::size_t n) const { return values_[n]; }

  /// max_n ||phi_n| - 1|.
  double modulus_error() const;

  friend bool operator==(const PhaseVector&, const PhaseVector&) = default;

 private:
  std::vector<double> angles_;
  ComplexVector values_;
};

/// Maps any real angle into [0, 2pi).
double wrap_angle(double a);

}  // namespace dfrc
