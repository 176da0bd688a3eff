// SPDX-License-Identifier: Apache-2.0
#include "dfrc/phase_vector.hpp"

#include <algorithm>
#include <cmath>

namespace dfrc {

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod can land exactly on 2pi after the correction for tiny negatives.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

PhaseVector PhaseVector::from_angles(std::vector<double> angles) {
  PhaseVector p;
  p.values_ = ComplexVector(angles.size());
  for (std::size_t n = 0; n < angles.size(); ++n) {
    angles[n] = wrap_angle(angles[n]);
    p.values_[n] = std::polar(1.0, angles[n]);
  }
  p.angles_ = std::move(angles);
  return p;
}

PhaseVector PhaseVector::from_complex(const ComplexVector& values) {
  std::vector<double> angles(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    angles[n] = values[n] == cdouble{} ? 0.0 : std::arg(values[n]);
  }
  return from_angles(std::move(angles));
}

PhaseVector PhaseVector::random(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, kTwoPi);
  std::vector<double> angles(n);
  for (auto& a : angles) a = dist(rng);
  return from_angles(std::move(angles));
}

double PhaseVector::modulus_error() const {
  double err = 0.0;
  for (const auto& v : values_) err = std::max(err, std::abs(std::abs(v) - 1.0));
  return err;
}

}  // namespace dfrc
