// SPDX-License-Identifier: Apache-2.0
#include "dfrc/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace dfrc {

namespace {

void check_guard(std::size_t n, std::size_t k) {
  if (n > kOracleMaxElements)
    throw OracleGuardError(fmt::format("grid search refused: N = {} exceeds {} elements", n, kOracleMaxElements));
  if (k < kOracleMinLevels) throw ContractError(fmt::format("grid search: k_levels = {} is below {}", k, kOracleMinLevels));
}

// levels[n][k] is the k-th angle of element n. `circular` marks grids whose last
// level is adjacent to the first.
GridResult enumerate(const std::vector<std::vector<double>>& levels, bool circular,
                     const std::function<double(const PhaseVector&)>& f) {
  const std::size_t n = levels.size();
  const std::size_t k = n ? levels[0].size() : 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;

  std::vector<double> values(total);
  std::vector<std::size_t> digit(n, 0);
  std::vector<double> angles(n);
  GridResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t i = 0; i < n; ++i) angles[i] = levels[i][digit[i]];
    const double v = f(PhaseVector::from_angles(angles));
    values[idx] = v;
    if (v > best.value) {
      best.value = v;
      best_index = idx;
    }
    for (std::size_t i = n; i-- > 0;) {  // odometer, last element fastest
      if (++digit[i] < k) break;
      digit[i] = 0;
    }
  }

  double max_diff = 0.0;
  std::size_t stride = 1;
  for (std::size_t d = n; d-- > 0; stride *= k) {
    for (std::size_t idx = 0; idx < total; ++idx) {
      const std::size_t kd = (idx / stride) % k;
      if (kd + 1 < k) {
        max_diff = std::max(max_diff, std::abs(values[idx + stride] - values[idx]));
      } else if (circular && k > 1) {
        max_diff = std::max(max_diff, std::abs(values[idx - kd * stride] - values[idx]));
      }
    }
  }

  std::vector<double> a(n);
  std::size_t rem = best_index;
  for (std::size_t i = n; i-- > 0;) {
    a[i] = levels[i][rem % k];
    rem /= k;
  }
  best.phi = PhaseVector::from_angles(std::move(a));
  best.slack = 0.5 * static_cast<double>(n) * max_diff;
  best.evaluations = total;
  return best;
}

std::vector<std::vector<double>> uniform_levels(std::size_t n, std::size_t k) {
  std::vector<double> ring(k);
  for (std::size_t i = 0; i < k; ++i) ring[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(k);
  return std::vector<std::vector<double>>(n, ring);
}

}  // namespace

GridResult grid_search_objective(const Scenario& s, const Precoder& w, double alpha, std::size_t k_levels) {
  const std::size_t n = s.config.n_irs();
  check_guard(n, k_levels);
  s.validate();
  if (w.w.size() != s.config.n_tx) throw ShapeError("grid_search_objective: precoder has wrong length");
  return enumerate(uniform_levels(n, k_levels), true,
                   [&](const PhaseVector& phi) { return design_objective(s, w, phi, alpha); });
}

GridResult grid_search_surrogate(const QuadraticSurrogate& qs, std::size_t k_levels,
                                 const std::optional<PhaseBox>& box) {
  const std::size_t n = qs.size();
  check_guard(n, k_levels);
  const auto f = [&](const PhaseVector& phi) { return qs.value(phi); };
  if (!box) return enumerate(uniform_levels(n, k_levels), true, f);

  box->validate();
  if (box->size() != n) throw ShapeError("grid_search_surrogate: box has wrong length");
  std::vector<std::vector<double>> levels(n, std::vector<double>(k_levels));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < k_levels; ++k)
      levels[i][k] = box->lower[i] + box->width(i) * static_cast<double>(k) / static_cast<double>(k_levels - 1);
  return enumerate(levels, false, f);
}

}  // namespace dfrc
