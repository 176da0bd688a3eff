// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive phase-grid search at desk scale (N <= 4). Ground truth for the
// solver tests.
#pragma once

#include <optional>

#include "dfrc/bnb_solver.hpp"
#include "dfrc/mm_solver.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

inline constexpr std::size_t kOracleMaxElements = 4;
inline constexpr std::size_t kOracleMinLevels = 8;

struct GridResult {
  PhaseVector phi;
  double value = 0.0;
  /// Discretization allowance: 0.5 * N * (largest change between grid neighbours).
  double slack = 0.0;
  std::size_t evaluations = 0;
};

/// Evaluates design_objective at angles 2 pi k / K for every element
/// (K^N points). Ties resolve to the lowest lexicographic grid index.
/// Throws OracleGuardError for N > 4 and ContractError for K < 8.
GridResult grid_search_objective(const Scenario& s, const Precoder& w, double alpha, std::size_t k_levels);

/// Same enumeration on a quadratic surrogate. With a box, each arc is sampled
/// at K equally spaced angles including both endpoints.
GridResult grid_search_surrogate(const QuadraticSurrogate& qs, std::size_t k_levels,
                                 const std::optional<PhaseBox>& box = std::nullopt);

}  // namespace dfrc
