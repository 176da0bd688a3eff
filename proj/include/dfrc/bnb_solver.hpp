// SPDX-License-Identifier: Apache-2.0
//
// Branch-and-bound maximization of a QuadraticSurrogate over the unit-modulus
// set, and the outer minorization loop built on it.
//
// A box restricts every phase to an arc [lower_n, upper_n]. Upper bounds come
// from the concave majorizer
//   phi^H Q phi <= 2 Re(phi_c^H (Q - sI) phi) - phi_c^H (Q - sI) phi_c + sN,
// valid for s >= lambda_max(Q) and tangent at the box center phi_c, which is
// linear in phi and can be maximized one arc at a time.
#pragma once

#include <optional>
#include <vector>

#include "dfrc/mm_solver.hpp"

namespace dfrc {

struct PhaseBox {
  std::vector<double> lower;
  std::vector<double> upper;
  double upper_bound = 0.0;
  PhaseVector best_phi;
  double best_value = 0.0;
  std::size_t depth = 0;

  static PhaseBox full(std::size_t n);
  static PhaseBox point(const PhaseVector& phi);
  std::size_t size() const { return lower.size(); }
  double width(std::size_t n) const { return upper[n] - lower[n]; }
  double max_width() const;
  PhaseVector center() const;
  bool contains(const PhaseVector& phi, double tol = 1e-12) const;
  void validate() const;
};

struct ArcMax {
  double angle = 0.0;
  double value = 0.0;
};

/// max over theta in [l, u] of Re(exp(-j theta) nu + exp(j theta) eta).
ArcMax arc_linear_max(cdouble nu, cdouble eta, double l, double u);

/// Certified upper bound on qs over the box. Requires Q - shift I to be NSD
/// (Gershgorin check with a Cholesky fallback); throws ContractError otherwise.
double upper_bound(const QuadraticSurrogate& qs, const PhaseBox& box, double shift);

struct BoxPoint {
  PhaseVector phi;
  double value = 0.0;
};

/// Feasible point in the box: coordinate ascent from the box center, each
/// coordinate maximized exactly over its arc, at most `sweeps` passes.
BoxPoint lower_bound(const QuadraticSurrogate& qs, const PhaseBox& box, std::size_t sweeps = 20);

/// Same coordinate ascent started from an arbitrary point in the box.
BoxPoint lower_bound_from(const QuadraticSurrogate& qs, const PhaseBox& box, const PhaseVector& start,
                          std::size_t sweeps = 20);

/// Splits the widest arc at its midpoint (lowest index among ties).
std::pair<PhaseBox, PhaseBox> branch(const PhaseBox& box);

struct BnbOptions {
  /// Absolute gap tolerance; default 1e-3 * |incumbent at the root|.
  std::optional<double> epsilon;
  std::size_t max_nodes = 100000;
  /// Concavity shift; default Gershgorin upper bound on lambda_max(Q).
  std::optional<double> shift;
  /// Extra incumbent candidate evaluated (and polished) at the root.
  std::optional<PhaseVector> warm_start;
  std::size_t polish_sweeps = 20;
  bool record_history = false;
};

struct BnbEvent {
  std::size_t node = 0;   // expansion counter
  std::size_t depth = 0;  // depth of the expanded box
  double box_gap = 0.0;   // upper bound minus best feasible value of the box
  double incumbent_value = 0.0;
  double global_upper_bound = 0.0;
};

struct BnbReport {
  PhaseVector incumbent;
  double incumbent_value = 0.0;
  double global_upper_bound = 0.0;
  double gap = 0.0;
  double epsilon = 0.0;
  std::size_t nodes_expanded = 0;
  std::size_t nodes_pruned = 0;
  bool hit_node_limit = false;
  std::int64_t wall_ns = 0;
  std::vector<BnbEvent> history;
};

BnbReport solve_bnb(const QuadraticSurrogate& qs, const BnbOptions& options);
BnbReport solve_bnb(const QuadraticSurrogate& qs, double epsilon, std::size_t max_nodes);

struct MbnbOptions {
  double tol = 1e-8;  // relative change of the true objective between outer steps
  std::size_t max_iter = 200;
  /// Inner gap tolerance relative to |surrogate at the expansion point|.
  double relative_epsilon = 1e-3;
  std::size_t max_nodes = 100000;
  IterateObserver observer;
};

struct MbnbResult : PhaseSolveResult {
  std::size_t node_limit_hits = 0;  // inner solves that stopped on max_nodes
  std::size_t nodes_expanded = 0;
};

/// Outer minorization loop: the quadratic surrogate tangent at the current
/// iterate is maximized by solve_bnb, warm-started at that iterate, so the
/// true objective never decreases.
MbnbResult solve_mbnb(const Scenario& s, const Precoder& w, const PhaseVector& phi0, double alpha,
                      const MbnbOptions& options = {});

}  // namespace dfrc
