// SPDX-License-Identifier: Apache-2.0
#include "dfrc/bnb_solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace dfrc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_surrogate(const QuadraticSurrogate& qs, std::size_t n, const char* who) {
  if (qs.q_mat.rows() != n || qs.q_mat.cols() != n || qs.lin_h.size() != n || qs.lin_t.size() != n)
    throw ShapeError(fmt::format("{}: surrogate and box sizes differ", who));
}

// Angle equivalent to a modulo 2pi that lies in [l, l + 2pi).
double lift_into(double a, double l) {
  double d = std::fmod(a - l, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  return l + d;
}

}  // namespace

// ---------------------------------------------------------------------------
// PhaseBox
// ---------------------------------------------------------------------------

PhaseBox PhaseBox::full(std::size_t n) {
  PhaseBox b;
  b.lower.assign(n, 0.0);
  b.upper.assign(n, kTwoPi);
  return b;
}

PhaseBox PhaseBox::point(const PhaseVector& phi) {
  PhaseBox b;
  b.lower = phi.angles();
  b.upper = phi.angles();
  return b;
}

double PhaseBox::max_width() const {
  double w = 0.0;
  for (std::size_t n = 0; n < size(); ++n) w = std::max(w, width(n));
  return w;
}

PhaseVector PhaseBox::center() const {
  std::vector<double> a(size());
  for (std::size_t n = 0; n < size(); ++n) a[n] = 0.5 * (lower[n] + upper[n]);
  return PhaseVector::from_angles(std::move(a));
}

bool PhaseBox::contains(const PhaseVector& phi, double tol) const {
  if (phi.size() != size()) return false;
  for (std::size_t n = 0; n < size(); ++n) {
    if (width(n) >= kTwoPi - tol) continue;
    double a = lift_into(phi.angle(n), lower[n]);
    // An angle just below lower[n] lifts to almost lower[n] + 2pi.
    if (a > lower[n] + kTwoPi - tol) a -= kTwoPi;
    if (a < lower[n] - tol || a > upper[n] + tol) return false;
  }
  return true;
}

void PhaseBox::validate() const {
  if (lower.size() != upper.size()) throw ShapeError("PhaseBox: lower and upper differ in length");
  for (std::size_t n = 0; n < size(); ++n) {
    const double w = width(n);
    if (!std::isfinite(lower[n]) || !std::isfinite(upper[n]) || w < 0.0 || w > kTwoPi + 1e-12)
      throw ContractError(fmt::format("PhaseBox: arc {} has invalid width {}", n, w));
  }
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

ArcMax arc_linear_max(cdouble nu, cdouble eta, double l, double u) {
  // Re(e^{-j theta} nu + e^{j theta} eta) = Re(e^{-j theta} z) = R cos(theta - arg z).
  const cdouble z = nu + std::conj(eta);
  const double r = std::abs(z);
  const auto at = [&](double theta) { return std::real(std::polar(1.0, -theta) * z); };
  if (r == 0.0) return {l, 0.0};
  const double peak = lift_into(std::arg(z), l);
  if (peak <= u) return {peak, r};
  const double vl = at(l);
  const double vu = at(u);
  return vl >= vu ? ArcMax{l, vl} : ArcMax{u, vu};
}

double upper_bound(const QuadraticSurrogate& qs, const PhaseBox& box, double shift) {
  const std::size_t n = box.size();
  check_surrogate(qs, n, "upper_bound");
  const double scale = std::max(1.0, max_abs(qs.q_mat));
  if (shift < largest_eig_upper_bound(qs.q_mat) - 1e-12 * scale) {
    ComplexMatrix neg(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) neg(i, j) = -qs.q_mat(i, j);
    for (std::size_t i = 0; i < n; ++i) neg(i, i) += shift;
    if (!is_positive_semidefinite(neg, 1e-10 * scale))
      throw ContractError(fmt::format("upper_bound: Q - {} I is not negative semidefinite", shift));
  }

  const PhaseVector c = box.center();
  const auto& pc = c.values();
  ComplexVector qc = matvec(qs.q_mat, pc);
  for (std::size_t i = 0; i < n; ++i) qc[i] -= shift * pc[i];  // (Q - shift I) phi_c

  double bound = qs.const_term + shift * static_cast<double>(n) - dot(pc, qc).real();
  for (std::size_t i = 0; i < n; ++i)
    bound += arc_linear_max(2.0 * qc[i] + qs.lin_h[i], qs.lin_t[i], box.lower[i], box.upper[i]).value;
  return bound;
}

BoxPoint lower_bound_from(const QuadraticSurrogate& qs, const PhaseBox& box, const PhaseVector& start,
                          std::size_t sweeps) {
  const std::size_t n = box.size();
  check_surrogate(qs, n, "lower_bound");
  if (start.size() != n) throw ShapeError("lower_bound: start has wrong length");

  std::vector<double> ang = start.angles();
  ComplexVector x = start.values();
  ComplexVector qx = matvec(qs.q_mat, x);
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t k = 0; k < n; ++k) {
      // Surrogate as a function of phi_k alone: Re(conj(phi_k) nu_k + phi_k eta_k) + const.
      const cdouble nu = 2.0 * (qx[k] - qs.q_mat(k, k) * x[k]) + qs.lin_h[k];
      const cdouble eta = qs.lin_t[k];
      const ArcMax best = arc_linear_max(nu, eta, box.lower[k], box.upper[k]);
      const double current = std::real(std::conj(x[k]) * nu + x[k] * eta);
      if (best.value <= current + 1e-15 * std::max(1.0, std::abs(current))) continue;
      const cdouble xn = std::polar(1.0, best.angle);
      const cdouble dx = xn - x[k];
      for (std::size_t m = 0; m < n; ++m) qx[m] += qs.q_mat(m, k) * dx;
      x[k] = xn;
      ang[k] = best.angle;
      moved = true;
    }
    if (!moved) break;
  }
  BoxPoint out;
  out.phi = PhaseVector::from_angles(std::move(ang));
  out.value = qs.value(out.phi);
  const double v0 = qs.value(start);
  if (v0 > out.value) {
    out.phi = start;
    out.value = v0;
  }
  return out;
}

BoxPoint lower_bound(const QuadraticSurrogate& qs, const PhaseBox& box, std::size_t sweeps) {
  box.validate();
  return lower_bound_from(qs, box, box.center(), sweeps);
}

std::pair<PhaseBox, PhaseBox> branch(const PhaseBox& box) {
  std::size_t k = 0;
  for (std::size_t n = 1; n < box.size(); ++n)
    if (box.width(n) > box.width(k)) k = n;
  if (box.size() == 0 || !(box.width(k) > 0.0)) throw ContractError("branch: box has no arc of positive width");
  const double mid = 0.5 * (box.lower[k] + box.upper[k]);
  PhaseBox left;
  left.lower = box.lower;
  left.upper = box.upper;
  left.depth = box.depth + 1;
  PhaseBox right = left;
  left.upper[k] = mid;
  right.lower[k] = mid;
  return {std::move(left), std::move(right)};
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

namespace {

struct Node {
  double ub;
  std::size_t depth;
  std::size_t seq;
  PhaseBox box;
};

struct NodeOrder {
  // priority_queue pops the largest: highest bound, then deepest, then oldest.
  bool operator()(const Node& a, const Node& b) const {
    if (a.ub != b.ub) return a.ub < b.ub;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

}  // namespace

BnbReport solve_bnb(const QuadraticSurrogate& qs, const BnbOptions& options) {
  const Stopwatch clock;
  const std::size_t n = qs.size();
  check_surrogate(qs, n, "solve_bnb");
  if (options.epsilon && !(*options.epsilon > 0.0)) throw ContractError("solve_bnb: epsilon must be > 0");
  if (options.max_nodes == 0) throw ContractError("solve_bnb: max_nodes must be > 0");
  const double shift = options.shift.value_or(largest_eig_upper_bound(qs.q_mat));

  PhaseBox root = PhaseBox::full(n);
  BoxPoint inc = lower_bound(qs, root, options.polish_sweeps);
  if (options.warm_start) {
    const BoxPoint ws = lower_bound_from(qs, root, *options.warm_start, options.polish_sweeps);
    if (ws.value >= inc.value) inc = ws;
  }
  root.best_phi = inc.phi;
  root.best_value = inc.value;
  root.upper_bound = std::max(upper_bound(qs, root, shift), inc.value);

  BnbReport rep;
  rep.epsilon = options.epsilon.value_or(std::max(1e-3 * std::abs(inc.value), 1e-12));
  const double eps = rep.epsilon;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> pool;
  std::size_t seq = 0;
  double pruned_max = kNegInf;
  const auto prune = [&](double ub) {
    pruned_max = std::max(pruned_max, ub);
    ++rep.nodes_pruned;
  };
  const auto global_ub = [&]() {
    double g = std::max(inc.value, pruned_max);
    if (!pool.empty()) g = std::max(g, pool.top().ub);
    return g;
  };

  if (root.upper_bound <= inc.value + eps) {
    prune(root.upper_bound);
  } else {
    pool.push(Node{root.upper_bound, 0, seq++, std::move(root)});
  }

  while (!pool.empty()) {
    if (pool.top().ub <= inc.value + eps) {
      while (!pool.empty()) {
        prune(pool.top().ub);
        pool.pop();
      }
      break;
    }
    if (rep.nodes_expanded >= options.max_nodes) {
      rep.hit_node_limit = true;
      break;
    }
    Node node = pool.top();
    pool.pop();
    ++rep.nodes_expanded;
    const double box_gap = node.ub - node.box.best_value;

    if (!(node.box.max_width() > 1e-15)) {
      prune(node.ub);
    } else {
      auto [left, right] = branch(node.box);
      for (PhaseBox* child : {&left, &right}) {
        const BoxPoint lb = lower_bound(qs, *child, options.polish_sweeps);
        child->best_phi = lb.phi;
        child->best_value = lb.value;
        if (lb.value > inc.value) inc = lb;
        child->upper_bound = std::max(std::min(upper_bound(qs, *child, shift), node.ub), lb.value);
      }
      for (PhaseBox* child : {&left, &right}) {
        if (child->upper_bound <= inc.value + eps) {
          prune(child->upper_bound);
        } else {
          const double ub = child->upper_bound;
          const std::size_t depth = child->depth;
          pool.push(Node{ub, depth, seq++, std::move(*child)});
        }
      }
    }
    if (options.record_history)
      rep.history.push_back(BnbEvent{rep.nodes_expanded, node.depth, box_gap, inc.value, global_ub()});
  }

  rep.incumbent = inc.phi;
  rep.incumbent_value = inc.value;
  rep.global_upper_bound = global_ub();
  rep.gap = rep.global_upper_bound - rep.incumbent_value;
  rep.wall_ns = clock.elapsed_ns();
  return rep;
}

BnbReport solve_bnb(const QuadraticSurrogate& qs, double epsilon, std::size_t max_nodes) {
  BnbOptions opts;
  opts.epsilon = epsilon;
  opts.max_nodes = max_nodes;
  return solve_bnb(qs, opts);
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

MbnbResult solve_mbnb(const Scenario& s, const Precoder& w, const PhaseVector& phi0, double alpha,
                      const MbnbOptions& options) {
  if (!(options.relative_epsilon > 0.0)) throw ContractError("mbnb.relative_epsilon: must be > 0");
  const Stopwatch clock;
  const QuarticFactors qf = quartic_factors(s, w);
  if (phi0.size() != qf.size()) throw ShapeError("solve_mbnb: phi0 has wrong length");
  check_quartic_identity(s, w, qf, phi0);

  MbnbResult result;
  PhaseVector phi = phi0;
  double f = qf.objective(phi, alpha);
  result.trace.initial_objective = f;
  if (options.observer) options.observer(phi);

  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const QuadraticSurrogate qs = minorize_quartic(qf, phi, alpha);
    BnbOptions bo;
    bo.epsilon = std::max(options.relative_epsilon * std::abs(qs.value(phi)), 1e-12);
    bo.max_nodes = options.max_nodes;
    bo.warm_start = phi;
    const BnbReport rep = solve_bnb(qs, bo);
    result.nodes_expanded += rep.nodes_expanded;
    if (rep.hit_node_limit) ++result.node_limit_hits;

    TraceRecord rec;
    rec.iteration = it;
    rec.gamma_r = qf.radar(rep.incumbent);
    rec.gamma_u = qf.comm(rep.incumbent);
    rec.objective = alpha * rec.gamma_r + (1.0 - alpha) * rec.gamma_u;
    rec.surrogate = rep.incumbent_value;
    rec.change_norm = phase_change_norm(rep.incumbent, phi);
    rec.step = rep.gap;
    rec.wall_ns = clock.elapsed_ns();
    result.trace.records.push_back(rec);
    if (options.observer) options.observer(rep.incumbent);

    const double rel = std::abs(rec.objective - f) / std::max(std::abs(f), 1e-300);
    phi = rep.incumbent;
    f = rec.objective;
    if (rel < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.trace.converged = result.converged;
  result.phi = std::move(phi);
  return result;
}

}  // namespace dfrc
