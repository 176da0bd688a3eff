// SPDX-License-Identifier: Apache-2.0
#include "dfrc/numerics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dfrc/phase_vector.hpp"

namespace dfrc {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ShapeError(fmt::format("{}: size mismatch ({} vs {})", what, a, b));
}

ComplexVector random_unit_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector v(n);
  for (auto& x : v) x = {gauss(rng), gauss(rng)};
  const double nv = norm(v);
  v *= 1.0 / nv;
  return v;
}

struct PowerRun {
  EigResult best;
  bool stalled = false;
};

// Power iteration on (m + shift I). The reported value is for m itself.
PowerRun power_iterate(const ComplexMatrix& m, double shift, ComplexVector v, double abs_tol,
                       std::size_t max_iter) {
  PowerRun run;
  run.best.residual = std::numeric_limits<double>::infinity();
  v *= 1.0 / norm(v);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    ComplexVector y = matvec(m, v);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift * v[i];
    const double lambda = std::real(dot(v, y));
    double r2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) r2 += std::norm(y[i] - lambda * v[i]);
    const double r = std::sqrt(r2);
    if (r < run.best.residual) {
      run.best.value = lambda - shift;
      run.best.vector = v;
      run.best.residual = r;
    }
    run.best.iterations = it;
    if (r <= abs_tol) {
      run.best.converged = true;
      return run;
    }
    const double ny = norm(y);
    if (ny == 0.0) break;
    y *= 1.0 / ny;
    v = std::move(y);
  }
  return run;
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexVector / ComplexMatrix
// ---------------------------------------------------------------------------

bool ComplexVector::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexVector& ComplexVector::operator+=(const ComplexVector& other) {
  require_same_size(size(), other.size(), "vector +=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexVector& ComplexVector::operator-=(const ComplexVector& other) {
  require_same_size(size(), other.size(), "vector -=");
  for (std::size_t i = 0; i < size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexVector& ComplexVector::operator*=(cdouble s) {
  for (auto& x : data_) x *= s;
  return *this;
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cdouble>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const ComplexVector& d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("matrix +=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ShapeError("matrix -=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cdouble s) {
  for (auto& x : data_) x *= s;
  return *this;
}

ComplexVector operator+(ComplexVector a, const ComplexVector& b) { return a += b; }
ComplexVector operator-(ComplexVector a, const ComplexVector& b) { return a -= b; }
ComplexVector operator*(cdouble s, ComplexVector v) { return v *= s; }
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cdouble s, ComplexMatrix m) { return m *= s; }

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError(fmt::format("matmul: {}x{} times {}x{}", a.rows(), a.cols(), b.rows(), b.cols()));
  }
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cdouble aik = a(i, k);
      if (aik == cdouble{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x) {
  require_same_size(a.cols(), x.size(), "matvec");
  ComplexVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cdouble acc{};
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  return y;
}

ComplexVector vecmat(const ComplexVector& x, const ComplexMatrix& a) {
  require_same_size(a.rows(), x.size(), "vecmat");
  ComplexVector y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += x[i] * r[j];
  }
  return y;
}

ComplexMatrix adjoint(const ComplexMatrix& m) {
  ComplexMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
  return t;
}

ComplexMatrix transpose(const ComplexMatrix& m) {
  ComplexMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

ComplexVector conj(const ComplexVector& v) {
  ComplexVector c(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) c[i] = std::conj(v[i]);
  return c;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  if (!m.is_square()) throw ShapeError("hermitian_part: matrix is not square");
  ComplexMatrix h(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return h;
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (!m.is_square()) return false;
  const double scale = max_abs(m);
  double dev = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) dev = std::max(dev, std::abs(m(i, j) - std::conj(m(j, i))));
  return dev <= rel_tol * scale;
}

ComplexMatrix outer(const ComplexVector& x, const ComplexVector& y) {
  ComplexMatrix m(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) m(i, j) = x[i] * std::conj(y[j]);
  return m;
}

cdouble dot(const ComplexVector& x, const ComplexVector& y) {
  require_same_size(x.size(), y.size(), "dot");
  cdouble acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  return acc;
}

cdouble dotu(const ComplexVector& x, const ComplexVector& y) {
  require_same_size(x.size(), y.size(), "dotu");
  cdouble acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

ComplexVector hadamard(const ComplexVector& x, const ComplexVector& y) {
  require_same_size(x.size(), y.size(), "hadamard");
  ComplexVector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * y[i];
  return z;
}

double squared_norm(const ComplexVector& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

double norm(const ComplexVector& v) { return std::sqrt(squared_norm(v)); }

double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.data()) s += std::norm(x);
  return std::sqrt(s);
}

double max_abs(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& x : m.data()) s = std::max(s, std::abs(x));
  return s;
}

double max_abs(const ComplexVector& v) {
  double s = 0.0;
  for (const auto& x : v) s = std::max(s, std::abs(x));
  return s;
}

cdouble trace(const ComplexMatrix& m) {
  if (!m.is_square()) throw ShapeError("trace: matrix is not square");
  cdouble t{};
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

double quadratic_form(const ComplexMatrix& m, const ComplexVector& x) {
  if (!m.is_square()) throw ShapeError("quadratic_form: matrix is not square");
  require_same_size(m.cols(), x.size(), "quadratic_form");
  cdouble acc{};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    cdouble row_acc{};
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) row_acc += r[j] * x[j];
    acc += std::conj(x[i]) * row_acc;
  }
  return acc.real();
}

// ---------------------------------------------------------------------------
// Eigenvalue utilities
// ---------------------------------------------------------------------------

EigResult dominant_eigpair(const ComplexMatrix& m, const EigOptions& options) {
  if (!m.is_square()) throw ShapeError("dominant_eigpair: matrix is not square");
  if (!is_hermitian(m)) throw ContractError("dominant_eigpair: matrix is not Hermitian");
  if (options.max_iter < 1) throw ContractError("dominant_eigpair: max_iter must be >= 1");
  const std::size_t n = m.rows();
  if (n == 0) return EigResult{0.0, ComplexVector{}, true, 0, 0.0};

  const double abs_tol = options.tol * frobenius_norm(m);
  ComplexVector start = options.start && options.start->size() == n && norm(*options.start) > 0.0
                            ? *options.start
                            : random_unit_vector(n, options.seed);

  const std::size_t first_budget = std::max<std::size_t>(1, options.max_iter / 2);
  PowerRun plain = power_iterate(m, 0.0, start, abs_tol, first_budget);
  if (plain.best.converged && plain.best.value >= 0.0) return plain.best;

  // Either the dominant-magnitude eigenvalue is negative, or the unshifted run
  // stalled (typically on a +/- lambda pair). Shift to PSD and go again.
  double shift = 0.0;
  ComplexVector restart = plain.best.vector;
  if (plain.best.converged) {
    shift = -plain.best.value;
    restart = random_unit_vector(n, options.seed ^ 0x9e3779b97f4a7c15ULL);
  } else {
    shift = std::max(0.0, -smallest_eig_lower_bound(m));
  }
  const std::size_t second_budget = std::max<std::size_t>(1, options.max_iter - plain.best.iterations);
  PowerRun shifted = power_iterate(m, shift, restart, abs_tol, second_budget);
  shifted.best.iterations += plain.best.iterations;
  if (!shifted.best.converged && plain.best.residual < shifted.best.residual && plain.best.value >= 0.0) {
    plain.best.iterations = shifted.best.iterations;
    return plain.best;
  }
  return shifted.best;
}

double smallest_eig_lower_bound(const ComplexMatrix& m) {
  if (!m.is_square()) throw ShapeError("smallest_eig_lower_bound: matrix is not square");
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (j != i) radius += std::abs(m(i, j));
    bound = std::min(bound, m(i, i).real() - radius);
  }
  return m.rows() == 0 ? 0.0 : bound;
}

double largest_eig_upper_bound(const ComplexMatrix& m) {
  if (!m.is_square()) throw ShapeError("largest_eig_upper_bound: matrix is not square");
  double bound = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (j != i) radius += std::abs(m(i, j));
    bound = std::max(bound, m(i, i).real() + radius);
  }
  return m.rows() == 0 ? 0.0 : bound;
}

double tight_smallest_eig_lower_bound(const ComplexMatrix& m, const EigOptions& options) {
  const double gersh = smallest_eig_lower_bound(m);
  const double c = largest_eig_upper_bound(m);
  ComplexMatrix k = -1.0 * m;
  for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) += c;
  const EigResult e = dominant_eigpair(k, options);
  if (!e.converged) return gersh;
  return std::max(gersh, c - e.value - e.residual);
}

double tight_largest_eig_upper_bound(const ComplexMatrix& m, const EigOptions& options) {
  const double gersh = largest_eig_upper_bound(m);
  const double c = smallest_eig_lower_bound(m);
  ComplexMatrix k = m;
  for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) -= c;
  const EigResult e = dominant_eigpair(k, options);
  if (!e.converged) return gersh;
  return std::min(gersh, c + e.value + e.residual);
}

bool is_positive_semidefinite(const ComplexMatrix& m, double jitter) {
  if (!m.is_square()) throw ShapeError("is_positive_semidefinite: matrix is not square");
  const std::size_t n = m.rows();
  const double tiny = 1e-12 * std::max(1.0, max_abs(m));
  // Pivoted-free Cholesky with zero pivots tolerated when their column vanishes.
  ComplexMatrix l(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double d = m(k, k).real() + jitter;
    for (std::size_t j = 0; j < k; ++j) d -= std::norm(l(k, j));
    if (d < -tiny) return false;
    const bool zero_pivot = d <= tiny;
    const double lkk = zero_pivot ? 0.0 : std::sqrt(d);
    l(k, k) = lkk;
    for (std::size_t i = k + 1; i < n; ++i) {
      cdouble s = m(i, k);
      for (std::size_t j = 0; j < k; ++j) s -= l(i, j) * std::conj(l(k, j));
      if (zero_pivot) {
        if (std::abs(s) > std::sqrt(tiny) * std::sqrt(std::max(tiny, m(i, i).real() + jitter))) return false;
        l(i, k) = 0.0;
      } else {
        l(i, k) = s / lkk;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

std::vector<double> finite_diff_gradient(const std::function<double(const PhaseVector&)>& f,
                                         const PhaseVector& phi, double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff_gradient: h must be positive");
  std::vector<double> grad(phi.size());
  std::vector<double> angles = phi.angles();
  for (std::size_t n = 0; n < phi.size(); ++n) {
    const double a0 = angles[n];
    angles[n] = a0 + h;
    const double fp = f(PhaseVector::from_angles(angles));
    angles[n] = a0 - h;
    const double fm = f(PhaseVector::from_angles(angles));
    angles[n] = a0;
    grad[n] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace dfrc
