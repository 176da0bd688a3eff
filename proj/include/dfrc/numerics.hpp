// SPDX-License-Identifier: Apache-2.0
//
// Dense complex vector/matrix kernels shared by every solver. Row-major storage,
// double precision throughout, no external linear-algebra dependency.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfrc/errors.hpp"

namespace dfrc {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(std::size_t n, cdouble fill = {}) : data_(n, fill) {}
  ComplexVector(std::initializer_list<cdouble> values) : data_(values) {}
  explicit ComplexVector(std::vector<cdouble> values) : data_(std::move(values)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  cdouble& operator[](std::size_t i) { return data_[i]; }
  const cdouble& operator[](std::size_t i) const { return data_[i]; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  std::span<cdouble> span() { return data_; }
  std::span<const cdouble> span() const { return data_; }
  const std::vector<cdouble>& values() const { return data_; }

  bool all_finite() const;

  ComplexVector& operator+=(const ComplexVector& other);
  ComplexVector& operator-=(const ComplexVector& other);
  ComplexVector& operator*=(cdouble s);

  friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

 private:
  std::vector<cdouble> data_;
};

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols, cdouble fill = {})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Row-major nested initializer; all rows must have equal length.
  ComplexMatrix(std::initializer_list<std::initializer_list<cdouble>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(const ComplexVector& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  cdouble& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cdouble& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cdouble> row(std::size_t r) const {
    return std::span<const cdouble>(data_).subspan(r * cols_, cols_);
  }
  std::span<const cdouble> data() const { return data_; }

  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cdouble s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> data_;
};

ComplexVector operator+(ComplexVector a, const ComplexVector& b);
ComplexVector operator-(ComplexVector a, const ComplexVector& b);
ComplexVector operator*(cdouble s, ComplexVector v);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cdouble s, ComplexMatrix m);

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

/// Dense product a*b. Throws ShapeError when a.cols() != b.rows().
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x);
/// x^T a (row vector times matrix), returned as a column vector.
ComplexVector vecmat(const ComplexVector& x, const ComplexMatrix& a);

ComplexMatrix adjoint(const ComplexMatrix& m);
ComplexMatrix transpose(const ComplexMatrix& m);
ComplexVector conj(const ComplexVector& v);

/// (m + m^H) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);
/// max|m - m^H| <= rel_tol * max|m|.
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-10);

/// x y^H.
ComplexMatrix outer(const ComplexVector& x, const ComplexVector& y);
/// x^H y.
cdouble dot(const ComplexVector& x, const ComplexVector& y);
/// x^T y (no conjugation).
cdouble dotu(const ComplexVector& x, const ComplexVector& y);
/// Hadamard product.
ComplexVector hadamard(const ComplexVector& x, const ComplexVector& y);

double norm(const ComplexVector& v);
double squared_norm(const ComplexVector& v);
double frobenius_norm(const ComplexMatrix& m);
double max_abs(const ComplexMatrix& m);
double max_abs(const ComplexVector& v);
cdouble trace(const ComplexMatrix& m);

/// Re(x^H m x). Only meaningful for Hermitian m.
double quadratic_form(const ComplexMatrix& m, const ComplexVector& x);

// ---------------------------------------------------------------------------
// Eigenvalue utilities
// ---------------------------------------------------------------------------

struct EigOptions {
  double tol = 1e-12;
  std::size_t max_iter = 100000;
  std::uint64_t seed = 0x5eed;
  /// Warm start; a random unit vector is drawn from `seed` when absent.
  std::optional<ComplexVector> start;
};

struct EigResult {
  double value = 0.0;
  ComplexVector vector;
  bool converged = false;
  std::size_t iterations = 0;
  /// ||M v - lambda v||.
  double residual = 0.0;
};

/// Largest (algebraic) eigenpair of a Hermitian matrix by power iteration.
///
/// Runs unshifted first; if the dominant-magnitude eigenvalue turns out to be
/// negative, or the unshifted iteration stalls on a +/- pair, the matrix is
/// shifted to be PSD and iterated again. On success ||Mv - lambda v|| <=
/// tol * ||M||_F. On non-convergence the best iterate is returned with
/// `converged == false`. Throws ContractError for non-Hermitian input.
EigResult dominant_eigpair(const ComplexMatrix& m, const EigOptions& options = {});

/// Gershgorin lower bound: min_i (Re m_ii - sum_{j != i} |m_ij|) <= lambda_min.
double smallest_eig_lower_bound(const ComplexMatrix& m);
/// Gershgorin upper bound: max_i (Re m_ii + sum_{j != i} |m_ij|) >= lambda_max.
double largest_eig_upper_bound(const ComplexMatrix& m);

/// Tighter estimate of lambda_min from power iteration on (c I - M), lowered by
/// the final residual so the result stays a valid lower bound.
double tight_smallest_eig_lower_bound(const ComplexMatrix& m, const EigOptions& options = {});
/// Same for lambda_max, raised by the final residual.
double tight_largest_eig_upper_bound(const ComplexMatrix& m, const EigOptions& options = {});

/// Cholesky-based PSD test of m + jitter * I.
bool is_positive_semidefinite(const ComplexMatrix& m, double jitter = 0.0);

enum class ShiftRule { gershgorin, power };

// ---------------------------------------------------------------------------
// Test utility
// ---------------------------------------------------------------------------

class PhaseVector;

/// Central difference on the phase angles:
///   (f(angles + h e_n) - f(angles - h e_n)) / (2h) for each n.
std::vector<double> finite_diff_gradient(
    const std::function<double(const PhaseVector&)>& f, const PhaseVector& phi, double h);

}  // namespace dfrc
