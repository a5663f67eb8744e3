#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace randopt {

/// Dense square matrix, row major. Sizes here are tiny (n <= ~10).
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}
  Matrix(std::size_t n, std::vector<double> row_major);

  static Matrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return a_; }

  /// Top-left k-by-k block.
  Matrix leading(std::size_t k) const;
  /// Max absolute row sum.
  double norm_inf() const;
  double max_asymmetry() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Determinant by LU with partial pivoting; closed form for n <= 3.
double determinant(const Matrix& m);

/// Solves m x = b by LU with partial pivoting. Returns nullopt if a pivot is
/// at most `pivot_tol * (1 + ||m||_inf)` in magnitude.
std::optional<std::vector<double>> solve(const Matrix& m, std::span<const double> b, double pivot_tol = 1e-14);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Sweeps until the off-diagonal Frobenius norm is <= off_tol * max(1, ||m||_F).
std::vector<double> symmetric_eigenvalues(const Matrix& m, double off_tol = 1e-12);

}  // namespace randopt
