#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace slcc {

using Vec = std::vector<double>;

/// Dense real matrix, row-major storage.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // rows*cols entries, all finite

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& rows);

  Matrix transposed() const;
  bool empty() const { return rows == 0 || cols == 0; }
};

/// Thresholds for rank decisions, linear-solve residuals and sign tests.
/// Threaded explicitly through every operation that makes a tolerance call.
struct ToleranceProfile {
  double rank_rtol = 1e-10;   // pivot acceptance relative to the largest initial pivot
  double solve_rtol = 1e-10;  // residual scale for linear solves
  double zero_atol = 1e-8;    // absolute threshold for sign / zero tests
};

// ----- vector helpers -----
double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);
double norm1(const Vec& x);
double norm_inf(const Vec& x);
Vec axpy(double alpha, const Vec& x, const Vec& y);  // alpha*x + y
Vec scaled(const Vec& x, double alpha);
Vec sub(const Vec& x, const Vec& y);

// ----- matrix algebra -----
Matrix matmul(const Matrix& a, const Matrix& b);
Vec matvec(const Matrix& a, const Vec& x);
Vec matvec_t(const Matrix& a, const Vec& x);  // aᵀx
Matrix hcat(const Matrix& a, const Matrix& b);
Matrix vcat(const Matrix& a, const Matrix& b);
double norm_inf_induced(const Matrix& a);  // max absolute row sum

/// Maximum absolute column sum.
double norm1_induced(const Matrix& a);

/// Solve Ax = b by LU with partial pivoting. Returns nullopt when a pivot
/// falls below rank_rtol times the largest initial entry (numerically singular).
std::optional<Vec> lu_solve(const Matrix& a, const Vec& b, const ToleranceProfile& tol = {});

/// Inverse via column-wise lu_solve; nullopt when singular.
std::optional<Matrix> inverse(const Matrix& a, const ToleranceProfile& tol = {});

/// Numerical rank by Gaussian elimination with complete (column-and-row)
/// pivoting; a pivot counts while >= rank_rtol * first pivot.
std::size_t rank(const Matrix& a, const ToleranceProfile& tol = {});

/// Right pseudoinverse D† = Dᵀ(DDᵀ)⁻¹ of a full-row-rank matrix.
/// Returns nullopt when D is not full row rank.
std::optional<Matrix> pinv_right(const Matrix& d, const ToleranceProfile& tol = {});

/// Orthonormal basis Y of the kernel of D: DY = 0, YᵀY = I,
/// cols(Y) = cols(D) - rank(D). Zero-column matrix for trivial kernels.
Matrix kernel_basis(const Matrix& d, const ToleranceProfile& tol = {});

std::string format_vec(const Vec& v);

}  // namespace slcc
