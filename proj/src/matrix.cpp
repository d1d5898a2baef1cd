#include "slcc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace slcc {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return Matrix();
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) throw std::invalid_argument("ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.a.begin() + i * m.cols);
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

double norm1(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double norm_inf(const Vec& x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  return s;
}

Vec axpy(double alpha, const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = alpha * x[i] + y[i];
  return r;
}

Vec scaled(const Vec& x, double alpha) {
  Vec r(x);
  for (double& v : r) v *= alpha;
  return r;
}

Vec sub(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw std::invalid_argument("sub: size mismatch");
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: dim mismatch");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec matvec(const Matrix& a, const Vec& x) {
  if (a.cols != x.size()) throw std::invalid_argument("matvec: dim mismatch");
  Vec y(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vec matvec_t(const Matrix& a, const Vec& x) {
  if (a.rows != x.size()) throw std::invalid_argument("matvec_t: dim mismatch");
  Vec y(a.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < a.cols; ++j) y[j] += a(i, j) * xi;
  }
  return y;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.rows != b.rows) throw std::invalid_argument("hcat: row mismatch");
  Matrix c(a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) c(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols; ++j) c(i, a.cols + j) = b(i, j);
  }
  return c;
}

Matrix vcat(const Matrix& a, const Matrix& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.cols != b.cols) throw std::invalid_argument("vcat: col mismatch");
  Matrix c(a.rows + b.rows, a.cols);
  std::copy(a.a.begin(), a.a.end(), c.a.begin());
  std::copy(b.a.begin(), b.a.end(), c.a.begin() + a.a.size());
  return c;
}

double norm_inf_induced(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double norm1_induced(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

std::optional<Vec> lu_solve(const Matrix& a, const Vec& b, const ToleranceProfile& tol) {
  if (a.rows != a.cols) throw std::invalid_argument("lu_solve: matrix not square");
  if (a.rows != b.size()) throw std::invalid_argument("lu_solve: rhs size mismatch");
  const std::size_t n = a.rows;
  Matrix lu = a;
  Vec x = b;
  double max_entry = 0.0;
  for (double v : lu.a) max_entry = std::max(max_entry, std::abs(v));
  const double pivot_floor = tol.rank_rtol * std::max(max_entry, 1e-300);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
    if (std::abs(lu(p, k)) < pivot_floor) return std::nullopt;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(p, j), lu(k, j));
      std::swap(x[p], x[k]);
    }
    const double piv = lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / piv;
      if (f == 0.0) continue;
      lu(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      x[i] -= f * x[k];
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x[j];
    x[ii] = s / lu(ii, ii);
  }
  return x;
}

std::optional<Matrix> inverse(const Matrix& a, const ToleranceProfile& tol) {
  if (a.rows != a.cols) throw std::invalid_argument("inverse: matrix not square");
  Matrix inv(a.rows, a.cols);
  for (std::size_t j = 0; j < a.cols; ++j) {
    Vec e(a.rows, 0.0);
    e[j] = 1.0;
    auto col = lu_solve(a, e, tol);
    if (!col) return std::nullopt;
    for (std::size_t i = 0; i < a.rows; ++i) inv(i, j) = (*col)[i];
  }
  return inv;
}

std::size_t rank(const Matrix& a, const ToleranceProfile& tol) {
  if (a.empty()) return 0;
  Matrix w = a;
  const std::size_t r = w.rows, c = w.cols;
  std::size_t rk = 0;
  double first_pivot = 0.0;
  for (std::size_t step = 0; step < std::min(r, c); ++step) {
    // complete pivoting over the remaining submatrix
    std::size_t pi = step, pj = step;
    double best = 0.0;
    for (std::size_t i = step; i < r; ++i)
      for (std::size_t j = step; j < c; ++j)
        if (std::abs(w(i, j)) > best) {
          best = std::abs(w(i, j));
          pi = i;
          pj = j;
        }
    if (step == 0) first_pivot = best;
    if (best < tol.rank_rtol * std::max(first_pivot, 1e-300) || best == 0.0) break;
    if (pi != step)
      for (std::size_t j = 0; j < c; ++j) std::swap(w(pi, j), w(step, j));
    if (pj != step)
      for (std::size_t i = 0; i < r; ++i) std::swap(w(i, pj), w(i, step));
    ++rk;
    const double piv = w(step, step);
    for (std::size_t i = step + 1; i < r; ++i) {
      const double f = w(i, step) / piv;
      if (f == 0.0) continue;
      for (std::size_t j = step; j < c; ++j) w(i, j) -= f * w(step, j);
    }
  }
  return rk;
}

std::optional<Matrix> pinv_right(const Matrix& d, const ToleranceProfile& tol) {
  if (rank(d, tol) != d.rows) return std::nullopt;
  const Matrix gram = matmul(d, d.transposed());
  auto gram_inv = inverse(gram, tol);
  if (!gram_inv) return std::nullopt;
  return matmul(d.transposed(), *gram_inv);
}

Matrix kernel_basis(const Matrix& d, const ToleranceProfile& tol) {
  const std::size_t n = d.cols;
  if (d.rows == 0) return Matrix::identity(n);

  // Row-echelon with column pivoting; track the column permutation so the
  // free columns are identified in the original ordering.
  Matrix w = d;
  std::vector<std::size_t> colperm(n);
  std::iota(colperm.begin(), colperm.end(), 0);
  std::size_t rk = 0;
  double first_pivot = 0.0;
  for (std::size_t step = 0; step < std::min(w.rows, n); ++step) {
    std::size_t pi = step, pj = step;
    double best = 0.0;
    for (std::size_t i = step; i < w.rows; ++i)
      for (std::size_t j = step; j < n; ++j)
        if (std::abs(w(i, j)) > best) {
          best = std::abs(w(i, j));
          pi = i;
          pj = j;
        }
    if (step == 0) first_pivot = best;
    if (best < tol.rank_rtol * std::max(first_pivot, 1e-300) || best == 0.0) break;
    if (pi != step)
      for (std::size_t j = 0; j < n; ++j) std::swap(w(pi, j), w(step, j));
    if (pj != step) {
      for (std::size_t i = 0; i < w.rows; ++i) std::swap(w(i, pj), w(i, step));
      std::swap(colperm[pj], colperm[step]);
    }
    ++rk;
    const double piv = w(step, step);
    for (std::size_t i = step + 1; i < w.rows; ++i) {
      const double f = w(i, step) / piv;
      if (f == 0.0) continue;
      for (std::size_t j = step; j < n; ++j) w(i, j) -= f * w(step, j);
    }
  }

  const std::size_t kdim = n - rk;
  Matrix y(n, kdim);
  if (kdim == 0) return y;

  // One kernel vector per free (permuted) column: set that free variable to 1,
  // back-substitute the pivot variables.
  for (std::size_t f = 0; f < kdim; ++f) {
    Vec zp(n, 0.0);  // solution in permuted coordinates
    zp[rk + f] = 1.0;
    for (std::size_t ii = rk; ii-- > 0;) {
      double s = 0.0;
      for (std::size_t j = ii + 1; j < n; ++j) s += w(ii, j) * zp[j];
      zp[ii] = -s / w(ii, ii);
    }
    for (std::size_t j = 0; j < n; ++j) y(colperm[j], f) = zp[j];
  }

  // Modified Gram-Schmidt, twice for orthogonality at working precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < kdim; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) proj += y(i, k) * y(i, j);
        for (std::size_t i = 0; i < n; ++i) y(i, j) -= proj * y(i, k);
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < n; ++i) nrm += y(i, j) * y(i, j);
      nrm = std::sqrt(nrm);
      for (std::size_t i = 0; i < n; ++i) y(i, j) /= nrm;
    }
  }
  return y;
}

std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ")";
  return os.str();
}

}  // namespace slcc
