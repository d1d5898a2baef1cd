#include "slcc/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slcc {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Tableau simplex over standard form: min c'y s.t. Ay = b, y >= 0, b >= 0.
// `eligible` masks columns the pricing step may enter (artificials excluded
// in phase 2). Returns false when unbounded.
struct Tableau {
  Matrix t;  // m x (n+1), last column is the RHS
  std::vector<std::size_t> basis;

  double rhs(std::size_t i) const { return t(i, t.cols - 1); }

  bool iterate(const Vec& cost, const std::vector<bool>& eligible) {
    const std::size_t m = t.rows, n = t.cols - 1;
    const std::size_t max_iters = 50 * (m + n) * (m + n) + 1000;
    for (std::size_t it = 0; it < max_iters; ++it) {
      // reduced costs via the basic cost row
      Vec cb(m);
      for (std::size_t i = 0; i < m; ++i) cb[i] = cost[basis[i]];
      std::size_t enter = n;
      for (std::size_t j = 0; j < n; ++j) {  // Bland: smallest index first
        if (!eligible[j]) continue;
        double rc = cost[j];
        for (std::size_t i = 0; i < m; ++i) rc -= cb[i] * t(i, j);
        if (rc < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == n) return true;  // optimal

      std::size_t leave = m;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t(i, enter) > kPivotTol) {
          const double ratio = rhs(i) / t(i, enter);
          if (ratio < best_ratio - kPivotTol ||
              (ratio < best_ratio + kPivotTol && (leave == m || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;  // unbounded

      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration cap reached");
  }

  void pivot(std::size_t row, std::size_t col) {
    const std::size_t m = t.rows, nc = t.cols;
    const double piv = t(row, col);
    for (std::size_t j = 0; j < nc; ++j) t(row, j) /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < nc; ++j) t(i, j) -= f * t(row, j);
    }
    basis[row] = col;
  }
};

}  // namespace

LpResult lp_solve(const LpProblem& p) {
  const std::size_t nx = p.c.size();
  const std::size_t n_ineq = p.g.rows, n_eq = p.e.rows;
  if ((n_ineq && p.g.cols != nx) || (n_eq && p.e.cols != nx))
    throw std::invalid_argument("lp_solve: dimension mismatch");

  const std::size_t m = n_ineq + n_eq;
  LpResult res;
  if (m == 0) {
    // No constraints at all: 0 is optimal iff nothing improves (c = 0 or
    // nonneg with c >= 0); otherwise unbounded.
    res.x.assign(nx, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
      if (p.c[j] < 0.0 || (!p.nonneg && p.c[j] != 0.0)) {
        res.status = LpStatus::unbounded;
        return res;
      }
    }
    res.status = LpStatus::optimal;
    res.objective = 0.0;
    return res;
  }

  // Standard-form columns: x (or x+, x-), slacks for inequalities, artificials.
  const std::size_t nsplit = p.nonneg ? nx : 2 * nx;
  const std::size_t n_slack = n_ineq;
  const std::size_t n_art = m;
  const std::size_t n = nsplit + n_slack + n_art;

  Tableau tab;
  tab.t = Matrix(m, n + 1);
  tab.basis.resize(m);

  auto structural = [&](std::size_t i, std::size_t j) -> double {
    const double v = (i < n_ineq) ? p.g(i, j) : p.e(i - n_ineq, j);
    return v;
  };
  for (std::size_t i = 0; i < m; ++i) {
    double b = (i < n_ineq) ? p.w[i] : p.e_rhs[i - n_ineq];
    const double sign = (b < 0.0) ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nx; ++j) {
      const double v = sign * structural(i, j);
      tab.t(i, j) = v;
      if (!p.nonneg) tab.t(i, nx + j) = -v;
    }
    if (i < n_ineq) tab.t(i, nsplit + i) = sign * 1.0;
    tab.t(i, nsplit + n_slack + i) = 1.0;
    tab.t(i, n) = sign * b;
    tab.basis[i] = nsplit + n_slack + i;
  }

  std::vector<bool> eligible(n, true);
  Vec phase1_cost(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1_cost[nsplit + n_slack + i] = 1.0;

  if (!tab.iterate(phase1_cost, eligible))
    throw std::runtime_error("simplex: phase 1 unbounded");

  double art_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis[i] >= nsplit + n_slack) art_sum += tab.rhs(i);
  if (art_sum > kFeasTol) {
    res.status = LpStatus::infeasible;
    return res;
  }

  // Drive any zero-level artificial out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis[i] < nsplit + n_slack) continue;
    for (std::size_t j = 0; j < nsplit + n_slack; ++j) {
      if (std::abs(tab.t(i, j)) > kPivotTol) {
        tab.pivot(i, j);
        break;
      }
    }
  }
  for (std::size_t j = nsplit + n_slack; j < n; ++j) eligible[j] = false;

  Vec phase2_cost(n, 0.0);
  for (std::size_t j = 0; j < nx; ++j) {
    phase2_cost[j] = p.c[j];
    if (!p.nonneg) phase2_cost[nx + j] = -p.c[j];
  }
  if (!tab.iterate(phase2_cost, eligible)) {
    res.status = LpStatus::unbounded;
    return res;
  }

  Vec y(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[tab.basis[i]] = tab.rhs(i);
  res.x.assign(nx, 0.0);
  for (std::size_t j = 0; j < nx; ++j)
    res.x[j] = p.nonneg ? y[j] : y[j] - y[nx + j];
  res.objective = dot(p.c, res.x);
  res.status = LpStatus::optimal;
  return res;
}

std::optional<Vec> lp_feasible(std::size_t n_vars, const Matrix& g, const Vec& w,
                               const Matrix& e, const Vec& e_rhs) {
  if (g.rows == 0 && e.rows == 0) return Vec(n_vars, 0.0);
  LpProblem p;
  p.c.assign(n_vars, 0.0);
  p.g = g;
  p.w = w;
  p.e = e;
  p.e_rhs = e_rhs;
  LpResult r = lp_solve(p);
  if (r.status != LpStatus::optimal) return std::nullopt;
  return r.x;
}

}  // namespace slcc
