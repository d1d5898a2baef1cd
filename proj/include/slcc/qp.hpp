#pragma once

#include "slcc/matrix.hpp"

namespace slcc {

/// Convex quadratic program
///   min ½ zᵀH z + cᵀz   s.t.  E z = e,  G z ≤ w
/// H symmetric positive semidefinite; strictly convex on the feasible
/// subspace for guaranteed termination.
struct Qp {
  Matrix hessian;
  Vec linear;
  Matrix eq_a;
  Vec eq_b;
  Matrix ineq_g;
  Vec ineq_w;
};

enum class QpStatus { ok, infeasible, unbounded, max_iter };

struct QpResult {
  QpStatus status = QpStatus::max_iter;
  Vec z;
  Vec eq_duals;            // one per equality row
  Vec ineq_duals;          // one per inequality row, zero when inactive
  double kkt_residual = 0;  // recomputed independently of solver state
  int iterations = 0;
  double objective = 0.0;
};

/// Dense primal active-set method. Feasible start from the phase-1 LP;
/// working-set changes one row at a time with Bland-style smallest-index
/// tie-breaking.
QpResult qp_solve(const Qp& qp, const ToleranceProfile& tol = {});

/// Max over stationarity, primal feasibility, dual feasibility and
/// complementary-slackness residuals. Pure recomputation.
double qp_kkt_residual(const Qp& qp, const Vec& z, const Vec& eq_duals, const Vec& ineq_duals);

double qp_objective(const Qp& qp, const Vec& z);

}  // namespace slcc
