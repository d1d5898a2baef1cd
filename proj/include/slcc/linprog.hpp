#pragma once

#include <optional>

#include "slcc/matrix.hpp"

namespace slcc {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpProblem {
  Vec c;      // objective coefficients, size = number of variables
  Matrix g;   // g x <= w
  Vec w;
  Matrix e;   // e x = e_rhs
  Vec e_rhs;
  bool nonneg = false;  // x >= 0 instead of free variables
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vec x;
  double objective = 0.0;
};

/// Dense two-phase primal simplex with Bland's rule. Desk-scale sizes only.
LpResult lp_solve(const LpProblem& p);

/// Any point satisfying g x <= w and e x = e_rhs, or nullopt when the
/// phase-1 optimum stays positive (certified infeasible). n_vars is the
/// ambient dimension (needed when both constraint blocks are empty).
std::optional<Vec> lp_feasible(std::size_t n_vars, const Matrix& g, const Vec& w,
                               const Matrix& e, const Vec& e_rhs);

}  // namespace slcc
