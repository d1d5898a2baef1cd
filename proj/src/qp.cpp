#include "slcc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slcc/linprog.hpp"

namespace slcc {

namespace {

constexpr double kActTol = 1e-9;    // activity detection on slack
constexpr double kDualTol = 1e-10;  // dual feasibility
constexpr double kStepTol = 1e-12;

Vec row_of(const Matrix& m, std::size_t i) {
  Vec r(m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) r[j] = m(i, j);
  return r;
}

// KKT solve for min ½z'Hz + c'z s.t. A z = b with A = [eq; active ineq rows].
// Returns {z, lambda} or nullopt when the KKT matrix is numerically singular.
std::optional<std::pair<Vec, Vec>> solve_eqp(const Matrix& h, const Vec& c, const Matrix& a,
                                             const Vec& b, const ToleranceProfile& tol) {
  const std::size_t n = h.rows, m = a.rows;
  Matrix kkt(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kkt(i, j) = h(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      kkt(n + i, j) = a(i, j);
      kkt(j, n + i) = a(i, j);
    }
  Vec rhs(n + m);
  for (std::size_t j = 0; j < n; ++j) rhs[j] = -c[j];
  for (std::size_t i = 0; i < m; ++i) rhs[n + i] = b[i];
  auto sol = lu_solve(kkt, rhs, tol);
  if (!sol) return std::nullopt;
  Vec z(sol->begin(), sol->begin() + n);
  Vec lambda(sol->begin() + n, sol->end());
  return std::make_pair(std::move(z), std::move(lambda));
}

}  // namespace

double qp_objective(const Qp& qp, const Vec& z) {
  return 0.5 * dot(z, matvec(qp.hessian, z)) + dot(qp.linear, z);
}

double qp_kkt_residual(const Qp& qp, const Vec& z, const Vec& eq_duals, const Vec& ineq_duals) {
  Vec grad = matvec(qp.hessian, z);
  for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += qp.linear[j];
  if (qp.eq_a.rows) {
    const Vec t = matvec_t(qp.eq_a, eq_duals);
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += t[j];
  }
  if (qp.ineq_g.rows) {
    const Vec t = matvec_t(qp.ineq_g, ineq_duals);
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += t[j];
  }
  double res = norm_inf(grad);
  if (qp.eq_a.rows) {
    Vec r = sub(matvec(qp.eq_a, z), qp.eq_b);
    res = std::max(res, norm_inf(r));
  }
  for (std::size_t i = 0; i < qp.ineq_g.rows; ++i) {
    const double slack = qp.ineq_w[i] - dot(row_of(qp.ineq_g, i), z);
    res = std::max(res, std::max(0.0, -slack));
    res = std::max(res, std::max(0.0, -ineq_duals[i]));
    res = std::max(res, std::abs(ineq_duals[i] * slack));
  }
  return res;
}

QpResult qp_solve(const Qp& qp, const ToleranceProfile& tol) {
  const std::size_t n = qp.hessian.rows;
  if (qp.hessian.cols != n || qp.linear.size() != n)
    throw std::invalid_argument("qp_solve: bad hessian/linear dims");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(qp.hessian(i, j) - qp.hessian(j, i)) > 1e-12)
        throw std::invalid_argument("qp_solve: hessian not symmetric");

  const std::size_t mi = qp.ineq_g.rows;
  QpResult res;
  res.eq_duals.assign(qp.eq_a.rows, 0.0);
  res.ineq_duals.assign(mi, 0.0);

  auto start = lp_feasible(n, qp.ineq_g, qp.ineq_w, qp.eq_a, qp.eq_b);
  if (!start) {
    res.status = QpStatus::infeasible;
    return res;
  }
  Vec z = *start;

  // Working set: active rows at the start point, greedily filtered so the
  // stacked constraint matrix keeps full row rank.
  std::vector<std::size_t> work;
  {
    Matrix stacked = qp.eq_a;
    std::size_t rk = stacked.rows ? rank(stacked, tol) : 0;
    for (std::size_t r = 0; r < mi; ++r) {
      const double slack = qp.ineq_w[r] - dot(row_of(qp.ineq_g, r), z);
      if (std::abs(slack) <= kActTol) {
        Matrix trial = vcat(stacked, Matrix::from_rows({row_of(qp.ineq_g, r)}));
        const std::size_t trk = rank(trial, tol);
        if (trk > rk) {
          work.push_back(r);
          stacked = std::move(trial);
          rk = trk;
        }
      }
    }
  }

  const int max_iter = 200 + 10 * static_cast<int>(mi + n);
  std::vector<bool> in_work(mi, false);
  for (std::size_t r : work) in_work[r] = true;

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    Matrix a = qp.eq_a;
    Vec b = qp.eq_b;
    for (std::size_t r : work) {
      a = vcat(a, Matrix::from_rows({row_of(qp.ineq_g, r)}));
      b.push_back(qp.ineq_w[r]);
    }

    auto eqp = solve_eqp(qp.hessian, qp.linear, a, b, tol);
    Vec target, lambda;
    if (eqp) {
      target = eqp->first;
      lambda = eqp->second;
    } else {
      // Singular KKT: look for a feasible ray of strict descent in the
      // common null space of constraints and curvature.
      Matrix probe = a.rows ? vcat(a, qp.hessian) : qp.hessian;
      Matrix null = kernel_basis(probe, tol);
      Vec dir;
      for (std::size_t k = 0; k < null.cols; ++k) {
        Vec d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = null(i, k);
        const double slope = dot(qp.linear, d);
        if (std::abs(slope) > 1e-10) {
          dir = slope > 0 ? scaled(d, -1.0) : d;
          break;
        }
      }
      if (!dir.empty()) {
        double alpha = std::numeric_limits<double>::infinity();
        std::size_t block = mi;
        for (std::size_t r = 0; r < mi; ++r) {
          if (in_work[r]) continue;
          const double gd = dot(row_of(qp.ineq_g, r), dir);
          if (gd > kStepTol) {
            const double slack = qp.ineq_w[r] - dot(row_of(qp.ineq_g, r), z);
            const double ratio = std::max(0.0, slack) / gd;
            if (ratio < alpha) {
              alpha = ratio;
              block = r;
            }
          }
        }
        if (block == mi) {
          res.status = QpStatus::unbounded;
          res.z = z;
          return res;
        }
        z = axpy(alpha, dir, z);
        work.push_back(block);
        in_work[block] = true;
        std::sort(work.begin(), work.end());
        continue;
      }
      // Objective flat along every unpinned direction: regularize slightly.
      Matrix hreg = qp.hessian;
      for (std::size_t i = 0; i < n; ++i) hreg(i, i) += 1e-10;
      eqp = solve_eqp(hreg, qp.linear, a, b, tol);
      if (!eqp) throw std::runtime_error("qp_solve: degenerate KKT system");
      target = eqp->first;
      lambda = eqp->second;
    }

    Vec d = sub(target, z);
    if (norm_inf(d) <= kStepTol * (1.0 + norm_inf(z))) {
      // stationary on the working set: check inequality multipliers
      std::size_t drop = work.size();
      for (std::size_t k = 0; k < work.size(); ++k) {  // Bland: smallest row index
        if (lambda[qp.eq_a.rows + k] < -kDualTol) {
          drop = k;
          break;
        }
      }
      if (drop == work.size()) {
        res.z = target;
        for (std::size_t i = 0; i < qp.eq_a.rows; ++i) res.eq_duals[i] = lambda[i];
        std::fill(res.ineq_duals.begin(), res.ineq_duals.end(), 0.0);
        for (std::size_t k = 0; k < work.size(); ++k)
          res.ineq_duals[work[k]] = std::max(0.0, lambda[qp.eq_a.rows + k]);
        res.status = QpStatus::ok;
        res.kkt_residual = qp_kkt_residual(qp, res.z, res.eq_duals, res.ineq_duals);
        res.objective = qp_objective(qp, res.z);
        return res;
      }
      in_work[work[drop]] = false;
      work.erase(work.begin() + drop);
      continue;
    }

    // Ratio test against rows outside the working set.
    double alpha = 1.0;
    std::size_t block = mi;
    for (std::size_t r = 0; r < mi; ++r) {
      if (in_work[r]) continue;
      const double gd = dot(row_of(qp.ineq_g, r), d);
      if (gd > kStepTol) {
        const double slack = qp.ineq_w[r] - dot(row_of(qp.ineq_g, r), z);
        const double ratio = std::max(0.0, slack) / gd;
        if (ratio < alpha - 1e-15) {  // ascending r keeps the smallest index on ties
          alpha = ratio;
          block = r;
        }
      }
    }
    z = axpy(alpha, d, z);
    if (block != mi && alpha < 1.0) {
      work.push_back(block);
      in_work[block] = true;
      std::sort(work.begin(), work.end());
    }
  }
  res.status = QpStatus::max_iter;
  res.z = z;
  return res;
}

}  // namespace slcc
