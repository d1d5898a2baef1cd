#include "slcc/ocp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace slcc {

namespace {

// ---------------------------------------------------------------------------
// Banded SPD Cholesky (lower band storage). factor() reports the first row
// whose pivot collapses, which the active-set driver maps back to a
// dependent constraint row.
// ---------------------------------------------------------------------------
class BandedCholesky {
 public:
  void reset(std::size_t n, std::size_t halfband) {
    n_ = n;
    hb_ = halfband;
    a_.assign(n * (halfband + 1), 0.0);
  }

  // valid for j in [i - hb, i]
  double& at(std::size_t i, std::size_t j) { return a_[i * (hb_ + 1) + (j + hb_ - i)]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * (hb_ + 1) + (j + hb_ - i)]; }

  // Returns the failing row index, or n on success.
  std::size_t factor(double pivot_floor) {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = (i > hb_) ? i - hb_ : 0;
      for (std::size_t j = j0; j < i; ++j) {
        double s = at(i, j);
        const std::size_t k0 = std::max(j0, (j > hb_) ? j - hb_ : 0);
        for (std::size_t k = k0; k < j; ++k) s -= at(i, k) * at(j, k);
        at(i, j) = s / at(j, j);
      }
      double s = at(i, i);
      for (std::size_t k = j0; k < i; ++k) s -= at(i, k) * at(i, k);
      if (!(s > pivot_floor)) return i;
      at(i, i) = std::sqrt(s);
    }
    return n_;
  }

  void solve(Vec& x) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = (i > hb_) ? i - hb_ : 0;
      double s = x[i];
      for (std::size_t j = j0; j < i; ++j) s -= at(i, j) * x[j];
      x[i] = s / at(i, i);
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      const std::size_t jmax = std::min(n_ - 1, ii + hb_);
      double s = x[ii];
      for (std::size_t j = ii + 1; j <= jmax; ++j) s -= at(j, ii) * x[j];
      x[ii] = s / at(ii, ii);
    }
  }

 private:
  std::size_t n_ = 0, hb_ = 0;
  std::vector<double> a_;
};

// Sparse constraint row over the node-interleaved variable vector.
struct SparseRow {
  std::vector<std::pair<std::size_t, double>> entries;
  double rhs = 0.0;
  int kind = 0;        // 0 dynamics, 1 mixed, 2 terminal
  std::size_t mixed_id = 0;  // global mixed-row index when kind == 1
};

// The QP over z = (x_1,u_1,...,x_N,u_N) with diagonal Hessian.
struct OcpWorkspace {
  const DiscreteOcp* ocp = nullptr;
  std::size_t n = 0, m = 0, l = 0, nsteps = 0, nv = 0;
  Vec hdiag;     // Hessian diagonal, strictly positive
  Vec lin;       // linear objective coefficients
  std::vector<SparseRow> dyn_rows;        // per step, n rows each
  std::vector<SparseRow> mixed_rows;      // per node, l rows each (global id = index)
  std::vector<SparseRow> terminal_rows;   // n rows

  std::size_t xvar(std::size_t node, std::size_t j) const {  // node in 1..N
    return (node - 1) * (n + m) + j;
  }
  std::size_t uvar(std::size_t node, std::size_t j) const {
    return (node - 1) * (n + m) + n + j;
  }

  void build(const DiscreteOcp& o, const Vec& b) {
    ocp = &o;
    n = o.n();
    m = o.m();
    l = o.l();
    nsteps = o.grid.n_steps;
    nv = nsteps * (n + m);
    const double h = o.grid.h;

    hdiag.assign(nv, 0.0);
    lin.assign(nv, 0.0);
    for (std::size_t i = 1; i <= nsteps; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        hdiag[xvar(i, j)] = h;
        lin[xvar(i, j)] = -h * o.xd_nodes[i - 1][j];
      }
      for (std::size_t j = 0; j < m; ++j) {
        hdiag[uvar(i, j)] = h * o.delta;
        lin[uvar(i, j)] = -h * o.delta * o.ud_nodes[i - 1][j];
      }
    }

    dyn_rows.clear();
    dyn_rows.reserve(nsteps * n);
    for (std::size_t step = 0; step < nsteps; ++step) {
      // (I - hA) x_{step+1} - hB u_{step+1} - x_step = (step == 0 ? x0 : 0)
      for (std::size_t r = 0; r < n; ++r) {
        SparseRow row;
        row.kind = 0;
        if (step > 0) row.entries.emplace_back(xvar(step, r), -1.0);
        for (std::size_t j = 0; j < n; ++j) {
          const double v = o.dyn_lhs(r, j);
          if (v != 0.0) row.entries.emplace_back(xvar(step + 1, j), v);
        }
        for (std::size_t j = 0; j < m; ++j) {
          const double v = -o.input_map(r, j);
          if (v != 0.0) row.entries.emplace_back(uvar(step + 1, j), v);
        }
        row.rhs = (step == 0) ? o.x0[r] : 0.0;
        dyn_rows.push_back(std::move(row));
      }
    }

    mixed_rows.clear();
    mixed_rows.reserve(nsteps * l);
    for (std::size_t i = 1; i <= nsteps; ++i) {
      for (std::size_t r = 0; r < l; ++r) {
        SparseRow row;
        row.kind = 1;
        row.mixed_id = (i - 1) * l + r;
        for (std::size_t j = 0; j < n; ++j) {
          const double v = o.c(r, j);
          if (v != 0.0) row.entries.emplace_back(xvar(i, j), v);
        }
        for (std::size_t j = 0; j < m; ++j) {
          const double v = o.d(r, j);
          if (v != 0.0) row.entries.emplace_back(uvar(i, j), v);
        }
        row.rhs = o.f_nodes[i - 1][r];
        mixed_rows.push_back(std::move(row));
      }
    }

    terminal_rows.clear();
    terminal_rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      SparseRow row;
      row.kind = 2;
      row.entries.emplace_back(xvar(nsteps, r), 1.0);
      row.rhs = b[r];
      terminal_rows.push_back(std::move(row));
    }
  }

  double row_dot(const SparseRow& row, const Vec& z) const {
    double s = 0.0;
    for (const auto& [v, c] : row.entries) s += c * z[v];
    return s;
  }
};

// Equality-constrained solve on the active row list via the Schur
// complement S = E H⁻¹ Eᵀ, which is banded SPD when rows are ordered by node.
struct EqpSolver {
  const OcpWorkspace* ws = nullptr;
  std::vector<const SparseRow*> rows;  // node order: dyn block i, mixed block i, ..., terminal
  std::vector<std::size_t> group_size;  // rows per node group (terminal folded into the last)
  BandedCholesky chol;
  std::size_t halfband = 0;

  // Gathers active rows in node order. active is indexed by global mixed id.
  void gather(const OcpWorkspace& w, const std::vector<char>& active) {
    ws = &w;
    rows.clear();
    rows.reserve(w.dyn_rows.size() + w.mixed_rows.size() + w.terminal_rows.size());
    group_size.assign(w.nsteps, 0);
    for (std::size_t i = 1; i <= w.nsteps; ++i) {
      for (std::size_t r = 0; r < w.n; ++r) rows.push_back(&w.dyn_rows[(i - 1) * w.n + r]);
      group_size[i - 1] = w.n;
      for (std::size_t r = 0; r < w.l; ++r) {
        const std::size_t id = (i - 1) * w.l + r;
        if (active[id]) {
          rows.push_back(&w.mixed_rows[id]);
          ++group_size[i - 1];
        }
      }
    }
    for (const SparseRow& row : w.terminal_rows) rows.push_back(&row);
    group_size.back() += w.terminal_rows.size();
  }

  // Returns failing constraint row index (into rows) on pivot collapse, or
  // rows.size() on success.
  std::size_t factor() {
    const std::size_t nr = rows.size();
    std::vector<std::size_t> vmin(nr), vmax(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      std::size_t lo = ws->nv, hi = 0;
      for (const auto& [v, c] : rows[i]->entries) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      vmin[i] = lo;
      vmax[i] = hi;
    }
    // Rows of a node group only touch their own and the previous node's
    // variable block, so interactions stay within adjacent groups.
    halfband = group_size.front() - 1;
    for (std::size_t g = 0; g + 1 < group_size.size(); ++g)
      halfband = std::max(halfband, group_size[g] + group_size[g + 1] - 1);
    chol.reset(nr, halfband);
    double scale = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      const std::size_t j0 = (i > halfband) ? i - halfband : 0;
      for (std::size_t j = j0; j <= i; ++j) {
        if (vmin[i] > vmax[j] || vmin[j] > vmax[i]) continue;
        double s = 0.0;
        // merge the two sorted sparse rows on variable index
        const auto& ea = rows[i]->entries;
        const auto& eb = rows[j]->entries;
        std::size_t p = 0, q = 0;
        while (p < ea.size() && q < eb.size()) {
          if (ea[p].first < eb[q].first)
            ++p;
          else if (eb[q].first < ea[p].first)
            ++q;
          else {
            s += ea[p].second * eb[q].second / ws->hdiag[ea[p].first];
            ++p;
            ++q;
          }
        }
        chol.at(i, j) = s;
        if (i == j) scale = std::max(scale, std::abs(s));
      }
    }
    return chol.factor(1e-12 * std::max(scale, 1.0));
  }

  // Solve the EQP; z and lambda sized by caller. One refinement round keeps
  // certificates tight at long horizons.
  void solve(Vec& z, Vec& lambda) const {
    const std::size_t nr = rows.size();
    Vec rhs(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      double s = 0.0;
      for (const auto& [v, c] : rows[i]->entries) s += c * ws->lin[v] / ws->hdiag[v];
      rhs[i] = -(rows[i]->rhs + s);
    }
    lambda = rhs;
    chol.solve(lambda);

    auto recover_z = [&](const Vec& lam, Vec& out) {
      out.assign(ws->nv, 0.0);
      for (std::size_t i = 0; i < nr; ++i)
        for (const auto& [v, c] : rows[i]->entries) out[v] += c * lam[i];
      for (std::size_t v = 0; v < ws->nv; ++v)
        out[v] = -(ws->lin[v] + out[v]) / ws->hdiag[v];
    };
    recover_z(lambda, z);

    // one step of iterative refinement on the Schur system
    Vec stat(ws->nv);
    for (std::size_t v = 0; v < ws->nv; ++v) stat[v] = ws->hdiag[v] * z[v] + ws->lin[v];
    for (std::size_t i = 0; i < nr; ++i)
      for (const auto& [v, c] : rows[i]->entries) stat[v] += c * lambda[i];
    Vec corr(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      double s = 0.0;
      for (const auto& [v, c] : rows[i]->entries) s += c * (stat[v] / ws->hdiag[v]);
      corr[i] = s - (ws->row_dot(*rows[i], z) - rows[i]->rhs);
    }
    chol.solve(corr);
    for (std::size_t i = 0; i < nr; ++i) lambda[i] -= corr[i];
    recover_z(lambda, z);
  }
};

DiscreteTrajectory extract_trajectory(const OcpWorkspace& ws, const Vec& z) {
  DiscreteTrajectory traj;
  traj.states.resize(ws.nsteps + 1);
  traj.controls.resize(ws.nsteps);
  traj.states[0] = ws.ocp->x0;
  for (std::size_t i = 1; i <= ws.nsteps; ++i) {
    Vec x(ws.n), u(ws.m);
    for (std::size_t j = 0; j < ws.n; ++j) x[j] = z[ws.xvar(i, j)];
    for (std::size_t j = 0; j < ws.m; ++j) u[j] = z[ws.uvar(i, j)];
    traj.states[i] = std::move(x);
    traj.controls[i - 1] = std::move(u);
  }
  return traj;
}

double recompute_kkt(const OcpWorkspace& ws, const Vec& z, const EqpSolver& eqp,
                     const Vec& lambda, const std::vector<char>& active) {
  Vec grad(ws.nv);
  for (std::size_t v = 0; v < ws.nv; ++v) grad[v] = ws.hdiag[v] * z[v] + ws.lin[v];
  for (std::size_t i = 0; i < eqp.rows.size(); ++i)
    for (const auto& [v, c] : eqp.rows[i]->entries) grad[v] += c * lambda[i];
  double res = norm_inf(grad);
  for (const SparseRow* row : eqp.rows)
    res = std::max(res, std::abs(ws.row_dot(*row, z) - row->rhs));
  for (std::size_t i = 0; i < eqp.rows.size(); ++i) {
    if (eqp.rows[i]->kind == 1) {
      res = std::max(res, std::max(0.0, -lambda[i]));  // dual feasibility
    }
  }
  for (std::size_t id = 0; id < ws.mixed_rows.size(); ++id) {
    if (!active[id]) {
      const double slack = ws.mixed_rows[id].rhs - ws.row_dot(ws.mixed_rows[id], z);
      res = std::max(res, std::max(0.0, -slack));  // primal feasibility, inactive rows
    }
  }
  return res;
}

}  // namespace

FixedTerminalResult solve_fixed_terminal(const DiscreteOcp& ocp, const Vec& b,
                                         const ToleranceProfile& tol) {
  if (b.size() != ocp.n()) throw std::invalid_argument("solve_fixed_terminal: terminal dim");
  FixedTerminalResult out;

  OcpWorkspace ws;
  ws.build(ocp, b);
  const std::size_t n_mixed = ws.mixed_rows.size();
  std::vector<char> active(n_mixed, 1);  // all-active warm start

  EqpSolver eqp;
  // Rank-filter the warm start: a collapsing pivot on a mixed row marks it
  // dependent; drop and retry. Dynamics/terminal collapse means the pinned
  // problem is structurally singular.
  int drops = 0;
  for (;;) {
    eqp.gather(ws, active);
    const std::size_t fail = eqp.factor();
    if (fail == eqp.rows.size()) break;
    if (eqp.rows[fail]->kind != 1 || ++drops > 200) {
      out.status = FixedTerminalResult::Status::singular;
      return out;
    }
    active[eqp.rows[fail]->mixed_id] = 0;
  }

  Vec z, lambda;
  eqp.solve(z, lambda);

  // Warm-start point must satisfy every mixed row (actives hold with
  // equality; dropped dependent rows must come out consistent).
  for (std::size_t id = 0; id < n_mixed; ++id) {
    const double slack = ws.mixed_rows[id].rhs - ws.row_dot(ws.mixed_rows[id], z);
    if (slack < -1e-7) {
      out.status = FixedTerminalResult::Status::infeasible;
      return out;
    }
  }

  const int max_iter = static_cast<int>(4 * n_mixed + 200);
  Vec z_cur = z;
  bool need_solve = false;
  for (int iter = 0;; ++iter) {
    if (iter >= max_iter) {
      out.status = FixedTerminalResult::Status::max_iter;
      return out;
    }
    out.iterations = iter + 1;
    if (need_solve) {
      eqp.gather(ws, active);
      const std::size_t fail = eqp.factor();
      if (fail != eqp.rows.size()) {
        out.status = FixedTerminalResult::Status::singular;
        return out;
      }
      eqp.solve(z, lambda);
      need_solve = false;
    }

    Vec d = sub(z, z_cur);
    const double step_norm = norm_inf(d);
    if (step_norm <= 1e-12 * (1.0 + norm_inf(z_cur))) {
      // dual check over active mixed rows, Bland order (smallest global id)
      std::size_t drop_id = n_mixed;
      for (std::size_t i = 0; i < eqp.rows.size(); ++i) {
        if (eqp.rows[i]->kind == 1 && lambda[i] < -1e-10) {
          drop_id = eqp.rows[i]->mixed_id;
          break;
        }
      }
      if (drop_id == n_mixed) break;  // optimal
      active[drop_id] = 0;
      need_solve = true;
      continue;
    }

    // ratio test over inactive mixed rows
    double alpha = 1.0;
    std::size_t block = n_mixed;
    for (std::size_t id = 0; id < n_mixed; ++id) {
      if (active[id]) continue;
      const double gd = ws.row_dot(ws.mixed_rows[id], d);
      if (gd > 1e-12) {
        const double slack = ws.mixed_rows[id].rhs - ws.row_dot(ws.mixed_rows[id], z_cur);
        const double ratio = std::max(0.0, slack) / gd;
        if (ratio < alpha - 1e-15) {
          alpha = ratio;
          block = id;
        }
      }
    }
    z_cur = axpy(alpha, d, z_cur);
    if (block != n_mixed && alpha < 1.0) {
      active[block] = 1;
      need_solve = true;
    } else {
      z_cur = z;  // full step to the EQP optimum
    }
  }

  out.trajectory = extract_trajectory(ws, z);
  out.value = discrete_objective(ocp, out.trajectory);
  out.kkt_residual = recompute_kkt(ws, z, eqp, lambda, active);
  out.dyn_residual = dynamics_residual(ocp, out.trajectory);
  out.mixed_violation = 0.0;
  for (std::size_t id = 0; id < n_mixed; ++id) {
    const double slack = ws.mixed_rows[id].rhs - ws.row_dot(ws.mixed_rows[id], z);
    out.mixed_violation = std::max(out.mixed_violation, -slack);
  }
  out.status = FixedTerminalResult::Status::ok;
  return out;
}

std::vector<Vec> enumerate_terminal_candidates(const SaaTerminalData& td, const TerminalSet& k,
                                               double epsilon, const ToleranceProfile& tol,
                                               ExecPolicy policy) {
  const LcpSolutionSet set = solve_enumerate(td.lcp(), tol, policy);
  std::vector<Vec> kept;
  for (const Vec& x : set.solutions) {
    const TerminalFeasibility tf = terminal_feasible(td, k, x, epsilon);
    if (tf.feasible) kept.push_back(x);
  }
  return kept;
}

namespace {

// Projected-gradient polish inside the epsilon ball around a candidate,
// restricted to the candidate's complementarity pattern. Gradient of the
// value function uses the terminal-equality multipliers; steps that leave
// the relaxed-feasible region or fail to improve are rejected.
std::pair<Vec, double> refine_candidate(const DiscreteOcp& ocp, const Vec& cand,
                                        double cand_value, int max_iters,
                                        const ToleranceProfile& tol) {
  Vec best = cand;
  double best_value = cand_value;
  const double eps = ocp.epsilon;
  const std::size_t n = cand.size();
  std::vector<bool> in_pattern(n);
  for (std::size_t i = 0; i < n; ++i) in_pattern[i] = cand[i] > tol.zero_atol;

  Vec b = cand;
  double step = 0.5 * eps;
  for (int it = 0; it < max_iters && step > 1e-3 * eps; ++it) {
    FixedTerminalResult r = solve_fixed_terminal(ocp, b, tol);
    if (r.status != FixedTerminalResult::Status::ok) break;
    // grad of total value wrt terminal: 2 f_bar (b - z_ref) + dV/db.
    // dV/db is approximated by central differences on the value of the
    // tracking QP; at these dimensions (n <= 12) this stays cheap relative
    // to the per-candidate solve and avoids sign conventions on multipliers.
    Vec grad(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_pattern[j]) continue;
      const double dd = 1e-2 * eps;
      Vec bp = b, bm = b;
      bp[j] += dd;
      bm[j] -= dd;
      const FixedTerminalResult rp = solve_fixed_terminal(ocp, bp, tol);
      const FixedTerminalResult rm = solve_fixed_terminal(ocp, bm, tol);
      if (rp.status != FixedTerminalResult::Status::ok ||
          rm.status != FixedTerminalResult::Status::ok)
        return {best, best_value};
      grad[j] = (rp.value - rm.value) / (2.0 * dd);
    }
    Vec trial = b;
    for (std::size_t j = 0; j < n; ++j)
      if (in_pattern[j]) trial[j] = std::max(0.0, trial[j] - step * grad[j]);
    // pull back into the epsilon ball around the candidate
    Vec dvec = sub(trial, cand);
    const double dn = norm2(dvec);
    if (dn > eps)
      for (std::size_t j = 0; j < n; ++j) trial[j] = cand[j] + dvec[j] * (eps / dn);
    const TerminalFeasibility tf = terminal_feasible(ocp.terminal, ocp.kset, trial, eps);
    if (tf.feasible) {
      const FixedTerminalResult rt = solve_fixed_terminal(ocp, trial, tol);
      if (rt.status == FixedTerminalResult::Status::ok && rt.value < best_value - 1e-14) {
        best = trial;
        best_value = rt.value;
        b = trial;
        continue;
      }
    }
    step *= 0.5;
  }
  return {best, best_value};
}

}  // namespace

SolveReport solve_relaxed(const DiscreteOcp& ocp, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  const std::vector<Vec> candidates =
      enumerate_terminal_candidates(ocp.terminal, ocp.kset, ocp.epsilon, opts.tol, opts.policy);
  if (candidates.empty()) {
    rep.status = SolveReport::Status::no_candidates;
    return rep;
  }

  std::size_t best = candidates.size();
  double best_value = 0.0;
  FixedTerminalResult best_result;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CandidateOutcome row;
    row.terminal = candidates[i];
    FixedTerminalResult r = solve_fixed_terminal(ocp, candidates[i], opts.tol);
    if (r.status == FixedTerminalResult::Status::ok) {
      row.solved = true;
      row.value = r.value;
      const bool better =
          best == candidates.size() || r.value < best_value - 1e-12 ||
          (std::abs(r.value - best_value) <= 1e-12 &&
           std::lexicographical_compare(candidates[i].begin(), candidates[i].end(),
                                        candidates[best].begin(), candidates[best].end()));
      if (better) {
        best = i;
        best_value = r.value;
        best_result = std::move(r);
      }
    } else {
      switch (r.status) {
        case FixedTerminalResult::Status::infeasible: row.note = "infeasible"; break;
        case FixedTerminalResult::Status::singular: row.note = "singular"; break;
        case FixedTerminalResult::Status::max_iter: row.note = "max_iter"; break;
        default: row.note = "failed";
      }
    }
    rep.candidates.push_back(std::move(row));
  }

  if (best == candidates.size()) {
    rep.status = SolveReport::Status::all_failed;
    return rep;
  }

  Vec chosen = candidates[best];
  double chosen_value = best_value;
  if (opts.refine) {
    auto [rb, rv] = refine_candidate(ocp, chosen, chosen_value, opts.refine_max_iters, opts.tol);
    if (rv < chosen_value) {
      chosen = rb;
      chosen_value = rv;
      best_result = solve_fixed_terminal(ocp, chosen, opts.tol);
    }
  }

  rep.status = SolveReport::Status::ok;
  rep.chosen_terminal = chosen;
  rep.value = chosen_value;
  rep.trajectory = best_result.trajectory;
  rep.kkt_residual = best_result.kkt_residual;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace slcc
