#include "slcc/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slcc/linprog.hpp"
#include "slcc/qp.hpp"

namespace slcc {

TimeSignal TimeSignal::constant(Vec v) {
  TimeSignal s;
  s.kind = Kind::constant;
  s.value = std::move(v);
  return s;
}

TimeSignal TimeSignal::tabulated(std::vector<double> t, std::vector<Vec> v) {
  if (t.size() != v.size() || t.empty())
    throw std::invalid_argument("TimeSignal: node/value count mismatch");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("TimeSignal: nodes not increasing");
  for (const Vec& x : v) {
    if (x.size() != v.front().size()) throw std::invalid_argument("TimeSignal: ragged values");
    for (double e : x)
      if (!std::isfinite(e)) throw std::invalid_argument("TimeSignal: non-finite value");
  }
  TimeSignal s;
  s.kind = Kind::tabulated;
  s.times = std::move(t);
  s.values = std::move(v);
  return s;
}

std::size_t TimeSignal::dim() const {
  return kind == Kind::constant ? value.size() : values.front().size();
}

Vec TimeSignal::eval(double t) const {
  if (kind == Kind::constant) return value;
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  Vec r(values[lo].size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (1.0 - w) * values[lo][i] + w * values[hi][i];
  return r;
}

void ControlSystem::validate() const {
  const std::size_t nn = a.rows, mm = b.cols, ll = c.rows;
  if (a.cols != nn) throw std::invalid_argument("system: A must be square");
  if (b.rows != nn) throw std::invalid_argument("system: B row count != n");
  if (c.cols != nn) throw std::invalid_argument("system: C col count != n");
  if (d.rows != ll || d.cols != mm) throw std::invalid_argument("system: D must be l x m");
  if (ll >= mm)
    throw std::invalid_argument("system: requires l < m (square invertible D not supported)");
  if (x0.size() != nn) throw std::invalid_argument("system: x0 dimension != n");
  if (!(horizon_t > 0.0)) throw std::invalid_argument("system: T must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("system: delta must be positive");
  if (f.dim() != ll) throw std::invalid_argument("system: f dimension != l");
  if (x_d.dim() != nn) throw std::invalid_argument("system: x_d dimension != n");
  if (u_d.dim() != mm) throw std::invalid_argument("system: u_d dimension != m");
  for (const Matrix* mat : {&a, &b, &c, &d})
    for (double v : mat->a)
      if (!std::isfinite(v)) throw std::invalid_argument("system: non-finite matrix entry");
}

DistSpec DistSpec::normal(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("normal: variance must be positive");
  return {Kind::normal, mean, variance};
}

DistSpec DistSpec::uniform(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform: requires lo < hi");
  return {Kind::uniform, lo, hi};
}

double DistSpec::mean() const {
  return kind == Kind::normal ? p1 : 0.5 * (p1 + p2);
}

double DistSpec::variance() const {
  if (kind == Kind::normal) return p2;
  const double w = p2 - p1;
  return w * w / 12.0;
}

double DistSpec::moment2() const {
  const double mu = mean();
  return mu * mu + variance();
}

double DistSpec::moment3() const {
  if (kind == Kind::normal) {
    const double mu = p1, s2 = p2;
    return mu * mu * mu + 3.0 * mu * s2;
  }
  const double a = p1, b = p2;
  return (a + b) * (a * a + b * b) / 4.0;
}

double DistSpec::moment4() const {
  if (kind == Kind::normal) {
    const double mu = p1, s2 = p2;
    return mu * mu * mu * mu + 6.0 * mu * mu * s2 + 3.0 * s2 * s2;
  }
  const double a = p1, b = p2;
  return (a * a * a * a + a * a * a * b + a * a * b * b + a * b * b * b + b * b * b * b) / 5.0;
}

void StochasticData::validate() const {
  const std::size_t d = dists.size();
  const std::size_t nn = m0.rows;
  if (m0.cols != nn) throw std::invalid_argument("stochastic: M0 must be square");
  if (m_k.size() != d || q_k.size() != d || g_mat_k.size() != d || g_vec_k.size() != d)
    throw std::invalid_argument("stochastic: per-component stack count != dim(xi)");
  if (q0.size() != nn) throw std::invalid_argument("stochastic: q0 dimension != n");
  for (const Matrix& mk : m_k)
    if (mk.rows != nn || mk.cols != nn) throw std::invalid_argument("stochastic: M_k dims");
  for (const Vec& qk : q_k)
    if (qk.size() != nn) throw std::invalid_argument("stochastic: q_k dims");
  if (g_mat0.cols != nn) throw std::invalid_argument("stochastic: G0 col count != n");
  const std::size_t ell = g_mat0.rows;
  if (g_vec0.size() != ell) throw std::invalid_argument("stochastic: g0 dims");
  for (const Matrix& gk : g_mat_k)
    if (gk.rows != ell || gk.cols != nn) throw std::invalid_argument("stochastic: G_k dims");
  for (const Vec& gk : g_vec_k)
    if (gk.size() != ell) throw std::invalid_argument("stochastic: g_k dims");
  if (f_lin.size() != d || f_quad.size() != d)
    throw std::invalid_argument("stochastic: F weight stacks != dim(xi)");
  if (z_ref.size() != nn) throw std::invalid_argument("stochastic: z_ref dimension != n");
  if (!(fweight_mean() > 0.0))
    throw std::invalid_argument("stochastic: E[F weight] must be positive");
}

double StochasticData::fweight_mean() const {
  double w = f_c0;
  for (std::size_t k = 0; k < dists.size(); ++k)
    w += f_lin[k] * dists[k].mean() + f_quad[k] * dists[k].moment2();
  return w;
}

TerminalSet TerminalSet::ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("terminal_set: radius must be positive");
  TerminalSet k;
  k.kind = Kind::ball;
  k.center = std::move(center);
  k.radius = radius;
  return k;
}

TerminalSet TerminalSet::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("terminal_set: box dims");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("terminal_set: box requires lo <= hi");
  TerminalSet k;
  k.kind = Kind::box;
  k.lo = std::move(lo);
  k.hi = std::move(hi);
  return k;
}

TerminalSet TerminalSet::polyhedron(Matrix h, Vec rhs) {
  if (h.rows != rhs.size()) throw std::invalid_argument("terminal_set: polyhedron dims");
  if (!lp_feasible(h.cols, h, rhs, Matrix(), Vec()))
    throw std::invalid_argument("terminal_set: polyhedron is empty");
  TerminalSet k;
  k.kind = Kind::polyhedron;
  k.h_mat = std::move(h);
  k.h_vec = std::move(rhs);
  return k;
}

std::size_t TerminalSet::dim() const {
  switch (kind) {
    case Kind::ball: return center.size();
    case Kind::box: return lo.size();
    default: return h_mat.cols;
  }
}

Assumption12Report check_assumption_12(const ControlSystem& sys, const ToleranceProfile& tol) {
  sys.validate();
  Assumption12Report rep;
  rep.d_full_rank = rank(sys.d, tol) == sys.d.rows;
  rep.y = kernel_basis(sys.d, tol);
  if (!rep.d_full_rank) return rep;
  rep.d_pinv = *pinv_right(sys.d, tol);

  const Matrix by = matmul(sys.b, rep.y);
  const Matrix abar = [&] {
    Matrix t = matmul(matmul(sys.b, rep.d_pinv), sys.c);
    Matrix r = sys.a;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= t.a[i];
    return r;
  }();

  Matrix block = by;
  rep.r_matrix = by;
  for (std::size_t p = 1; p < sys.n(); ++p) {
    block = matmul(abar, block);
    rep.r_matrix = hcat(rep.r_matrix, block);
  }
  rep.r_full_rank = rank(rep.r_matrix, tol) == sys.n();
  return rep;
}

LcpInstance expectation_lcp(const StochasticData& sd) {
  Matrix m = sd.m0;
  Vec q = sd.q0;
  for (std::size_t k = 0; k < sd.dim_xi(); ++k) {
    const double mu = sd.dists[k].mean();
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += mu * sd.m_k[k].a[i];
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += mu * sd.q_k[k][i];
  }
  return {std::move(m), std::move(q)};
}

Vec expected_g(const StochasticData& sd, const Vec& z) {
  Matrix g = sd.g_mat0;
  Vec off = sd.g_vec0;
  for (std::size_t k = 0; k < sd.dim_xi(); ++k) {
    const double mu = sd.dists[k].mean();
    for (std::size_t i = 0; i < g.a.size(); ++i) g.a[i] += mu * sd.g_mat_k[k].a[i];
    for (std::size_t i = 0; i < off.size(); ++i) off[i] += mu * sd.g_vec_k[k][i];
  }
  return axpy(1.0, matvec(g, z), off);
}

double dist_to_set(const TerminalSet& k, const Vec& z) {
  if (z.size() != k.dim()) throw std::invalid_argument("dist_to_set: dim mismatch");
  switch (k.kind) {
    case TerminalSet::Kind::ball:
      return std::max(0.0, norm2(sub(z, k.center)) - k.radius);
    case TerminalSet::Kind::box: {
      double s = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = std::max({k.lo[i] - z[i], z[i] - k.hi[i], 0.0});
        s += d * d;
      }
      return std::sqrt(s);
    }
    case TerminalSet::Kind::polyhedron: {
      Qp qp;
      const std::size_t n = z.size();
      qp.hessian = Matrix::identity(n);
      qp.linear = scaled(z, -1.0);  // min ½||y||² − zᵀy  ≡  min ½||y − z||²
      qp.ineq_g = k.h_mat;
      qp.ineq_w = k.h_vec;
      QpResult r = qp_solve(qp);
      if (r.status != QpStatus::ok)
        throw std::runtime_error("dist_to_set: projection QP failed");
      return norm2(sub(r.z, z));
    }
  }
  return 0.0;
}

namespace {

// Is the origin-centered ball of the given radius contained in K?
bool ball_in_set(const TerminalSet& k, double radius) {
  switch (k.kind) {
    case TerminalSet::Kind::ball:
      return norm2(k.center) + radius <= k.radius + 1e-12;
    case TerminalSet::Kind::box: {
      for (std::size_t i = 0; i < k.lo.size(); ++i)
        if (k.lo[i] > -radius || k.hi[i] < radius) return false;
      return true;
    }
    case TerminalSet::Kind::polyhedron: {
      for (std::size_t r = 0; r < k.h_mat.rows; ++r) {
        double row_norm = 0.0;
        for (std::size_t j = 0; j < k.h_mat.cols; ++j)
          row_norm += k.h_mat(r, j) * k.h_mat(r, j);
        if (radius * std::sqrt(row_norm) > k.h_vec[r] + 1e-12) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

Theorem21Report check_theorem21(const ControlSystem& sys, const StochasticData& sd,
                                const TerminalSet& k, const ToleranceProfile& tol) {
  (void)sys;
  Theorem21Report rep;
  const LcpInstance inst = expectation_lcp(sd);

  // (iii) matrix class
  const MatrixClassReport cls = classify(inst.m, tol);
  if (cls.is_z)
    rep.cond_matrix_class = MatrixClassCond::z;
  else if (cls.adequacy == TriState::yes)
    rep.cond_matrix_class = MatrixClassCond::adequate;
  else
    rep.cond_matrix_class = MatrixClassCond::fails;

  // (ii) V = {x >= 0 : Mx + q >= 0} nonempty
  if (cls.is_z) {
    rep.cond_v_nonempty =
        solve_least_element(inst, tol).status == LeastElementStatus::ok;
  } else {
    Matrix g(inst.m.rows, inst.m.cols);
    for (std::size_t i = 0; i < g.a.size(); ++i) g.a[i] = -inst.m.a[i];
    Matrix bound(inst.m.rows, inst.m.cols);
    for (std::size_t i = 0; i < inst.m.rows; ++i) bound(i, i) = -1.0;
    rep.cond_v_nonempty =
        lp_feasible(inst.m.cols, vcat(g, bound),
                    [&] {
                      Vec w = inst.q;
                      w.insert(w.end(), inst.m.rows, 0.0);
                      return w;
                    }(),
                    Matrix(), Vec())
            .has_value();
  }

  // (i) ball condition with the operator-norm surrogate for E[kappa2]
  Matrix gbar = sd.g_mat0;
  Vec goff = sd.g_vec0;
  for (std::size_t kk = 0; kk < sd.dim_xi(); ++kk) {
    const double mu = sd.dists[kk].mean();
    for (std::size_t i = 0; i < gbar.a.size(); ++i) gbar.a[i] += mu * sd.g_mat_k[kk].a[i];
    for (std::size_t i = 0; i < goff.size(); ++i) goff[i] += mu * sd.g_vec_k[kk][i];
  }
  rep.surrogate_valid = norm_inf(goff) <= tol.zero_atol;
  rep.kappa2_surrogate = std::sqrt(norm1_induced(gbar) * norm_inf_induced(gbar));
  rep.beta = beta_constant(inst.m, tol);
  rep.ball_radius = rep.beta * rep.kappa2_surrogate * norm1(inst.q);
  rep.cond_ball_in_k = rep.surrogate_valid && ball_in_set(k, rep.ball_radius);

  // constructive certificate: an enumerated solution whose mean g-image is in K
  if (inst.m.rows <= 20) {
    const LcpSolutionSet set = solve_enumerate(inst, tol);
    for (const Vec& x : set.solutions) {
      if (dist_to_set(k, expected_g(sd, x)) <= tol.zero_atol) {
        rep.cond_constructive = true;
        break;
      }
    }
  }

  rep.feasible = rep.cond_v_nonempty && rep.cond_matrix_class != MatrixClassCond::fails &&
                 (rep.cond_ball_in_k || rep.cond_constructive);
  return rep;
}

}  // namespace slcc
