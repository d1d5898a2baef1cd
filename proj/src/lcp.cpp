#include "slcc/lcp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slcc/linprog.hpp"
#include "slcc/rng.hpp"

namespace slcc {

namespace {

double det(const Matrix& a, const ToleranceProfile& tol) {
  const std::size_t n = a.rows;
  Matrix w = a;
  double sign = 1.0;
  double max_entry = 0.0;
  for (double v : w.a) max_entry = std::max(max_entry, std::abs(v));
  const double floor = tol.rank_rtol * std::max(max_entry, 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(w(i, k)) > std::abs(w(p, k))) p = i;
    if (std::abs(w(p, k)) < floor) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(w(p, j), w(k, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = w(i, k) / w(k, k);
      for (std::size_t j = k + 1; j < n; ++j) w(i, j) -= f * w(k, j);
    }
  }
  double d = sign;
  for (std::size_t k = 0; k < n; ++k) d *= w(k, k);
  return d;
}

Matrix principal_submatrix(const Matrix& m, std::uint32_t mask) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.rows; ++i)
    if (mask & (1u << i)) idx.push_back(i);
  Matrix s(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = m(idx[a], idx[b]);
  return s;
}

bool psd_by_pivoted_cholesky(const Matrix& m, const ToleranceProfile& tol) {
  const std::size_t n = m.rows;
  Matrix w = m;
  double scale = 0.0;
  for (double v : w.a) scale = std::max(scale, std::abs(v));
  const double eps = tol.zero_atol * std::max(scale, 1.0);
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t p = n;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && w(i, i) > best) {
        best = w(i, i);
        p = i;
      }
    if (p == n) break;
    if (best < -eps) return false;
    if (best <= eps) {
      // remaining block must vanish for PSD
      for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!done[j] && std::abs(w(i, j)) > std::sqrt(eps) * std::max(scale, 1.0)) return false;
      }
      return true;
    }
    done[p] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const double f = w(i, p) / best;
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j]) w(i, j) -= f * w(p, j);
    }
  }
  return true;
}

// Column adequacy falsification: z with z_i (Mz)_i <= 0 for all i but Mz != 0.
bool falsify_column_adequacy(const Matrix& m, const ToleranceProfile& tol) {
  const std::size_t n = m.rows;
  double scale = 0.0;
  for (double v : m.a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;  // zero matrix is adequate
  const double sign_tol = tol.zero_atol * scale;
  const double nonzero_tol = 1e-6 * scale;

  auto witnesses = [&](const Vec& z) {
    const Vec mz = matvec(m, z);
    if (norm_inf(mz) <= nonzero_tol) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (z[i] * mz[i] > sign_tol) return false;
    return true;
  };

  // Deterministic sweep over {-1,0,1}^n patterns when small.
  if (n <= 8) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    for (std::uint64_t code = 1; code < total; ++code) {
      std::uint64_t c = code;
      Vec z(n);
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = static_cast<double>(static_cast<int>(c % 3) - 1);
        c /= 3;
      }
      if (witnesses(z)) return true;
    }
  }
  // Randomized: sign patterns x Gaussian magnitudes, fixed internal seed.
  const std::uint64_t seed = 0x5adecafeULL;
  for (std::uint64_t trial = 0; trial < 10000; ++trial) {
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bits = counter_u64(seed, trial, i);
      const int s = static_cast<int>(bits % 3) - 1;
      const double mag = std::abs(inv_normal_cdf(u01_open(mix64(bits))));
      z[i] = s * mag;
    }
    if (witnesses(z)) return true;
  }
  return false;
}

std::optional<Vec> solve_consistent_min_norm(const Matrix& s, const Vec& rhs,
                                             const ToleranceProfile& tol) {
  const std::size_t n = s.rows;
  // complete-pivot elimination on the augmented system
  Matrix w = hcat(s, Matrix::from_rows({rhs}).transposed());
  std::vector<std::size_t> colperm(n);
  for (std::size_t i = 0; i < n; ++i) colperm[i] = i;
  std::size_t rk = 0;
  double first_pivot = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pi = step, pj = step;
    double best = 0.0;
    for (std::size_t i = step; i < n; ++i)
      for (std::size_t j = step; j < n; ++j)
        if (std::abs(w(i, j)) > best) {
          best = std::abs(w(i, j));
          pi = i;
          pj = j;
        }
    if (step == 0) first_pivot = best;
    if (best < tol.rank_rtol * std::max(first_pivot, 1e-300) || best == 0.0) break;
    if (pi != step)
      for (std::size_t j = 0; j <= n; ++j) std::swap(w(pi, j), w(step, j));
    if (pj != step) {
      for (std::size_t i = 0; i < n; ++i) std::swap(w(i, pj), w(i, step));
      std::swap(colperm[pj], colperm[step]);
    }
    ++rk;
    for (std::size_t i = step + 1; i < n; ++i) {
      const double f = w(i, step) / w(step, step);
      if (f == 0.0) continue;
      for (std::size_t j = step; j <= n; ++j) w(i, j) -= f * w(step, j);
    }
  }
  const double rhs_scale = std::max(norm_inf(rhs), 1.0);
  for (std::size_t i = rk; i < n; ++i)
    if (std::abs(w(i, n)) > 1e-9 * rhs_scale) return std::nullopt;  // inconsistent

  Vec zp(n, 0.0);  // particular solution, free variables zero (permuted coords)
  for (std::size_t ii = rk; ii-- > 0;) {
    double acc = w(ii, n);
    for (std::size_t j = ii + 1; j < n; ++j) acc -= w(ii, j) * zp[j];
    zp[ii] = acc / w(ii, ii);
  }
  Vec x(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) x[colperm[j]] = zp[j];

  // project out the kernel component for the minimum-norm representative
  const Matrix null = kernel_basis(s, tol);
  for (std::size_t k = 0; k < null.cols; ++k) {
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += null(i, k) * x[i];
    for (std::size_t i = 0; i < n; ++i) x[i] -= proj * null(i, k);
  }
  return x;
}

// One enumeration pattern: mask selects J. Returns the assembled full-space
// candidate when the pattern system is solvable (nullopt otherwise) and
// flags singular-but-consistent patterns.
struct PatternOutcome {
  std::optional<Vec> x;
  bool singular_consistent = false;
};

PatternOutcome try_pattern(const LcpInstance& inst, std::uint32_t mask,
                           const ToleranceProfile& tol) {
  const std::size_t n = inst.m.rows;
  PatternOutcome out;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (mask & (1u << i)) idx.push_back(i);

  Vec xj;
  if (!idx.empty()) {
    Matrix s(idx.size(), idx.size());
    Vec rhs(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      rhs[a] = -inst.q[idx[a]];
      for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = inst.m(idx[a], idx[b]);
    }
    auto direct = lu_solve(s, rhs, tol);
    if (direct) {
      xj = *direct;
    } else {
      auto mn = solve_consistent_min_norm(s, rhs, tol);
      if (!mn) return out;
      xj = *mn;
      out.singular_consistent = true;
    }
  }

  Vec x(n, 0.0);
  for (std::size_t a = 0; a < idx.size(); ++a) x[idx[a]] = xj[a];
  for (std::size_t a = 0; a < idx.size(); ++a)
    if (x[idx[a]] < -tol.zero_atol) return out;
  const Vec w = axpy(1.0, matvec(inst.m, x), inst.q);
  for (std::size_t i = 0; i < n; ++i)
    if (!(mask & (1u << i)) && w[i] < -tol.zero_atol) return out;
  // final guard: the kept vector must be a numerical solution
  auto [rvec, rnorm] = natural_residual(inst, x);
  (void)rvec;
  if (rnorm > 1e-8) return out;
  out.x = std::move(x);
  return out;
}

}  // namespace

MatrixClassReport classify(const Matrix& m, const ToleranceProfile& tol) {
  if (m.rows != m.cols) throw std::invalid_argument("classify: matrix not square");
  const std::size_t n = m.rows;
  MatrixClassReport rep;

  rep.is_z = true;
  for (std::size_t i = 0; i < n && rep.is_z; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && m(i, j) > tol.zero_atol) {
        rep.is_z = false;
        break;
      }

  if (n <= 12) {
    bool all_positive = true;
    const std::uint32_t full = (n >= 32) ? 0xffffffffu : ((1u << n) - 1);
    for (std::uint32_t mask = 1; mask <= full && all_positive; ++mask)
      if (det(principal_submatrix(m, mask), tol) <= 0.0) all_positive = false;
    rep.is_p = all_positive ? TriState::yes : TriState::no;
  } else {
    rep.is_p = TriState::unknown;
  }

  bool symmetric = true;
  for (std::size_t i = 0; i < n && symmetric; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol.zero_atol) {
        symmetric = false;
        break;
      }
  rep.psd_symmetric = symmetric && psd_by_pivoted_cholesky(m, tol);

  if (rep.is_p == TriState::yes || rep.psd_symmetric) {
    rep.adequacy = TriState::yes;
  } else if (falsify_column_adequacy(m, tol) ||
             falsify_column_adequacy(m.transposed(), tol)) {
    rep.adequacy = TriState::no;
  } else {
    rep.adequacy = TriState::unknown;
  }
  return rep;
}

std::pair<Vec, double> natural_residual(const LcpInstance& inst, const Vec& x) {
  if (inst.m.rows != x.size()) throw std::invalid_argument("natural_residual: dim mismatch");
  Vec w = axpy(1.0, matvec(inst.m, x), inst.q);
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::min(x[i], w[i]);
  return {r, norm2(r)};
}

LcpSolutionSet solve_enumerate(const LcpInstance& inst, const ToleranceProfile& tol,
                               ExecPolicy policy) {
  const std::size_t n = inst.m.rows;
  if (inst.m.cols != n || inst.q.size() != n)
    throw std::invalid_argument("solve_enumerate: dimension mismatch");
  if (n > 20) throw std::invalid_argument("solve_enumerate: too_large (n > 20)");

  const std::uint32_t count = 1u << n;
  std::vector<PatternOutcome> outcomes(count);
  if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (long long mask = 0; mask < static_cast<long long>(count); ++mask)
      outcomes[mask] = try_pattern(inst, static_cast<std::uint32_t>(mask), tol);
  } else {
    for (std::uint32_t mask = 0; mask < count; ++mask)
      outcomes[mask] = try_pattern(inst, mask, tol);
  }

  LcpSolutionSet set;
  for (std::uint32_t mask = 0; mask < count; ++mask) {  // merge in pattern order
    const auto& out = outcomes[mask];
    if (!out.x) continue;
    if (out.singular_consistent) set.has_nonisolated = true;
    bool dup = false;
    for (const Vec& prev : set.solutions)
      if (norm_inf(sub(prev, *out.x)) <= 1e-8) {
        dup = true;
        break;
      }
    if (!dup) {
      set.solutions.push_back(*out.x);
      set.patterns.push_back(mask);
    }
  }
  return set;
}

LeastElementResult solve_least_element(const LcpInstance& inst, const ToleranceProfile& tol) {
  const std::size_t n = inst.m.rows;
  if (!classify(inst.m, tol).is_z) return {LeastElementStatus::not_z, {}};

  LpProblem lp;
  lp.c.assign(n, 1.0);
  lp.g = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lp.g(i, j) = -inst.m(i, j);
  lp.w = inst.q;
  lp.nonneg = true;
  LpResult r = lp_solve(lp);
  if (r.status != LpStatus::optimal) return {LeastElementStatus::infeasible, {}};

  Vec x = r.x;
  for (double& v : x)
    if (std::abs(v) <= tol.zero_atol) v = 0.0;

  // Polish on the support pattern for clean complementarity.
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > 0.0) idx.push_back(i);
  if (!idx.empty()) {
    Matrix s(idx.size(), idx.size());
    Vec rhs(idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
      rhs[a] = -inst.q[idx[a]];
      for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = inst.m(idx[a], idx[b]);
    }
    if (auto refined = lu_solve(s, rhs, tol)) {
      Vec cand(n, 0.0);
      bool ok = true;
      for (std::size_t a = 0; a < idx.size(); ++a) {
        cand[idx[a]] = (*refined)[a];
        if ((*refined)[a] < -tol.zero_atol) ok = false;
      }
      if (ok && natural_residual(inst, cand).second <= 1e-8) x = cand;
    }
  }
  return {LeastElementStatus::ok, x};
}

std::optional<std::pair<Vec, std::size_t>> sparse_solution(const LcpSolutionSet& set,
                                                           const ToleranceProfile& tol) {
  if (set.solutions.empty()) return std::nullopt;
  auto support = [&](const Vec& x) {
    std::size_t s = 0;
    for (double v : x)
      if (std::abs(v) > tol.zero_atol) ++s;
    return s;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < set.solutions.size(); ++i) {
    const auto& a = set.solutions[i];
    const auto& b = set.solutions[best];
    const std::size_t sa = support(a), sb = support(b);
    if (sa != sb) {
      if (sa < sb) best = i;
      continue;
    }
    const double na = norm1(a), nb = norm1(b);
    if (std::abs(na - nb) > tol.zero_atol) {
      if (na < nb) best = i;
      continue;
    }
    if (std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end())) best = i;
  }
  return std::make_pair(set.solutions[best], support(set.solutions[best]));
}

double beta_constant(const Matrix& m, const ToleranceProfile& tol, ExecPolicy policy) {
  if (m.rows != m.cols) throw std::invalid_argument("beta_constant: matrix not square");
  const std::size_t n = m.rows;
  if (n > 20) throw std::invalid_argument("beta_constant: too_large (n > 20)");
  const std::uint32_t count = 1u << n;

  double best = 0.0;
  bool any = false;
  if (policy == ExecPolicy::parallel) {
#pragma omp parallel
    {
      double local_best = 0.0;
      bool local_any = false;
#pragma omp for schedule(dynamic, 64) nowait
      for (long long mask = 1; mask < static_cast<long long>(count); ++mask) {
        auto inv = inverse(principal_submatrix(m, static_cast<std::uint32_t>(mask)), tol);
        if (inv) {
          local_any = true;
          local_best = std::max(local_best, norm1_induced(*inv));
        }
      }
#pragma omp critical
      {
        any = any || local_any;
        best = std::max(best, local_best);
      }
    }
  } else {
    for (std::uint32_t mask = 1; mask < count; ++mask) {
      auto inv = inverse(principal_submatrix(m, mask), tol);
      if (inv) {
        any = true;
        best = std::max(best, norm1_induced(*inv));
      }
    }
  }
  return any ? best : 1.0;
}

std::optional<bool> sparse_bound_check(const LcpInstance& inst, const ToleranceProfile& tol) {
  const LcpSolutionSet set = solve_enumerate(inst, tol);
  auto sparse = sparse_solution(set, tol);
  if (!sparse) return std::nullopt;
  const double beta = beta_constant(inst.m, tol);
  return norm2(sparse->first) <= beta * norm1(inst.q) + tol.zero_atol;
}

}  // namespace slcc
