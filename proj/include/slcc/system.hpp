#pragma once

#include <optional>
#include <vector>

#include "slcc/lcp.hpp"
#include "slcc/matrix.hpp"

namespace slcc {

/// Signal on [0,T]: either a constant vector or values tabulated on given
/// nodes with linear interpolation (clamped outside the tabulated range).
struct TimeSignal {
  enum class Kind { constant, tabulated } kind = Kind::constant;
  Vec value;                      // constant
  std::vector<double> times;      // tabulated, strictly increasing
  std::vector<Vec> values;

  static TimeSignal constant(Vec v);
  static TimeSignal tabulated(std::vector<double> t, std::vector<Vec> v);
  std::size_t dim() const;
  Vec eval(double t) const;
};

/// Linear control system with mixed state-control inequality constraints and
/// quadratic tracking data. Requires l < m and consistent dimensions; the
/// l = m square-invertible case is rejected by construction.
struct ControlSystem {
  Matrix a;   // n x n
  Matrix b;   // n x m
  Matrix c;   // l x n
  Matrix d;   // l x m
  TimeSignal f;    // R^l
  Vec x0;          // R^n
  double horizon_t = 1.0;
  TimeSignal x_d;  // R^n
  TimeSignal u_d;  // R^m
  double delta = 1.0;

  std::size_t n() const { return a.rows; }
  std::size_t m() const { return b.cols; }
  std::size_t l() const { return c.rows; }
  void validate() const;  // throws std::invalid_argument with a reason
};

struct DistSpec {
  enum class Kind { normal, uniform } kind = Kind::normal;
  double p1 = 0.0;  // mean | lo
  double p2 = 1.0;  // variance | hi

  static DistSpec normal(double mean, double variance);
  static DistSpec uniform(double lo, double hi);
  double mean() const;
  double variance() const;
  double moment2() const;  // E[X^2]
  double moment3() const;
  double moment4() const;
};

/// Stochastic problem data, affine in xi:
///   M(xi) = M0 + sum_k xi_k M_k,   q(xi) = q0 + sum_k xi_k q_k,
///   g(z, xi) = (G0 + sum_k xi_k G_k) z + (g0 + sum_k xi_k g_k),
///   F(z, xi) = (c0 + sum_k c_k xi_k + sum_k c_kk xi_k^2) * ||z - z_ref||^2.
struct StochasticData {
  std::vector<DistSpec> dists;
  Matrix m0;
  std::vector<Matrix> m_k;
  Vec q0;
  std::vector<Vec> q_k;
  Matrix g_mat0;
  std::vector<Matrix> g_mat_k;
  Vec g_vec0;
  std::vector<Vec> g_vec_k;
  double f_c0 = 0.0;
  Vec f_lin;   // c_k, one per xi component
  Vec f_quad;  // c_kk
  Vec z_ref;

  std::size_t dim_xi() const { return dists.size(); }
  std::size_t n() const { return m0.rows; }
  void validate() const;
  double fweight_mean() const;  // E of the xi polynomial; must be > 0
};

struct TerminalSet {
  enum class Kind { ball, box, polyhedron } kind = Kind::ball;
  Vec center;
  double radius = 1.0;
  Vec lo, hi;
  Matrix h_mat;  // polyhedron: h_mat z <= h_vec
  Vec h_vec;

  static TerminalSet ball(Vec center, double radius);
  static TerminalSet box(Vec lo, Vec hi);
  static TerminalSet polyhedron(Matrix h, Vec rhs);  // checks nonemptiness
  std::size_t dim() const;
};

struct Assumption12Report {
  bool d_full_rank = false;
  Matrix y;        // kernel basis of D
  Matrix d_pinv;   // right pseudoinverse of D
  Matrix r_matrix; // [BY, (A-BD†C)BY, ..., (A-BD†C)^{n-1}BY]
  bool r_full_rank = false;
};

/// Controllability structure check: D full row rank and the n x n(m-l)
/// block matrix built from BY and powers of A - B D† C full row rank.
Assumption12Report check_assumption_12(const ControlSystem& sys, const ToleranceProfile& tol = {});

/// Expectation LCP data (E[M], E[q]) from exact first moments.
LcpInstance expectation_lcp(const StochasticData& sd);

/// E[g(z, xi)] from exact first moments.
Vec expected_g(const StochasticData& sd, const Vec& z);

/// Euclidean distance to the terminal set; closed form for ball and box,
/// projection QP for polyhedra.
double dist_to_set(const TerminalSet& k, const Vec& z);

enum class MatrixClassCond { z, adequate, fails };

struct Theorem21Report {
  bool cond_ball_in_k = false;       // literal sufficient condition, surrogate kappa2
  bool surrogate_valid = true;       // false when the affine g offset is nonzero
  double kappa2_surrogate = 0.0;
  double beta = 0.0;
  double ball_radius = 0.0;          // beta * kappa2 * ||E q||_1
  bool cond_v_nonempty = false;
  MatrixClassCond cond_matrix_class = MatrixClassCond::fails;
  bool cond_constructive = false;    // some enumerated LCP solution passes the K filter
  bool feasible = false;
};

/// Existence conditions for the terminal system. The ball condition uses a
/// computable Lipschitz surrogate (see report fields); feasibility combines
/// it with the constructive certificate so that problems whose sparse
/// solution lands in K are accepted even when the blanket ball test is
/// conservative.
Theorem21Report check_theorem21(const ControlSystem& sys, const StochasticData& sd,
                                const TerminalSet& k, const ToleranceProfile& tol = {});

}  // namespace slcc
