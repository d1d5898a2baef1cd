#include "slcc/discretize.hpp"

#include <cmath>
#include <stdexcept>

namespace slcc {

Grid make_grid(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0)) throw std::invalid_argument("grid: horizon must be positive");
  if (n_steps < 1) throw std::invalid_argument("grid: need at least one step");
  Grid g;
  g.horizon = horizon;
  g.n_steps = n_steps;
  g.h = horizon / static_cast<double>(n_steps);
  return g;
}

Grid grid_from_step(double horizon, double h) {
  if (!(h > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("grid: positive h, T required");
  const double ratio = horizon / h;
  const auto n = static_cast<std::size_t>(std::llround(ratio));
  if (n < 1 || std::abs(static_cast<double>(n) * h - horizon) >
                   4.0 * std::numeric_limits<double>::epsilon() * horizon)
    throw std::invalid_argument("grid: step does not divide the horizon");
  return make_grid(horizon, n);
}

DiscreteOcp transcribe(const ControlSystem& sys, const StochasticData& sd,
                       const SampleSet* samples, const Grid& grid, double epsilon,
                       const TerminalSet& k) {
  sys.validate();
  sd.validate();
  const double a_norm = norm_inf_induced(sys.a);
  if (a_norm > 0.0 && grid.h >= 1.0 / (2.0 * a_norm))
    throw std::invalid_argument("transcribe: step_too_large (h >= 1/(2||A||))");

  DiscreteOcp ocp;
  ocp.grid = grid;
  const std::size_t n = sys.n();
  ocp.dyn_lhs = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ocp.dyn_lhs(i, j) -= grid.h * sys.a(i, j);
  ocp.input_map = sys.b;
  for (double& v : ocp.input_map.a) v *= grid.h;
  ocp.c = sys.c;
  ocp.d = sys.d;
  ocp.x0 = sys.x0;
  ocp.delta = sys.delta;
  ocp.f_nodes.reserve(grid.n_steps);
  ocp.xd_nodes.reserve(grid.n_steps);
  ocp.ud_nodes.reserve(grid.n_steps);
  for (std::size_t i = 1; i <= grid.n_steps; ++i) {
    const double t = grid.node(i);
    ocp.f_nodes.push_back(sys.f.eval(t));
    ocp.xd_nodes.push_back(sys.x_d.eval(t));
    ocp.ud_nodes.push_back(sys.u_d.eval(t));
  }
  ocp.terminal = samples ? terminal_data(sd, *samples) : exact_terminal_data(sd);
  ocp.kset = k;
  ocp.epsilon = epsilon;
  return ocp;
}

std::optional<Matrix> a_h_matrix(const ControlSystem& sys, double h,
                                 const ToleranceProfile& tol) {
  const Assumption12Report rep = check_assumption_12(sys, tol);
  if (!rep.d_full_rank) return std::nullopt;
  const Matrix bdc = matmul(matmul(sys.b, rep.d_pinv), sys.c);
  Matrix ah = Matrix::identity(sys.n());
  for (std::size_t i = 0; i < sys.n(); ++i)
    for (std::size_t j = 0; j < sys.n(); ++j) ah(i, j) -= h * (sys.a(i, j) - bdc(i, j));
  if (!inverse(ah, tol)) return std::nullopt;  // singular_a_h
  return ah;
}

std::optional<DiscreteControllabilityReport> discrete_controllability(
    const ControlSystem& sys, double h, const ToleranceProfile& tol) {
  const auto ah = a_h_matrix(sys, h, tol);
  if (!ah) return std::nullopt;
  const auto ah_inv = inverse(*ah, tol);
  if (!ah_inv) return std::nullopt;
  const Assumption12Report rep = check_assumption_12(sys, tol);

  Matrix by = matmul(sys.b, rep.y);
  for (double& v : by.a) v *= h;

  DiscreteControllabilityReport out;
  Matrix block = matmul(*ah_inv, by);  // h A_h⁻¹ BY
  out.r_d = block;
  for (std::size_t p = 1; p < sys.n(); ++p) {
    block = matmul(*ah_inv, block);
    out.r_d = hcat(out.r_d, block);
  }
  out.full_rank = rank(out.r_d, tol) == sys.n();
  return out;
}

double dynamics_residual(const DiscreteOcp& ocp, const DiscreteTrajectory& traj) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ocp.grid.n_steps; ++i) {
    Vec r = matvec(ocp.dyn_lhs, traj.states[i + 1]);
    const Vec bu = matvec(ocp.input_map, traj.controls[i]);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= traj.states[i][j] + bu[j];
    worst = std::max(worst, norm_inf(r));
  }
  return worst;
}

Interpolant::Interpolant(DiscreteTrajectory traj, Grid grid)
    : traj_(std::move(traj)), grid_(grid) {
  if (traj_.states.size() != grid_.n_steps + 1 || traj_.controls.size() != grid_.n_steps)
    throw std::invalid_argument("interpolate: trajectory inconsistent with grid");
}

Vec Interpolant::state_at(double t) const {
  const std::size_t n_cells = grid_.n_steps;
  if (t <= 0.0) return traj_.states.front();
  if (t >= grid_.horizon) return traj_.states.back();
  auto i = static_cast<std::size_t>(t / grid_.h);
  if (i >= n_cells) i = n_cells - 1;
  if (t == grid_.node(i)) return traj_.states[i];  // node values reproduced exactly
  if (t == grid_.node(i + 1)) return traj_.states[i + 1];
  const double w = (t - grid_.node(i)) / grid_.h;
  Vec r(traj_.states[i].size());
  for (std::size_t j = 0; j < r.size(); ++j)
    r[j] = traj_.states[i][j] + w * (traj_.states[i + 1][j] - traj_.states[i][j]);
  return r;
}

Vec Interpolant::control_at(double t) const {
  // u_h constant on the half-open cell (t_i, t_{i+1}]; u_h(0) := u_1
  if (t <= 0.0) return traj_.controls.front();
  if (t >= grid_.horizon) return traj_.controls.back();
  auto i = static_cast<std::size_t>(t / grid_.h);
  if (t == grid_.node(i)) return traj_.controls[i == 0 ? 0 : i - 1];  // right endpoint of cell i-1
  if (i >= grid_.n_steps) i = grid_.n_steps - 1;
  return traj_.controls[i];
}

Interpolant interpolate(const DiscreteTrajectory& traj, const Grid& grid) {
  return Interpolant(traj, grid);
}

double discrete_objective(const DiscreteOcp& ocp, const DiscreteTrajectory& traj) {
  if (traj.states.size() != ocp.grid.n_steps + 1 || traj.controls.size() != ocp.grid.n_steps)
    throw std::invalid_argument("discrete_objective: trajectory inconsistent with grid");
  double track_x = 0.0, track_u = 0.0;
  for (std::size_t i = 1; i <= ocp.grid.n_steps; ++i) {
    const Vec dx = sub(traj.states[i], ocp.xd_nodes[i - 1]);
    const Vec du = sub(traj.controls[i - 1], ocp.ud_nodes[i - 1]);
    track_x += dot(dx, dx);
    track_u += dot(du, du);
  }
  track_x *= 0.5 * ocp.grid.h;
  track_u *= 0.5 * ocp.grid.h * ocp.delta;
  return saa_objective(ocp.terminal, traj.states.back(), track_x, track_u);
}

}  // namespace slcc
