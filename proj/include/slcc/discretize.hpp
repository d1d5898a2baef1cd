#pragma once

#include <optional>

#include "slcc/saa.hpp"
#include "slcc/system.hpp"

namespace slcc {

/// Uniform grid t_i = i h, i = 0..N, h = T/N.
struct Grid {
  std::size_t n_steps = 1;
  double h = 1.0;
  double horizon = 1.0;

  double node(std::size_t i) const { return static_cast<double>(i) * h; }
};

Grid make_grid(double horizon, std::size_t n_steps);

/// Grid from a requested step; the step must divide the horizon to machine
/// precision (N = round(T/h) with |N h - T| <= a few ulp), else throws.
Grid grid_from_step(double horizon, double h);

/// Implicit Euler transcription of the control problem on a grid, with the
/// sample-average (or exact-moment) terminal data attached.
struct DiscreteOcp {
  Grid grid;
  Matrix dyn_lhs;    // I - hA
  Matrix input_map;  // hB
  Matrix c;          // mixed constraint C x_i + D u_i <= f_i at nodes 1..N
  Matrix d;
  std::vector<Vec> f_nodes;   // f(t_i), i = 1..N
  std::vector<Vec> xd_nodes;  // x_d(t_i), i = 1..N
  std::vector<Vec> ud_nodes;  // u_d(t_i), i = 1..N
  Vec x0;
  double delta = 1.0;
  SaaTerminalData terminal;
  TerminalSet kset;
  double epsilon = 1e-5;

  std::size_t n() const { return dyn_lhs.rows; }
  std::size_t m() const { return input_map.cols; }
  std::size_t l() const { return c.rows; }
};

/// Assembles the transcription; samples == nullptr uses exact moments.
/// Throws when h >= 1/(2 ||A||_inf) (step_too_large guard).
DiscreteOcp transcribe(const ControlSystem& sys, const StochasticData& sd,
                       const SampleSet* samples, const Grid& grid, double epsilon,
                       const TerminalSet& k);

/// A_h = I - h (A - B D† C); nullopt when numerically singular.
std::optional<Matrix> a_h_matrix(const ControlSystem& sys, double h,
                                 const ToleranceProfile& tol = {});

struct DiscreteControllabilityReport {
  Matrix r_d;  // [h A_h⁻¹ BY, h (A_h⁻¹)² BY, ..., h (A_h⁻¹)ⁿ BY]
  bool full_rank = false;
};

std::optional<DiscreteControllabilityReport> discrete_controllability(
    const ControlSystem& sys, double h, const ToleranceProfile& tol = {});

struct DiscreteTrajectory {
  std::vector<Vec> states;    // N+1 rows, states[0] = x0
  std::vector<Vec> controls;  // N rows: u_1 .. u_N
};

/// Max over steps of ||(I-hA) x_{i+1} - x_i - hB u_{i+1}||_inf.
double dynamics_residual(const DiscreteOcp& ocp, const DiscreteTrajectory& traj);

/// Piecewise-linear state / piecewise-constant control reconstruction:
/// x_h(t) linear on each cell with x_h(t_i) = x_i exactly; u_h(t) = u_{i+1}
/// on the half-open cell (t_i, t_{i+1}], and u_h(0) = u_1.
class Interpolant {
 public:
  Interpolant(DiscreteTrajectory traj, Grid grid);
  Vec state_at(double t) const;
  Vec control_at(double t) const;
  const DiscreteTrajectory& trajectory() const { return traj_; }

 private:
  DiscreteTrajectory traj_;
  Grid grid_;
};

Interpolant interpolate(const DiscreteTrajectory& traj, const Grid& grid);

/// F term at x_N plus the rectangle-rule tracking sum over nodes 1..N:
/// f_bar ||x_N - z_ref||² + (h/2) Σ (||x_i - x_{d,i}||² + delta ||u_i - u_{d,i}||²).
double discrete_objective(const DiscreteOcp& ocp, const DiscreteTrajectory& traj);

}  // namespace slcc
