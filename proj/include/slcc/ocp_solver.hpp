#pragma once

#include <string>

#include "slcc/discretize.hpp"

namespace slcc {

struct FixedTerminalResult {
  enum class Status { ok, infeasible, singular, max_iter } status = Status::singular;
  DiscreteTrajectory trajectory;
  double value = 0.0;          // discrete objective, F term at the pinned terminal included
  double kkt_residual = 0.0;   // recomputed from the returned point and duals
  double dyn_residual = 0.0;
  double mixed_violation = 0.0;
  int iterations = 0;
};

/// Solve the transcription with the terminal state pinned to b: a strictly
/// convex QP over all states and controls. Equality-constrained subproblems
/// are solved through the banded SPD Schur complement of the diagonal
/// Hessian; the active set over the per-node mixed constraints starts from
/// the all-active working set and changes one row at a time (Bland order).
FixedTerminalResult solve_fixed_terminal(const DiscreteOcp& ocp, const Vec& b,
                                         const ToleranceProfile& tol = {});

/// Exact solutions of the sample-average LCP that pass the relaxed terminal
/// filter (residual and K^epsilon distance), in enumeration order.
std::vector<Vec> enumerate_terminal_candidates(const SaaTerminalData& td, const TerminalSet& k,
                                               double epsilon, const ToleranceProfile& tol = {},
                                               ExecPolicy policy = ExecPolicy::parallel);

struct CandidateOutcome {
  Vec terminal;
  bool solved = false;
  double value = 0.0;
  std::string note;  // failure reason when not solved
};

struct SolveOptions {
  bool refine = false;       // projected-gradient polish inside the epsilon ball
  int refine_max_iters = 25;
  ExecPolicy policy = ExecPolicy::parallel;
  ToleranceProfile tol;
};

struct SolveReport {
  enum class Status { ok, no_candidates, all_failed } status = Status::no_candidates;
  Vec chosen_terminal;
  double value = 0.0;
  DiscreteTrajectory trajectory;
  std::vector<CandidateOutcome> candidates;
  double kkt_residual = 0.0;
  double wall_seconds = 0.0;  // excluded from CSV output (nondeterministic)
};

/// Candidate enumeration, one fixed-terminal solve per kept candidate, best
/// value wins; ties break to the lexicographically smallest terminal.
SolveReport solve_relaxed(const DiscreteOcp& ocp, const SolveOptions& opts = {});

}  // namespace slcc
