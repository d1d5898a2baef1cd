#pragma once

#include <string>

#include "slcc/experiments.hpp"
#include "slcc/problem_io.hpp"

namespace slcc {

/// "%.17g" with the C locale; all CSV output goes through this so repeated
/// invocations are byte-identical.
std::string fmt_g17(double v);

/// Vector cell: components joined by ';'.
std::string fmt_vec_cell(const Vec& v);

/// Solution rows (terminal, support, residual, g-image, dist, kept flag)
/// followed by a beta row and a sparse-solution row.
std::string lcp_csv(const SaaTerminalData& td, const TerminalSet& k, double epsilon,
                    const ToleranceProfile& tol = {});

/// Candidate table plus the chosen row.
std::string solve_csv(const SolveReport& rep);
std::string solve_summary(const SolveReport& rep);

/// Columns nu,h,replication,status,value,err_sq; per-cell aggregate rows use
/// replication = -1 with the mean value and E in the last two columns.
std::string sweep_csv(const SweepReport& rep);

/// Per-replication scaled deltas, then mean / var / target_var summary rows
/// (replication = -1).
std::string clt_csv(const CltReport& rep);

struct CheckOutcome {
  std::string text;
  bool all_hold = false;
};

/// Human-readable report for the assumption and existence checks.
CheckOutcome check_report(const Problem& p, const ToleranceProfile& tol = {});

}  // namespace slcc
