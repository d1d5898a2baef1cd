#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slcc/matrix.hpp"

namespace slcc {

/// Run data-parallel kernels with OpenMP or on the serial reference path.
/// Both paths produce identical results; tests compare them bit for bit.
enum class ExecPolicy { serial, parallel };

/// LCP(M, q): find x >= 0 with Mx + q >= 0 and x ⊥ (Mx + q).
struct LcpInstance {
  Matrix m;
  Vec q;
};

enum class TriState : std::uint8_t { yes, no, unknown };

struct MatrixClassReport {
  bool is_z = false;
  TriState is_p = TriState::unknown;  // unknown = skipped, n too large
  TriState adequacy = TriState::unknown;
  bool psd_symmetric = false;
};

struct LcpSolutionSet {
  std::vector<Vec> solutions;                 // deduplicated, pattern order
  std::vector<std::uint32_t> patterns;        // support bitmask per solution
  bool has_nonisolated = false;               // some singular pattern was consistent
};

/// Exact matrix-class tests where cheap, certificates elsewhere: Z by sign
/// inspection, P by all principal minors (n <= 12), PSD by symmetry plus
/// pivoted Cholesky. Adequacy is tri-state: yes via the P / symmetric-PSD
/// sufficient conditions, no via deterministic-pattern + randomized
/// falsification of column or row adequacy, unknown otherwise.
MatrixClassReport classify(const Matrix& m, const ToleranceProfile& tol = {});

/// min{x, Mx+q} and its Euclidean norm; zero exactly at solutions.
std::pair<Vec, double> natural_residual(const LcpInstance& inst, const Vec& x);

/// Exhaustive pattern enumeration over index sets J: solve M_JJ x_J = -q_J,
/// x on the complement zero, keep sign-feasible candidates. Singular but
/// consistent patterns contribute their minimum-norm solution and raise
/// has_nonisolated. Requires n <= 20.
LcpSolutionSet solve_enumerate(const LcpInstance& inst, const ToleranceProfile& tol = {},
                               ExecPolicy policy = ExecPolicy::parallel);

enum class LeastElementStatus { ok, infeasible, not_z };

struct LeastElementResult {
  LeastElementStatus status;
  Vec x;
};

/// Least element of V = {x >= 0 : Mx + q >= 0} for a Z-matrix M, obtained by
/// minimizing 1ᵀx over V; the least element is the unique minimizer and
/// solves the LCP.
LeastElementResult solve_least_element(const LcpInstance& inst, const ToleranceProfile& tol = {});

/// Minimum-support solution from the enumerated set; ties broken by smallest
/// 1-norm, then lexicographically. Second member is the support size.
std::optional<std::pair<Vec, std::size_t>> sparse_solution(const LcpSolutionSet& set,
                                                           const ToleranceProfile& tol = {});

/// max over index sets J with nonsingular M_JJ of the induced 1-norm of the
/// inverse; 1 when no principal submatrix is nonsingular. Requires n <= 20.
double beta_constant(const Matrix& m, const ToleranceProfile& tol = {},
                     ExecPolicy policy = ExecPolicy::parallel);

/// Checks ||x_sparse|| <= beta * ||q||_1 + zero_atol.
std::optional<bool> sparse_bound_check(const LcpInstance& inst, const ToleranceProfile& tol = {});

}  // namespace slcc
