#pragma once

#include <cstdint>
#include <optional>

#include "slcc/ocp_solver.hpp"

namespace slcc {

/// Replication r draws its sample with stream seed = base_seed XOR r, so a
/// sweep cell with larger nu extends the same stream (common random numbers).
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t replication);

struct CltReport {
  Vec x_hat;                 // terminal the statistic is evaluated at
  double phi_reference = 0;  // exact-moment discrete value at the same grid
  Vec scaled_deltas;         // sqrt(nu) * (Phi^nu_r - phi_reference), one per replication
  double empirical_mean = 0;
  double empirical_var = 0;  // unbiased sample variance
  double target_var = 0;     // closed-form Var[F(x_hat, xi)]
  std::size_t failures = 0;
};

/// Distribution check for the scaled optimal-value error at a fixed relaxed
/// solution: per replication the sample objective is evaluated at x_hat with
/// the tracking part re-used from the (sample-independent) pinned-terminal
/// solve, and compared against the exact-moment value on the same grid.
/// Validity rests on the relaxed problem having a single optimal terminal;
/// that is assumed, not checked.
CltReport clt_experiment(const ControlSystem& sys, const StochasticData& sd,
                         const TerminalSet& k, const Vec& x_hat, std::size_t nu,
                         std::size_t replications, std::uint64_t seed, const Grid& grid,
                         double epsilon, ExecPolicy policy = ExecPolicy::parallel);

struct SweepSpec {
  std::vector<std::size_t> nu_list;
  std::vector<double> h_list;
  double epsilon = 1e-5;
  std::size_t replications = 100;
  std::uint64_t base_seed = 42;
};

struct SweepRow {
  std::size_t nu = 0;
  double h = 0;
  std::size_t replication = 0;
  bool ok = false;
  double value = 0;
  double err_sq = 0;
};

struct SweepCell {
  std::size_t nu = 0;
  double h = 0;
  double mean_value = 0;
  double e_aggregate = 0;  // mean of (reference - value)^2 over ok replications
  std::size_t failures = 0;
};

struct SweepReport {
  double reference = 0;
  std::vector<SweepRow> rows;    // sorted by (nu, h, replication)
  std::vector<SweepCell> cells;  // one per (nu, h), same ordering
};

/// Full relaxed solve per replication on every (nu, h) cell; squared errors
/// against the reference value. When no reference is supplied it is the
/// exact-moment solve on a grid twice as fine as the finest in the spec.
SweepReport run_sweep(const ControlSystem& sys, const StochasticData& sd, const TerminalSet& k,
                      const SweepSpec& spec, std::optional<double> reference,
                      ExecPolicy policy = ExecPolicy::parallel);

}  // namespace slcc
