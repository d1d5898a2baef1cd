#include "slcc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slcc {

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t replication) {
  return base_seed ^ static_cast<std::uint64_t>(replication);
}

CltReport clt_experiment(const ControlSystem& sys, const StochasticData& sd,
                         const TerminalSet& k, const Vec& x_hat, std::size_t nu,
                         std::size_t replications, std::uint64_t seed, const Grid& grid,
                         double epsilon, ExecPolicy policy) {
  if (replications < 2) throw std::invalid_argument("clt_experiment: need replications >= 2");
  CltReport rep;
  rep.x_hat = x_hat;
  rep.target_var = variance_f(sd, x_hat);

  // Tracking part does not depend on the sample once the terminal is pinned:
  // solve it once on exact moments and reuse it in every replication.
  const DiscreteOcp ocp = transcribe(sys, sd, nullptr, grid, epsilon, k);
  const FixedTerminalResult base = solve_fixed_terminal(ocp, x_hat);
  if (base.status != FixedTerminalResult::Status::ok)
    throw std::runtime_error("clt_experiment: pinned-terminal solve failed");
  rep.phi_reference = base.value;
  const Vec dev = sub(x_hat, sd.z_ref);
  const double amp = dot(dev, dev);
  const double f_exact = exact_terminal_data(sd).f_bar;
  const double track = base.value - f_exact * amp;
  const double root_nu = std::sqrt(static_cast<double>(nu));

  rep.scaled_deltas.assign(replications, 0.0);
  auto one = [&](std::size_t r) {
    const SampleSet samples = draw_samples(sd, replication_seed(seed, r), nu);
    const SaaTerminalData td = terminal_data(sd, samples);
    const double phi_r = td.f_bar * amp + track;
    rep.scaled_deltas[r] = root_nu * (phi_r - rep.phi_reference);
  };
  if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < static_cast<long long>(replications); ++r)
      one(static_cast<std::size_t>(r));
  } else {
    for (std::size_t r = 0; r < replications; ++r) one(r);
  }

  double mean = 0.0;
  for (double v : rep.scaled_deltas) mean += v;
  mean /= static_cast<double>(replications);
  double var = 0.0;
  for (double v : rep.scaled_deltas) var += (v - mean) * (v - mean);
  var /= static_cast<double>(replications - 1);
  rep.empirical_mean = mean;
  rep.empirical_var = var;
  return rep;
}

SweepReport run_sweep(const ControlSystem& sys, const StochasticData& sd, const TerminalSet& k,
                      const SweepSpec& spec, std::optional<double> reference,
                      ExecPolicy policy) {
  if (spec.nu_list.empty() || spec.h_list.empty())
    throw std::invalid_argument("run_sweep: empty grid");
  SweepReport rep;

  if (reference) {
    rep.reference = *reference;
  } else {
    std::size_t n_max = 1;
    for (double h : spec.h_list)
      n_max = std::max(n_max, grid_from_step(sys.horizon_t, h).n_steps);
    const Grid fine = make_grid(sys.horizon_t, 2 * n_max);
    const DiscreteOcp ocp = transcribe(sys, sd, nullptr, fine, spec.epsilon, k);
    SolveOptions opts;
    opts.policy = policy;
    const SolveReport r = solve_relaxed(ocp, opts);
    if (r.status != SolveReport::Status::ok)
      throw std::runtime_error("run_sweep: reference solve failed");
    rep.reference = r.value;
  }

  // ordered cells: ascending nu, then ascending h
  std::vector<std::size_t> nus = spec.nu_list;
  std::vector<double> hs = spec.h_list;
  std::sort(nus.begin(), nus.end());
  std::sort(hs.begin(), hs.end());

  struct Cell {
    std::size_t nu;
    double h;
    Grid grid;
  };
  std::vector<Cell> cells;
  for (std::size_t nu : nus)
    for (double h : hs) cells.push_back({nu, h, grid_from_step(sys.horizon_t, h)});

  const std::size_t r_count = spec.replications;
  rep.rows.assign(cells.size() * r_count, SweepRow{});

  auto one = [&](std::size_t slot) {
    const std::size_t ci = slot / r_count;
    const std::size_t r = slot % r_count;
    const Cell& cell = cells[ci];
    SweepRow row;
    row.nu = cell.nu;
    row.h = cell.h;
    row.replication = r;
    try {
      const SampleSet samples = draw_samples(sd, replication_seed(spec.base_seed, r), cell.nu);
      const DiscreteOcp ocp = transcribe(sys, sd, &samples, cell.grid, spec.epsilon, k);
      SolveOptions opts;
      opts.policy = ExecPolicy::serial;  // replications carry the parallelism
      const SolveReport sr = solve_relaxed(ocp, opts);
      if (sr.status == SolveReport::Status::ok) {
        row.ok = true;
        row.value = sr.value;
        const double d = rep.reference - sr.value;
        row.err_sq = d * d;
      }
    } catch (const std::exception&) {
      row.ok = false;
    }
    rep.rows[slot] = row;
  };

  const auto total = static_cast<long long>(rep.rows.size());
  if (policy == ExecPolicy::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long s = 0; s < total; ++s) one(static_cast<std::size_t>(s));
  } else {
    for (long long s = 0; s < total; ++s) one(static_cast<std::size_t>(s));
  }

  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    SweepCell agg;
    agg.nu = cells[ci].nu;
    agg.h = cells[ci].h;
    double sum_v = 0.0, sum_e = 0.0;
    std::size_t ok_count = 0;
    for (std::size_t r = 0; r < r_count; ++r) {
      const SweepRow& row = rep.rows[ci * r_count + r];
      if (row.ok) {
        ++ok_count;
        sum_v += row.value;
        sum_e += row.err_sq;
      } else {
        ++agg.failures;
      }
    }
    if (ok_count) {
      agg.mean_value = sum_v / static_cast<double>(ok_count);
      agg.e_aggregate = sum_e / static_cast<double>(ok_count);
    }
    rep.cells.push_back(agg);
  }
  return rep;
}

}  // namespace slcc
