#pragma once

#include <cstdint>

#include "slcc/system.hpp"

namespace slcc {

/// i.i.d. draw of xi. Entry (l, k) depends only on (seed, k, l), so the first
/// nu rows of a larger draw with the same seed are bit-identical (prefix
/// stability for common-random-number sweeps).
struct SampleSet {
  std::uint64_t seed = 0;
  std::size_t nu = 0;
  std::size_t dim = 0;
  std::vector<double> xi;  // nu x dim, row-major

  double operator()(std::size_t l, std::size_t k) const { return xi[l * dim + k]; }
};

SampleSet draw_samples(const StochasticData& sd, std::uint64_t seed, std::size_t nu);

/// Sample-average terminal data: all coefficient stacks averaged. For the
/// affine structure this equals assembly from the component sample means,
/// which is how it is computed (compensated summation, fixed index order).
struct SaaTerminalData {
  Matrix m_bar;
  Vec q_bar;
  Matrix g_mat_bar;
  Vec g_vec_bar;
  double f_bar = 0.0;  // sample mean of the xi polynomial in F
  Vec z_ref;

  LcpInstance lcp() const { return {m_bar, q_bar}; }
  Vec g_image(const Vec& z) const { return axpy(1.0, matvec(g_mat_bar, z), g_vec_bar); }
};

SaaTerminalData terminal_data(const StochasticData& sd, const SampleSet& samples);

/// Terminal data at exact moments (the nu -> infinity limit).
SaaTerminalData exact_terminal_data(const StochasticData& sd);

/// f_bar * ||x_T - z_ref||^2 + track_x + track_u; the tracking terms are the
/// already-computed quadrature values.
double saa_objective(const SaaTerminalData& td, const Vec& x_t, double track_x, double track_u);

struct TerminalFeasibility {
  double residual_norm = 0.0;
  double dist_k = 0.0;
  bool feasible = false;
};

/// Relaxed terminal test: natural-residual norm <= eps and g-image within
/// distance eps of K.
TerminalFeasibility terminal_feasible(const SaaTerminalData& td, const TerminalSet& k,
                                      const Vec& x_t, double epsilon);

/// Var[F(x_T, xi)] from closed-form moments of the declared distributions
/// (independent components).
double variance_f(const StochasticData& sd, const Vec& x_t);

}  // namespace slcc
