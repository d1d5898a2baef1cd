#include "slcc/saa.hpp"

#include <cmath>
#include <stdexcept>

#include "slcc/rng.hpp"

namespace slcc {

namespace {

double sample_from(const DistSpec& d, std::uint64_t bits) {
  const double u = u01_open(bits);
  if (d.kind == DistSpec::Kind::normal)
    return d.p1 + std::sqrt(d.p2) * inv_normal_cdf(u);
  return d.p1 + (d.p2 - d.p1) * u;
}

// Compensated (Kahan) mean in fixed index order.
class KahanMean {
 public:
  void add(double v) {
    const double y = v - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
    ++count_;
  }
  double mean() const { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
  std::size_t count_ = 0;
};

SaaTerminalData assemble(const StochasticData& sd, const Vec& mean1, const Vec& mean2) {
  SaaTerminalData td;
  td.m_bar = sd.m0;
  td.q_bar = sd.q0;
  td.g_mat_bar = sd.g_mat0;
  td.g_vec_bar = sd.g_vec0;
  td.f_bar = sd.f_c0;
  td.z_ref = sd.z_ref;
  for (std::size_t k = 0; k < sd.dim_xi(); ++k) {
    const double m1 = mean1[k];
    for (std::size_t i = 0; i < td.m_bar.a.size(); ++i) td.m_bar.a[i] += m1 * sd.m_k[k].a[i];
    for (std::size_t i = 0; i < td.q_bar.size(); ++i) td.q_bar[i] += m1 * sd.q_k[k][i];
    for (std::size_t i = 0; i < td.g_mat_bar.a.size(); ++i)
      td.g_mat_bar.a[i] += m1 * sd.g_mat_k[k].a[i];
    for (std::size_t i = 0; i < td.g_vec_bar.size(); ++i) td.g_vec_bar[i] += m1 * sd.g_vec_k[k][i];
    td.f_bar += sd.f_lin[k] * m1 + sd.f_quad[k] * mean2[k];
  }
  return td;
}

}  // namespace

SampleSet draw_samples(const StochasticData& sd, std::uint64_t seed, std::size_t nu) {
  if (nu < 1) throw std::invalid_argument("draw_samples: nu must be >= 1");
  SampleSet s;
  s.seed = seed;
  s.nu = nu;
  s.dim = sd.dim_xi();
  s.xi.resize(nu * s.dim);
  for (std::size_t l = 0; l < nu; ++l)
    for (std::size_t k = 0; k < s.dim; ++k)
      s.xi[l * s.dim + k] = sample_from(sd.dists[k], counter_u64(seed, k, l));
  return s;
}

SaaTerminalData terminal_data(const StochasticData& sd, const SampleSet& samples) {
  if (samples.dim != sd.dim_xi())
    throw std::invalid_argument("terminal_data: sample dimension mismatch");
  const std::size_t d = sd.dim_xi();
  Vec mean1(d, 0.0), mean2(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    KahanMean m1, m2;
    for (std::size_t l = 0; l < samples.nu; ++l) {
      const double v = samples(l, k);
      m1.add(v);
      m2.add(v * v);
    }
    mean1[k] = m1.mean();
    mean2[k] = m2.mean();
  }
  return assemble(sd, mean1, mean2);
}

SaaTerminalData exact_terminal_data(const StochasticData& sd) {
  const std::size_t d = sd.dim_xi();
  Vec mean1(d), mean2(d);
  for (std::size_t k = 0; k < d; ++k) {
    mean1[k] = sd.dists[k].mean();
    mean2[k] = sd.dists[k].moment2();
  }
  return assemble(sd, mean1, mean2);
}

double saa_objective(const SaaTerminalData& td, const Vec& x_t, double track_x, double track_u) {
  const Vec dev = sub(x_t, td.z_ref);
  return td.f_bar * dot(dev, dev) + track_x + track_u;
}

TerminalFeasibility terminal_feasible(const SaaTerminalData& td, const TerminalSet& k,
                                      const Vec& x_t, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("terminal_feasible: epsilon must be >= 0");
  TerminalFeasibility rep;
  rep.residual_norm = natural_residual(td.lcp(), x_t).second;
  rep.dist_k = dist_to_set(k, td.g_image(x_t));
  rep.feasible = rep.residual_norm <= epsilon && rep.dist_k <= epsilon;
  return rep;
}

double variance_f(const StochasticData& sd, const Vec& x_t) {
  // F = (c0 + sum c_k X_k + sum c_kk X_k^2) * ||x_T - z_ref||^2; components
  // independent, so the weight variance is a sum of per-component variances.
  const Vec dev = sub(x_t, sd.z_ref);
  const double amp = dot(dev, dev);
  double var = 0.0;
  for (std::size_t k = 0; k < sd.dim_xi(); ++k) {
    const DistSpec& d = sd.dists[k];
    const double ck = sd.f_lin[k], ckk = sd.f_quad[k];
    const double var_x = d.variance();
    const double var_x2 = d.moment4() - d.moment2() * d.moment2();
    const double cov = d.moment3() - d.mean() * d.moment2();
    var += ck * ck * var_x + ckk * ckk * var_x2 + 2.0 * ck * ckk * cov;
  }
  return var * amp * amp;
}

}  // namespace slcc
