#include "slcc/render.hpp"

#include <cstdio>
#include <sstream>

namespace slcc {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_vec_cell(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += fmt_g17(v[i]);
  }
  return s;
}

std::string lcp_csv(const SaaTerminalData& td, const TerminalSet& k, double epsilon,
                    const ToleranceProfile& tol) {
  const LcpSolutionSet set = solve_enumerate(td.lcp(), tol);
  std::ostringstream os;
  os << "kind,terminal,support,residual_norm,g_image,dist_k,kept\n";
  for (const Vec& x : set.solutions) {
    const TerminalFeasibility tf = terminal_feasible(td, k, x, epsilon);
    std::size_t support = 0;
    for (double v : x)
      if (std::abs(v) > tol.zero_atol) ++support;
    os << "solution," << fmt_vec_cell(x) << ',' << support << ',' << fmt_g17(tf.residual_norm)
       << ',' << fmt_vec_cell(td.g_image(x)) << ',' << fmt_g17(tf.dist_k) << ','
       << (tf.feasible ? 1 : 0) << '\n';
  }
  os << "beta," << fmt_g17(beta_constant(td.m_bar, tol)) << ",,,,,\n";
  if (auto sp = sparse_solution(set, tol)) {
    const TerminalFeasibility tf = terminal_feasible(td, k, sp->first, epsilon);
    os << "sparse," << fmt_vec_cell(sp->first) << ',' << sp->second << ','
       << fmt_g17(tf.residual_norm) << ',' << fmt_vec_cell(td.g_image(sp->first)) << ','
       << fmt_g17(tf.dist_k) << ',' << (tf.feasible ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string solve_csv(const SolveReport& rep) {
  std::ostringstream os;
  os << "row,terminal,status,value\n";
  for (const CandidateOutcome& c : rep.candidates)
    os << "candidate," << fmt_vec_cell(c.terminal) << ','
       << (c.solved ? "ok" : c.note) << ',' << (c.solved ? fmt_g17(c.value) : "") << '\n';
  if (rep.status == SolveReport::Status::ok)
    os << "chosen," << fmt_vec_cell(rep.chosen_terminal) << ",ok," << fmt_g17(rep.value) << '\n';
  return os.str();
}

std::string solve_summary(const SolveReport& rep) {
  std::ostringstream os;
  switch (rep.status) {
    case SolveReport::Status::ok:
      os << "chosen terminal " << format_vec(rep.chosen_terminal) << "  value "
         << fmt_g17(rep.value) << "  kkt_residual " << fmt_g17(rep.kkt_residual);
      break;
    case SolveReport::Status::no_candidates:
      os << "no terminal candidates pass the relaxed filter";
      break;
    case SolveReport::Status::all_failed:
      os << "every candidate subproblem failed";
      break;
  }
  return os.str();
}

std::string sweep_csv(const SweepReport& rep) {
  std::ostringstream os;
  os << "nu,h,replication,status,value,err_sq\n";
  for (const SweepRow& r : rep.rows) {
    os << r.nu << ',' << fmt_g17(r.h) << ',' << r.replication << ','
       << (r.ok ? "ok" : "failed") << ',';
    if (r.ok)
      os << fmt_g17(r.value) << ',' << fmt_g17(r.err_sq);
    else
      os << ',';
    os << '\n';
  }
  for (const SweepCell& c : rep.cells)
    os << c.nu << ',' << fmt_g17(c.h) << ",-1,aggregate," << fmt_g17(c.mean_value) << ','
       << fmt_g17(c.e_aggregate) << '\n';
  return os.str();
}

std::string clt_csv(const CltReport& rep) {
  std::ostringstream os;
  os << "kind,replication,value\n";
  for (std::size_t r = 0; r < rep.scaled_deltas.size(); ++r)
    os << "rep," << r << ',' << fmt_g17(rep.scaled_deltas[r]) << '\n';
  os << "mean,-1," << fmt_g17(rep.empirical_mean) << '\n';
  os << "var,-1," << fmt_g17(rep.empirical_var) << '\n';
  os << "target_var,-1," << fmt_g17(rep.target_var) << '\n';
  return os.str();
}

CheckOutcome check_report(const Problem& p, const ToleranceProfile& tol) {
  std::ostringstream os;
  CheckOutcome out;

  const Assumption12Report a12 = check_assumption_12(p.sys, tol);
  os << "controllability structure\n";
  os << "  D full row rank:            " << (a12.d_full_rank ? "yes" : "NO") << '\n';
  os << "  R (n x n(m-l)) full rank:   " << (a12.r_full_rank ? "yes" : "NO") << " (rank "
     << rank(a12.r_matrix, tol) << " of " << p.sys.n() << ")\n";

  const LcpInstance inst = expectation_lcp(p.sd);
  const MatrixClassReport cls = classify(inst.m, tol);
  auto tri = [](TriState t) {
    switch (t) {
      case TriState::yes: return "yes";
      case TriState::no: return "no";
      default: return "unknown";
    }
  };
  os << "expectation matrix class\n";
  os << "  Z-matrix:                   " << (cls.is_z ? "yes" : "no") << '\n';
  os << "  P-matrix:                   " << tri(cls.is_p) << '\n';
  os << "  symmetric PSD:              " << (cls.psd_symmetric ? "yes" : "no") << '\n';
  os << "  adequate:                   " << tri(cls.adequacy) << '\n';

  const Theorem21Report t21 = check_theorem21(p.sys, p.sd, p.k, tol);
  os << "terminal existence conditions\n";
  os << "  (i) ball in K [surrogate]:  " << (t21.cond_ball_in_k ? "yes" : "no")
     << "  (beta " << fmt_g17(t21.beta) << ", kappa2 surrogate "
     << fmt_g17(t21.kappa2_surrogate) << ", radius " << fmt_g17(t21.ball_radius) << ")";
  if (!t21.surrogate_valid) os << "  [surrogate invalid: affine g offset nonzero]";
  os << '\n';
  os << "      constructive certificate: " << (t21.cond_constructive ? "yes" : "no")
     << "  (some enumerated solution lands in K)\n";
  os << "  (ii) V nonempty:            " << (t21.cond_v_nonempty ? "yes" : "NO") << '\n';
  os << "  (iii) matrix class:         ";
  switch (t21.cond_matrix_class) {
    case MatrixClassCond::z: os << "Z-matrix"; break;
    case MatrixClassCond::adequate: os << "adequate"; break;
    case MatrixClassCond::fails: os << "FAILS"; break;
  }
  os << '\n';
  os << "  feasible terminal exists:   " << (t21.feasible ? "yes" : "NO") << '\n';
  os << "Lipschitz envelopes of F, g, M, q (kappa bounds): assumed, not checked\n";

  out.all_hold = a12.d_full_rank && a12.r_full_rank && t21.feasible;
  os << (out.all_hold ? "all checks hold\n" : "CHECKS FAILED\n");
  out.text = os.str();
  return out;
}

}  // namespace slcc
