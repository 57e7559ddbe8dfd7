#pragma once

// Solver front-end: compiles an SdpProblem into a real cone program, runs
// the interior-point core and maps results and certificates back.

#include "opsys/sdp/conelp.hpp"
#include "opsys/sdp/problem.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opsys::sdp {

namespace solver_detail {

struct Compiled {
  ConeLpData data;
  std::vector<bool> complex_block;
  std::vector<int> lmi_dims;
  RMatrix reduction;  // x = reduction · u, empty when identity
  std::vector<int> kept_rows;
  std::vector<double> row_scale;
  RMatrix a_full;
  RVector b_full;
  RMatrix g_full;
  RVector h_full;
  RVector c_full;
  bool objective_unbounded_direction = false;
  /// Set when the equalities alone are inconsistent: y with A'y = 0, b'y < 0.
  std::optional<RVector> inconsistent_equalities;
};

inline bool is_real(const AffineMatrix& e) {
  if (e.constant.imag().cwiseAbs().maxCoeff() != 0.0) return false;
  for (const auto& t : e.terms)
    if (t.second.imag().cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

inline RMatrix embed(const CMatrix& m, bool cplx_block) {
  return cplx_block ? real_embedding(m) : RMatrix(m.real());
}

inline CMatrix unembed(const RMatrix& z, bool cplx_block) {
  return cplx_block ? real_embedding_adjoint(z) : CMatrix(z.cast<cplx>());
}

inline Compiled compile(const SdpProblem& p) {
  using conelp_detail::pack_into;
  using conelp_detail::svec_size;
  Compiled out;
  const int n = p.num_vars();
  int rows = 0;
  for (const auto& l : p.lmis()) {
    const bool cb = !is_real(l.expr);
    out.complex_block.push_back(cb);
    const int d = static_cast<int>(l.expr.rows()) * (cb ? 2 : 1);
    out.lmi_dims.push_back(d);
    rows += svec_size(d);
  }
  out.g_full = RMatrix::Zero(rows, n);
  out.h_full = RVector::Zero(rows);
  int off = 0;
  for (std::size_t j = 0; j < p.lmis().size(); ++j) {
    const auto& e = p.lmis()[j].expr;
    const bool cb = out.complex_block[j];
    pack_into(embed(e.constant, cb), out.h_full.data() + off);
    std::map<int, CMatrix> coeff;
    for (const auto& [v, m] : e.terms) {
      auto it = coeff.find(v);
      if (it == coeff.end())
        coeff.emplace(v, m);
      else
        it->second += m;
    }
    RVector col(svec_size(out.lmi_dims[j]));
    for (const auto& [v, m] : coeff) {
      pack_into(embed(m, cb), col.data());
      out.g_full.block(off, v, col.size(), 1) -= col;
    }
    off += svec_size(out.lmi_dims[j]);
  }
  out.a_full = RMatrix::Zero(static_cast<Eigen::Index>(p.equalities().size()), n);
  out.b_full = RVector::Zero(out.a_full.rows());
  for (std::size_t e = 0; e < p.equalities().size(); ++e) {
    for (const auto& [v, a] : p.equalities()[e].coeffs) out.a_full(e, v) += a;
    out.b_full(e) = p.equalities()[e].rhs;
  }
  out.c_full = p.objective();

  // Drop directions invisible to every constraint.
  RMatrix g = out.g_full;
  RMatrix a = out.a_full;
  RVector c = out.c_full;
  if (n > 0) {
    RMatrix stacked(a.rows() + g.rows(), n);
    stacked << a, g;
    Eigen::ColPivHouseholderQR<RMatrix> rank_qr(stacked);
    rank_qr.setThreshold(1e-11);
    if (rank_qr.rank() < n) {
      Eigen::JacobiSVD<RMatrix> svd(stacked, Eigen::ComputeFullV);
      const RVector sv = svd.singularValues();
      int r = 0;
      while (r < sv.size() && sv(r) > 1e-11 * std::max(1.0, sv(0))) ++r;
      out.reduction = svd.matrixV().leftCols(r);
      RMatrix nullspace = svd.matrixV().rightCols(n - r);
      if ((nullspace.transpose() * c).norm() > 1e-9 * std::max(1.0, c.norm()))
        out.objective_unbounded_direction = true;
      g = g * out.reduction;
      a = a * out.reduction;
      c = out.reduction.transpose() * c;
    }
  }

  // Remove redundant equalities; flag inconsistent ones.
  RVector b = out.b_full;
  if (a.rows() > 0) {
    RVector norms = a.rowwise().norm();
    Eigen::ColPivHouseholderQR<RMatrix> qr(a.transpose());
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    std::vector<int> kept, dropped;
    for (int i = 0; i < a.rows(); ++i) (i < rank ? kept : dropped).push_back(qr.colsPermutation().indices()(i));
    std::sort(kept.begin(), kept.end());
    RMatrix ak(kept.size(), a.cols());
    RVector bk(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      ak.row(i) = a.row(kept[i]);
      bk(i) = b(kept[i]);
    }
    if (!dropped.empty()) {
      // a_drop = M a_kept; consistency needs b_drop = M b_kept.
      Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(ak.transpose());
      for (int drow : dropped) {
        RVector m = kept.empty() ? RVector() : RVector(cod.solve(RVector(a.row(drow).transpose())));
        const double predicted = kept.empty() ? 0.0 : m.dot(bk);
        const double mismatch = b(drow) - predicted;
        const double scale = std::max({1.0, std::abs(b(drow)), std::abs(predicted)});
        if (std::abs(mismatch) > 1e-9 * scale) {
          RVector y = RVector::Zero(a.rows());
          y(drow) = 1.0;
          for (std::size_t i = 0; i < kept.size(); ++i) y(kept[i]) -= m(i);
          if (mismatch > 0) y = -y;
          out.inconsistent_equalities = y / y.norm();
          break;
        }
      }
    }
    out.kept_rows = kept;
    a = ak;
    b = bk;
    out.row_scale.resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const double s = norms(kept[i]) > 0 ? 1.0 / norms(kept[i]) : 1.0;
      out.row_scale[i] = s;
      a.row(i) *= s;
      b(i) *= s;
    }
  }

  out.data.c = c;
  out.data.G = g;
  out.data.h = out.h_full;
  out.data.A = a;
  out.data.b = b;
  out.data.dims = out.lmi_dims;
  return out;
}

inline RVector lift_x(const Compiled& cp, const RVector& u) {
  return cp.reduction.size() ? RVector(cp.reduction * u) : u;
}

inline RVector lift_y(const Compiled& cp, const RVector& yr, Eigen::Index p) {
  RVector y = RVector::Zero(p);
  for (std::size_t i = 0; i < cp.kept_rows.size(); ++i) y(cp.kept_rows[i]) = yr(i) * cp.row_scale[i];
  return y;
}

inline std::vector<CMatrix> unpack_duals(const Compiled& cp, const RVector& z) {
  std::vector<CMatrix> out;
  auto blocks = conelp_detail::unpack(z, cp.lmi_dims);
  for (std::size_t j = 0; j < blocks.size(); ++j) out.push_back(unembed(blocks[j], cp.complex_block[j]));
  return out;
}

}  // namespace solver_detail

/// Recomputes value, stationarity residual and margin of a certificate from
/// the problem data alone. The duals are first projected onto the PSD cone.
/// Returns true when the certificate proves infeasibility at tolerance tol.
inline bool verify_certificate(const SdpProblem& p, InfeasibilityCertificate& cert, double tol = 1e-8) {
  if (cert.lmi_duals.size() != p.lmis().size()) return false;
  if (cert.eq_multipliers.size() != static_cast<Eigen::Index>(p.equalities().size())) return false;
  double value = 0.0;
  RVector stat = RVector::Zero(p.num_vars());
  double dscale = 0.0;
  for (std::size_t j = 0; j < p.lmis().size(); ++j) {
    CMatrix d = hermitian_apply(cert.lmi_duals[j], [](double v) { return std::max(v, 0.0); });
    cert.lmi_duals[j] = d;
    dscale += d.trace().real();
    const auto& e = p.lmis()[j].expr;
    value += real_pairing(e.constant, d);
    for (const auto& [v, m] : e.terms) stat(v) += real_pairing(m, d);
  }
  for (std::size_t e = 0; e < p.equalities().size(); ++e) {
    const double y = cert.eq_multipliers(e);
    value += y * p.equalities()[e].rhs;
    for (const auto& [v, a] : p.equalities()[e].coeffs) stat(v) -= y * a;
  }
  cert.value = value;
  cert.stationarity_residual = stat.size() ? stat.lpNorm<Eigen::Infinity>() : 0.0;
  cert.margin = -value;
  const double scale = std::max(1.0, dscale + cert.eq_multipliers.lpNorm<1>());
  return cert.margin > tol * scale && cert.stationarity_residual <= std::max(1e-7, 1e-2 * cert.margin) * scale;
}

namespace solver_detail {

inline InfeasibilityCertificate normalized_certificate(std::vector<CMatrix> duals, RVector y) {
  double tr = 0.0;
  for (const auto& d : duals) tr += d.trace().real();
  double s = tr > 1e-12 ? tr : y.norm();
  if (s <= 0.0) s = 1.0;
  for (auto& d : duals) d /= s;
  InfeasibilityCertificate c;
  c.lmi_duals = std::move(duals);
  c.eq_multipliers = y / s;
  return c;
}

inline void fill_primal_diagnostics(const SdpProblem& p, SdpResult& r) {
  r.slacks.clear();
  r.min_slack_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& l : p.lmis()) {
    r.slacks.push_back(l.expr.evaluate(r.x));
    r.min_slack_eigenvalue = std::min(r.min_slack_eigenvalue, min_eigenvalue(r.slacks.back()));
  }
  if (p.lmis().empty()) r.min_slack_eigenvalue = 0.0;
  double eq = 0.0;
  for (const auto& e : p.equalities()) {
    double lhs = 0.0;
    for (const auto& [v, a] : e.coeffs) lhs += a * r.x(v);
    eq = std::max(eq, std::abs(lhs - e.rhs) / std::max(1.0, std::abs(e.rhs)));
  }
  r.primal_residual = std::max(eq, std::max(0.0, -r.min_slack_eigenvalue));
  r.objective_value = p.objective_value(r.x);
}

inline SdpResult empty_certificate_result(const SdpProblem& p, const RVector& y) {
  SdpResult r;
  r.status = SdpStatus::Infeasible;
  std::vector<CMatrix> duals;
  for (const auto& l : p.lmis()) duals.push_back(CMatrix::Zero(l.expr.rows(), l.expr.cols()));
  InfeasibilityCertificate cert = normalized_certificate(std::move(duals), y);
  verify_certificate(p, cert);
  r.certificate = cert;
  r.detail = "inconsistent equality constraints";
  return r;
}

}  // namespace solver_detail

/// Solves min c·x over the problem. Without an objective a successful
/// solve reports Feasible; a detected dual infeasibility is reported as
/// Unknown with detail "unbounded".
inline SdpResult solve(const SdpProblem& p, const SolverOptions& opts = {}) {
  using namespace solver_detail;
  Compiled cp = compile(p);
  if (cp.inconsistent_equalities) return empty_certificate_result(p, *cp.inconsistent_equalities);

  SdpResult r;
  if (p.lmis().empty()) {
    // Pure equality system.
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(cp.a_full);
    r.x = cp.a_full.rows() ? RVector(cod.solve(cp.b_full)) : RVector(RVector::Zero(p.num_vars()));
    fill_primal_diagnostics(p, r);
    if (p.has_objective() && cp.objective_unbounded_direction) {
      r.status = SdpStatus::Unknown;
      r.detail = "unbounded";
    } else {
      r.status = p.has_objective() ? SdpStatus::Optimal : SdpStatus::Feasible;
    }
    return r;
  }

  ConeLpOptions co;
  co.feastol = opts.tol_primal;
  co.abstol = opts.tol_gap;
  co.reltol = opts.tol_gap;
  co.max_iter = opts.max_iter;
  co.verbose = opts.verbose;
  ConeLpSolution sol = solve_conelp(cp.data, co);
  r.iterations = sol.iterations;
  r.detail = sol.detail;
  r.dual_residual = sol.dres;
  r.gap = sol.gap;

  switch (sol.status) {
    case ConeLpStatus::Optimal: {
      r.x = lift_x(cp, sol.x);
      fill_primal_diagnostics(p, r);
      r.lmi_duals = unpack_duals(cp, sol.z);
      r.eq_multipliers = lift_y(cp, sol.y, cp.a_full.rows());
      if (p.has_objective() && cp.objective_unbounded_direction) {
        r.status = SdpStatus::Unknown;
        r.detail = "unbounded";
      } else {
        r.status = p.has_objective() ? SdpStatus::Optimal : SdpStatus::Feasible;
      }
      break;
    }
    case ConeLpStatus::PrimalInfeasible: {
      InfeasibilityCertificate cert =
          normalized_certificate(unpack_duals(cp, sol.z), lift_y(cp, sol.y, cp.a_full.rows()));
      const bool ok = verify_certificate(p, cert, opts.tol_psd);
      r.certificate = cert;
      r.status = ok ? SdpStatus::Infeasible : SdpStatus::Unknown;
      if (!ok) r.detail = "certificate failed verification";
      r.x = RVector::Zero(p.num_vars());
      break;
    }
    case ConeLpStatus::DualInfeasible:
      r.status = SdpStatus::Unknown;
      r.detail = "unbounded";
      r.x = lift_x(cp, sol.x);
      break;
    default:
      r.status = SdpStatus::Unknown;
      r.x = lift_x(cp, sol.x);
      if (r.x.size() == p.num_vars()) fill_primal_diagnostics(p, r);
      if (r.detail.empty()) r.detail = "solver did not converge";
      break;
  }
  return r;
}

/// Feasibility with a robust verdict. Maximizes a uniform eigenvalue margin
/// t (capped at 1) over all LMIs:
///   t* ≥ -tol_psd                          → Feasible
///   t* < -100·tol_psd and a verified cert  → Infeasible
///   otherwise                              → Unknown
/// The gap between the two thresholds keeps verdicts stable when
/// tolerances are tightened.
inline SdpResult check_feasible(const SdpProblem& p, const SolverOptions& opts = {}) {
  using namespace solver_detail;
  {
    Compiled cp = compile(p);
    if (cp.inconsistent_equalities) return empty_certificate_result(p, *cp.inconsistent_equalities);
  }
  SdpProblem m;
  m.set_num_vars(p.num_vars());
  const int t = m.add_scalar();
  for (const auto& l : p.lmis()) {
    AffineMatrix e = l.expr;
    e.terms.emplace_back(t, -CMatrix::Identity(e.rows(), e.cols()));
    m.add_lmi(std::move(e), l.name);
  }
  for (const auto& e : p.equalities()) m.add_equality(e.coeffs, e.rhs);
  AffineMatrix cap(CMatrix::Constant(1, 1, 1.0));
  cap.terms.emplace_back(t, -CMatrix::Identity(1, 1));
  m.add_lmi(std::move(cap), "margin-cap");
  m.set_objective(t, -1.0);

  SolverOptions mo = opts;
  SdpResult inner = solve(m, mo);
  SdpResult r;
  r.iterations = inner.iterations;
  r.detail = inner.detail;
  if (inner.status != SdpStatus::Optimal) {
    r.status = SdpStatus::Unknown;
    if (r.detail.empty()) r.detail = "margin problem did not converge";
    r.x = RVector::Zero(p.num_vars());
    return r;
  }
  const double tstar = inner.x(t);
  r.feasibility_margin = tstar;
  r.x = inner.x.head(p.num_vars());
  fill_primal_diagnostics(p, r);
  r.gap = inner.gap;
  r.dual_residual = inner.dual_residual;
  if (tstar >= -opts.tol_psd) {
    r.status = SdpStatus::Feasible;
    return r;
  }
  std::vector<CMatrix> duals(inner.lmi_duals.begin(), inner.lmi_duals.end() - 1);
  InfeasibilityCertificate cert = normalized_certificate(std::move(duals), inner.eq_multipliers);
  const bool ok = verify_certificate(p, cert, opts.tol_psd);
  r.certificate = cert;
  if (-tstar > 100.0 * opts.tol_psd && ok) {
    r.status = SdpStatus::Infeasible;
  } else {
    r.status = SdpStatus::Unknown;
    r.detail = ok ? "margin within indeterminate band" : "certificate failed verification";
  }
  return r;
}

}  // namespace opsys::sdp
