#pragma once

// Seeded random SDP instances shared by the solver tests and the
// acceptance binary.

#include "oracles.hpp"

#include "opsys/sampling.hpp"
#include "opsys/sdp/solver.hpp"

namespace instances {

using namespace opsys;

struct LambdaMax {
  sdp::SdpProblem problem;
  CMatrix x;
  int t = 0;
};

/// minimize t s.t. t·I − X ⪰ 0; real X on odd indices.
inline LambdaMax lambda_max(Rng& rng, int index) {
  const int n = 1 + index % 8;
  LambdaMax out;
  out.x = random_hermitian(n, rng);
  if (index % 2 == 1) out.x = out.x.real().cast<cplx>();
  out.t = out.problem.add_scalar();
  sdp::AffineMatrix e(-out.x);
  e.terms.emplace_back(out.t, CMatrix::Identity(n, n));
  out.problem.add_lmi(std::move(e), "t-x");
  out.problem.set_objective(out.t, 1.0);
  return out;
}

/// {X ⪰ 0, tr X = 1, tr(W_e X) = b_e}. Kinds cycle through feasible
/// (b from a random density), infeasible (b outside the numerical range
/// of W) and unstructured (b Gaussian).
inline sdp::SdpProblem feasibility(Rng& rng, int index, bool complex_data = true) {
  const int n = 2 + index % 3, m = 1 + index % 2, kind = index % 3;
  std::normal_distribution<double> g;
  sdp::SdpProblem p;
  auto x = p.add_psd_block(n, "X");
  p.add_trace_equality(x.expr(), CMatrix::Identity(n, n), 1.0);
  CMatrix rho = random_ginibre(n, n, rng);
  rho = rho * rho.adjoint();
  rho /= rho.trace();
  for (int e = 0; e < m; ++e) {
    CMatrix w = random_hermitian(n, rng);
    if (!complex_data) w = w.real().cast<cplx>();
    double b = 0.0;
    if (kind == 0) {
      b = (w * rho).trace().real();
    } else if (kind == 1) {
      b = oracle::lmax(w) + 0.05 + std::abs(g(rng));
    } else {
      b = g(rng);
    }
    p.add_trace_equality(x.expr(), w, b);
  }
  return p;
}

/// Same problem with every LMI replaced by its real symmetric embedding.
inline sdp::SdpProblem real_embedded(const sdp::SdpProblem& p) {
  sdp::SdpProblem q;
  q.set_num_vars(p.num_vars());
  for (const auto& l : p.lmis())
    q.add_lmi(l.expr.mapped([](const CMatrix& m) { return real_embedding(m).cast<cplx>().eval(); }), l.name);
  for (const auto& e : p.equalities()) q.add_equality(e.coeffs, e.rhs);
  if (p.has_objective()) q.set_objective_vector(p.objective(), p.objective_constant());
  return q;
}

struct Recheck {
  double margin = 0.0;
  double residual = 0.0;
  double min_dual_eigenvalue = 0.0;
};

/// Recomputes a certificate's pairing from the raw problem data.
inline Recheck recheck(const sdp::SdpProblem& p, const sdp::InfeasibilityCertificate& c) {
  Recheck r;
  double value = 0.0;
  RVector stat = RVector::Zero(p.num_vars());
  r.min_dual_eigenvalue = INFINITY;
  for (std::size_t j = 0; j < p.lmis().size(); ++j) {
    const CMatrix& d = c.lmi_duals[j];
    r.min_dual_eigenvalue = std::min(r.min_dual_eigenvalue, oracle::lmin(d));
    const auto& e = p.lmis()[j].expr;
    value += (e.constant * d).trace().real();
    for (const auto& [v, f] : e.terms) stat(v) += (f * d).trace().real();
  }
  for (std::size_t e = 0; e < p.equalities().size(); ++e) {
    value += c.eq_multipliers(e) * p.equalities()[e].rhs;
    for (const auto& [v, a] : p.equalities()[e].coeffs) stat(v) -= c.eq_multipliers(e) * a;
  }
  r.margin = -value;
  r.residual = stat.size() ? stat.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

}  // namespace instances
