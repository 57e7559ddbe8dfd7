#pragma once

// Operator-system structures on the unital direct sum A ⊕₁ B.
//
// An element a + b of M_k(A ⊕₁ B) is a pair (a, b) modulo the gauge
// (a + μ⊗1, b − μ⊗1), μ ∈ M_k. Three matrix cones are implemented:
//
//   min / max   a⊗1 + 1⊗b ⪰ 0 in M_k(A ⊗ B). Finite-dimensional algebras are
//               nuclear, so the max structure coincides with min and is an
//               alias.
//   coproduct   ∃ Hermitian λ ∈ M_k with a − λ⊗1 ⪰ 0 and b + λ⊗1 ⪰ 0,
//               decided as a semidefinite feasibility problem.

#include "opsys/algebra.hpp"
#include "opsys/errors.hpp"
#include "opsys/sampling.hpp"
#include "opsys/sdp/solver.hpp"
#include "opsys/states.hpp"

#include <functional>
#include <optional>
#include <string>

namespace opsys {

struct SumElement {
  int level = 1;
  AlgElement a;
  AlgElement b;

  SumElement() = default;
  SumElement(AlgElement a_, AlgElement b_) : level(a_.level), a(std::move(a_)), b(std::move(b_)) { validate(); }

  const FdAlgebra& left_algebra() const { return a.algebra; }
  const FdAlgebra& right_algebra() const { return b.algebra; }

  void validate() const {
    a.validate();
    b.validate();
    if (a.level != b.level || a.level != level)
      throw std::invalid_argument("SumElement: components must share the matrix level");
  }

  bool is_self_adjoint(double tol = kDefaultSelfAdjointTol) const {
    return a.is_self_adjoint(tol) && b.is_self_adjoint(tol);
  }

  SumElement adjoint() const { return SumElement(a.adjoint(), b.adjoint()); }
  SumElement operator-() const { return SumElement(-a, -b); }
};

enum class Verdict { Yes, No, Unknown };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "unknown";
  }
}

/// (a + μ⊗1_A, b − μ⊗1_B).
inline SumElement gauge_shift(const SumElement& x, const CMatrix& mu) {
  if (mu.rows() != x.level || mu.cols() != x.level) throw std::invalid_argument("gauge_shift: μ must be k×k");
  return SumElement(x.a + AlgElement::scalar(x.a.algebra, mu), x.b - AlgElement::scalar(x.b.algebra, mu));
}

/// a⊗1 + 1⊗b in M_k(A ⊗ B).
inline AlgElement joint_element(const SumElement& x) {
  return embed_left(x.a, x.b.algebra) + embed_right(x.a.algebra, x.b);
}

// ---------------------------------------------------------------- min / max

inline bool is_positive_min(const SumElement& x, double tol = kDefaultSelfAdjointTol) {
  if (!x.is_self_adjoint()) throw std::invalid_argument("is_positive_min: components must be self-adjoint");
  return is_positive_alg(joint_element(x), tol);
}

/// Alias of is_positive_min (nuclearity of finite-dimensional algebras).
inline bool is_positive_max(const SumElement& x, double tol = kDefaultSelfAdjointTol) {
  return is_positive_min(x, tol);
}

inline double norm_min(const SumElement& x) { return joint_element(x).norm(); }

/// Alias of norm_min (nuclearity of finite-dimensional algebras).
inline double norm_max(const SumElement& x) { return norm_min(x); }

// ---------------------------------------------------------------- coproduct

struct CoproductResult {
  Verdict verdict = Verdict::Unknown;
  /// Feasible λ when verdict is Yes.
  std::optional<CMatrix> lambda;
  /// Largest t with a − λ⊗1 ⪰ t and b + λ⊗1 ⪰ t (capped at 1).
  double margin = 0.0;
  sdp::SdpResult solver;
};

namespace detail {

inline sdp::AffineMatrix constant_expr(const CMatrix& m) { return sdp::AffineMatrix(m); }

/// λ ⊗ 1_n as an affine expression in the entries of λ.
inline sdp::AffineMatrix lift_scalar(const sdp::HermitianVar& lam, int n) {
  return lam.expr().kron_right(identity(n));
}

inline sdp::SdpProblem coproduct_problem(const SumElement& x, sdp::HermitianVar& lam) {
  sdp::SdpProblem p;
  lam = p.add_hermitian(x.level);
  for (int i = 0; i < x.a.algebra.num_blocks(); ++i)
    p.add_lmi(constant_expr(x.a.blocks[i]) - lift_scalar(lam, x.a.algebra.block_size(i)), "A" + std::to_string(i));
  for (int j = 0; j < x.b.algebra.num_blocks(); ++j)
    p.add_lmi(constant_expr(x.b.blocks[j]) + lift_scalar(lam, x.b.algebra.block_size(j)), "B" + std::to_string(j));
  return p;
}

}  // namespace detail

inline constexpr double kCoproductTol = 1e-8;

inline CoproductResult is_positive_coproduct(const SumElement& x, double tol = kCoproductTol,
                                             sdp::SolverOptions opts = {}) {
  if (!x.is_self_adjoint()) throw std::invalid_argument("is_positive_coproduct: components must be self-adjoint");
  opts.tol_psd = tol;
  sdp::HermitianVar lam;
  sdp::SdpProblem p = detail::coproduct_problem(x, lam);
  CoproductResult r;
  r.solver = sdp::check_feasible(p, opts);
  r.margin = r.solver.feasibility_margin.value_or(0.0);
  switch (r.solver.status) {
    case sdp::SdpStatus::Feasible:
      r.verdict = Verdict::Yes;
      r.lambda = lam.value(r.solver.x);
      break;
    case sdp::SdpStatus::Infeasible: r.verdict = Verdict::No; break;
    default: r.verdict = Verdict::Unknown; break;
  }
  return r;
}

// ---------------------------------------------------------- compatible pairs

/// States α on M_k(A) and β on M_k(B) (as states on M_k ⊗ A, M_k ⊗ B).
struct CompatiblePair {
  State alpha;
  State beta;
  /// Trace-norm distance between the M_k marginals.
  double marginal_gap = 0.0;
};

inline int state_level(const State& s) { return s.algebra.factor(0).block_size(0); }

inline CompatiblePair make_pair(State alpha, State beta) {
  if (alpha.algebra.num_factors() != 2 || beta.algebra.num_factors() != 2 ||
      alpha.algebra.factor(0).num_blocks() != 1 || beta.algebra.factor(0).num_blocks() != 1 ||
      state_level(alpha) != state_level(beta))
    throw std::invalid_argument("make_pair: states must live on M_k ⊗ A and M_k ⊗ B with a common k");
  CompatiblePair p{std::move(alpha), std::move(beta), 0.0};
  p.marginal_gap = trace_norm(corner_marginal(p.alpha) - corner_marginal(p.beta));
  return p;
}

/// α(a) + β(b).
inline double pair_value(const CompatiblePair& p, const SumElement& x) {
  return p.alpha.expect(x.a) + p.beta.expect(x.b);
}

/// Random pair with exactly matching M_k marginals: Hilbert-Schmidt states
/// on M_k ⊗ A and M_k ⊗ B, with β's corner corrected to α's.
inline CompatiblePair sample_compatible_pair(const FdAlgebra& a, const FdAlgebra& b, int k, Rng& rng) {
  State alpha = random_state(level_algebra(a, k), rng);
  State beta = random_state(level_algebra(b, k), rng);
  return make_pair(alpha, match_corner(beta, corner_marginal(alpha)));
}

struct CompatibleWitness {
  CompatiblePair pair;
  double value = 0.0;
};

/// Compatible pair on which x is negative, from the dual of the coproduct
/// feasibility problem. Throws PreconditionError if x is coproduct-positive
/// and SolverIndeterminateError if the solver cannot decide.
inline CompatibleWitness compatible_witness(const SumElement& x, double tol = kCoproductTol,
                                            const sdp::SolverOptions& opts = {}) {
  CoproductResult r = is_positive_coproduct(x, tol, opts);
  if (r.verdict == Verdict::Yes) throw PreconditionError("compatible_witness: element is coproduct-positive");
  if (r.verdict == Verdict::Unknown || !r.solver.certificate)
    throw SolverIndeterminateError("compatible_witness: solver could not decide positivity");
  const auto& d = r.solver.certificate->lmi_duals;
  const int na = x.a.algebra.num_blocks();
  std::vector<CMatrix> da(d.begin(), d.begin() + na), db(d.begin() + na, d.end());
  auto to_state = [](const FdAlgebra& alg, int k, std::vector<CMatrix> bl) {
    double tr = 0.0;
    for (auto& m : bl) {
      m = hermitian_apply(m, [](double v) { return std::max(v, 0.0); });
      tr += m.trace().real();
    }
    for (auto& m : bl) m /= tr;
    return State(level_algebra(alg, k), std::move(bl));
  };
  State alpha = to_state(x.a.algebra, x.level, std::move(da));
  State beta = to_state(x.b.algebra, x.level, std::move(db));
  beta = match_corner(beta, corner_marginal(alpha));
  CompatibleWitness w{make_pair(std::move(alpha), std::move(beta)), 0.0};
  w.value = pair_value(w.pair, x);
  return w;
}

// ------------------------------------------------------ tensor compatibility

/// Joint observable Y = Y_A⊗1 + 1⊗Y_B with Y ⪰ 0 and α(Y_A) + β(Y_B) < 0.
/// No joint state can have marginals α and β.
struct TensorCertificate {
  SumElement observable;
  /// −(α(Y_A) + β(Y_B)) after normalization to ‖Y‖ = 1.
  double violation = 0.0;
  /// λ_min(Y_A⊗1 + 1⊗Y_B) before the final positivity shift.
  double min_eigenvalue = 0.0;
};

struct TensorCompatibility {
  Verdict verdict = Verdict::Unknown;
  std::optional<State> joint;  // on M_k ⊗ A ⊗ B
  std::optional<TensorCertificate> certificate;
  double marginal_gap = 0.0;
  std::string detail;
};

/// Recomputes the violation of a certificate from scratch: shifts Y_A by
/// max(0, −λ_min) so the observable is positive, normalizes to unit norm
/// and evaluates on the pair.
inline TensorCertificate verify_tensor_certificate(const CompatiblePair& p, SumElement y) {
  TensorCertificate c;
  c.min_eigenvalue = joint_element(y).min_eigenvalue();
  if (c.min_eigenvalue < 0.0)
    y.a += AlgElement::scalar(y.a.algebra, (-c.min_eigenvalue) * CMatrix::Identity(y.level, y.level));
  const double n = norm_min(y);
  if (n > 0) {
    y.a *= cplx(1.0 / n);
    y.b *= cplx(1.0 / n);
  }
  c.violation = -pair_value(p, y);
  c.observable = std::move(y);
  return c;
}

namespace detail {

/// b ∈ M_k ⊗ M_m placed on the (M_k, M_m) legs of M_k ⊗ M_n ⊗ M_m.
inline CMatrix embed_right_block(const CMatrix& b, int k, int n, int m) {
  std::vector<int> dims{k, n, m};
  return embed_into_factors(b, dims, {true, false, true});
}

}  // namespace detail

inline TensorCompatibility is_tensor_compatible(const CompatiblePair& pair, double tol = 1e-8,
                                                sdp::SolverOptions opts = {}) {
  const State& alpha = pair.alpha;
  State beta = pair.beta;
  const int k = state_level(alpha);
  const FdAlgebra A = alpha.algebra.factor(1);
  const FdAlgebra B = beta.algebra.factor(1);
  TensorCompatibility res;
  res.marginal_gap = pair.marginal_gap;

  if (pair.marginal_gap > tol) {
    // Corner observable separating the two marginals.
    CMatrix diff = corner_marginal(alpha) - corner_marginal(beta);
    CMatrix mu = hermitian_apply(diff, [](double v) { return v > 0 ? -1.0 : (v < 0 ? 1.0 : 0.0); });
    SumElement y(AlgElement::scalar(A, mu), AlgElement::scalar(B, -mu));
    res.verdict = Verdict::No;
    res.certificate = verify_tensor_certificate(pair, y);
    res.detail = "marginals differ";
    return res;
  }
  beta = match_corner(beta, corner_marginal(alpha));

  if (k == 1) {
    // γ = α ⊗ β on M_1 ⊗ A ⊗ B.
    State a1 = reduce(alpha, {1}), b1 = reduce(beta, {1});
    State prod = product_state(a1, b1);
    res.joint = State(TensorAlgebra({matrix_algebra(1), A, B}), prod.blocks);
    res.verdict = Verdict::Yes;
    return res;
  }

  sdp::SdpProblem p;
  std::vector<sdp::HermitianVar> g;
  for (int i = 0; i < A.num_blocks(); ++i)
    for (int j = 0; j < B.num_blocks(); ++j)
      g.push_back(p.add_psd_block(k * A.block_size(i) * B.block_size(j), "gamma"));

  // Each equality row is Re tr(w · marginal) = target; the weights are kept
  // to rebuild the certificate observable from the multipliers.
  struct Row {
    bool left;
    int block;
    CMatrix weight;
  };
  std::vector<Row> rows;
  auto add_marginal = [&](bool left, int blk, const sdp::AffineMatrix& expr, const CMatrix& target) {
    const Eigen::Index n = expr.rows();
    auto add = [&](const CMatrix& w, double rhs) {
      p.add_trace_equality(expr, w, rhs);
      rows.push_back({left, blk, w});
    };
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = r; c < n; ++c) {
        CMatrix w = CMatrix::Zero(n, n);
        if (r == c) {
          w(r, r) = 1.0;
          add(w, target(r, r).real());
        } else {
          w(c, r) = 1.0;
          add(w, target(r, c).real());
          w(c, r) = cplx(0.0, -1.0);
          add(w, target(r, c).imag());
        }
      }
    }
  };
  for (int i = 0; i < A.num_blocks(); ++i) {
    const int n = A.block_size(i);
    sdp::AffineMatrix sum = sdp::AffineMatrix::zero(k * n, k * n);
    for (int j = 0; j < B.num_blocks(); ++j) {
      const int m = B.block_size(j);
      std::vector<int> dims{k, n, m};
      sum += g[i * B.num_blocks() + j].expr().mapped(
          [&](const CMatrix& x) { return partial_trace(x, dims, {true, true, false}); });
    }
    add_marginal(true, i, sum, alpha.blocks[i]);
  }
  for (int j = 0; j < B.num_blocks(); ++j) {
    const int m = B.block_size(j);
    sdp::AffineMatrix sum = sdp::AffineMatrix::zero(k * m, k * m);
    for (int i = 0; i < A.num_blocks(); ++i) {
      const int n = A.block_size(i);
      std::vector<int> dims{k, n, m};
      sum += g[i * B.num_blocks() + j].expr().mapped(
          [&](const CMatrix& x) { return partial_trace(x, dims, {true, false, true}); });
    }
    add_marginal(false, j, sum, beta.blocks[j]);
  }

  opts.tol_psd = std::min(opts.tol_psd, tol);
  sdp::SdpResult r = sdp::check_feasible(p, opts);
  if (r.status == sdp::SdpStatus::Feasible) {
    std::vector<CMatrix> bl;
    for (const auto& v : g) bl.push_back(hermitian_part(v.value(r.x)));
    res.joint = State(TensorAlgebra({matrix_algebra(k), A, B}), std::move(bl));
    res.verdict = Verdict::Yes;
    return res;
  }
  if (r.status == sdp::SdpStatus::Infeasible && r.certificate) {
    const RVector& y = r.certificate->eq_multipliers;
    AlgElement ya = AlgElement::zero(A, k), yb = AlgElement::zero(B, k);
    for (std::size_t e = 0; e < rows.size(); ++e) {
      CMatrix h = hermitian_part(rows[e].weight) * y(e);
      (rows[e].left ? ya : yb).blocks[rows[e].block] += h;
    }
    res.certificate = verify_tensor_certificate(make_pair(alpha, beta), SumElement(ya, yb));
    if (res.certificate->violation > 0.0) {
      res.verdict = Verdict::No;
      return res;
    }
    res.detail = "certificate did not survive re-verification";
    return res;
  }
  res.detail = r.detail.empty() ? "solver returned " + sdp::to_string(r.status) : r.detail;
  return res;
}

// ---------------------------------------------------- separation and witness

struct SeparatingResult {
  SumElement element;
  /// α(a) + β(b) for the returned element.
  double value = 0.0;
  /// λ_min(a⊗1 + 1⊗b) for the returned element (≥ 0).
  double min_eigenvalue = 0.0;
};

/// min α(a) + β(b) over min-positive (a, b) with −bound ⪯ a, b ⪯ bound.
/// Throws SeparationFailedError when the optimum is not strictly negative.
inline SeparatingResult separating_element(const CompatiblePair& pair, double bound = 1.0,
                                           sdp::SolverOptions opts = {}) {
  const int k = state_level(pair.alpha);
  const FdAlgebra& A = pair.alpha.algebra.factor(1);
  const FdAlgebra& B = pair.beta.algebra.factor(1);
  sdp::SdpProblem p;
  std::vector<sdp::HermitianVar> av, bv;
  for (int n : A.block_sizes()) av.push_back(p.add_hermitian(k * n));
  for (int m : B.block_sizes()) bv.push_back(p.add_hermitian(k * m));
  auto bounds = [&](const sdp::HermitianVar& v) {
    CMatrix c = bound * identity(v.n);
    p.add_lmi(sdp::AffineMatrix(c) - v.expr(), "upper");
    p.add_lmi(sdp::AffineMatrix(c) + v.expr(), "lower");
  };
  for (const auto& v : av) bounds(v);
  for (const auto& v : bv) bounds(v);
  for (int i = 0; i < A.num_blocks(); ++i) {
    for (int j = 0; j < B.num_blocks(); ++j) {
      const int n = A.block_size(i), m = B.block_size(j);
      sdp::AffineMatrix e = av[i].expr().kron_right(identity(m)) +
                            bv[j].expr().mapped([&](const CMatrix& x) { return detail::embed_right_block(x, k, n, m); });
      p.add_lmi(std::move(e), "joint");
    }
  }
  for (int i = 0; i < A.num_blocks(); ++i) p.add_trace_objective(av[i].expr(), pair.alpha.blocks[i]);
  for (int j = 0; j < B.num_blocks(); ++j) p.add_trace_objective(bv[j].expr(), pair.beta.blocks[j]);

  sdp::SdpResult r = sdp::solve(p, opts);
  if (r.status != sdp::SdpStatus::Optimal)
    throw SolverIndeterminateError("separating_element: solver returned " + sdp::to_string(r.status) + " " + r.detail);
  std::vector<CMatrix> ab, bb;
  for (const auto& v : av) ab.push_back(hermitian_part(v.value(r.x)));
  for (const auto& v : bv) bb.push_back(hermitian_part(v.value(r.x)));
  SumElement x(AlgElement(A, k, std::move(ab)), AlgElement(B, k, std::move(bb)));
  // Push the interior-point solution onto the min cone exactly.
  const double lmin = joint_element(x).min_eigenvalue();
  if (lmin < 0.0) x.a += AlgElement::scalar(A, (-lmin + 1e-12) * CMatrix::Identity(k, k));
  SeparatingResult s{x, pair_value(pair, x), joint_element(x).min_eigenvalue()};
  if (!(s.value < -1e-9)) throw SeparationFailedError("separating_element: no strictly separating element found");
  return s;
}

struct MonogamyWitness {
  CompatiblePair pair;
  TensorCompatibility marginal;
  SeparatingResult separating;
};

/// α: maximally entangled state on M_2 ⊗ A (corner marginal tr_2); β: pure
/// state on M_2 ⊗ B with the same corner marginal. A joint extension would
/// have a pure marginal on M_2 ⊗ A, forcing a product form whose M_2 ⊗ B
/// marginal cannot be pure.
inline CompatiblePair monogamy_pair(const FdAlgebra& A, const FdAlgebra& B) {
  if (A.is_commutative() || B.is_commutative())
    throw NoncommutativityRequiredError("monogamy_pair: both algebras must be noncommutative");
  return make_pair(bell_state(matrix_algebra(2), A), bell_state(matrix_algebra(2), B));
}

inline MonogamyWitness monogamy_witness(const FdAlgebra& A, const FdAlgebra& B, double bound = 1.0,
                                        const sdp::SolverOptions& opts = {}) {
  MonogamyWitness w{monogamy_pair(A, B), {}, {}};
  w.marginal = is_tensor_compatible(w.pair, 1e-8, opts);
  if (w.marginal.verdict == Verdict::Unknown)
    throw SolverIndeterminateError("monogamy_witness: marginal problem undecided: " + w.marginal.detail);
  if (w.marginal.verdict == Verdict::Yes)
    throw SeparationFailedError("monogamy_witness: pair unexpectedly admits a joint state");
  w.separating = separating_element(w.pair, bound, opts);
  return w;
}

// ------------------------------------------------------------------- norms

inline sdp::SolverOptions norm_solver_options() {
  sdp::SolverOptions o;
  o.tol_primal = 1e-9;
  o.tol_gap = 1e-9;
  o.tol_psd = 1e-9;
  return o;
}

struct NormResult {
  double value = 0.0;
  sdp::SdpStatus status = sdp::SdpStatus::Unknown;
  std::string detail;
};

/// Operator-space norm induced by the coproduct cones: the least t such that
/// [[t·1, a], [a*, 0]] + [[0, b], [b*, t·1]] is coproduct-positive at level
/// 2k, with t and λ ∈ M_{2k} solved jointly.
inline NormResult norm_coproduct_detail(const SumElement& x, const sdp::SolverOptions& opts = norm_solver_options()) {
  const int k = x.level;
  sdp::SdpProblem p;
  const int t = p.add_scalar();
  sdp::HermitianVar lam = p.add_hermitian(2 * k);
  auto corner = [&](const CMatrix& off, int n, bool t_top) {
    const int d = k * n;
    CMatrix c = CMatrix::Zero(2 * d, 2 * d);
    c.topRightCorner(d, d) = off;
    c.bottomLeftCorner(d, d) = off.adjoint();
    sdp::AffineMatrix e(c);
    CMatrix tc = CMatrix::Zero(2 * d, 2 * d);
    if (t_top)
      tc.topLeftCorner(d, d) = identity(d);
    else
      tc.bottomRightCorner(d, d) = identity(d);
    e.terms.emplace_back(t, tc);
    return e;
  };
  for (int i = 0; i < x.a.algebra.num_blocks(); ++i) {
    const int n = x.a.algebra.block_size(i);
    p.add_lmi(corner(x.a.blocks[i], n, true) - detail::lift_scalar(lam, n), "A");
  }
  for (int j = 0; j < x.b.algebra.num_blocks(); ++j) {
    const int m = x.b.algebra.block_size(j);
    p.add_lmi(corner(x.b.blocks[j], m, false) + detail::lift_scalar(lam, m), "B");
  }
  p.set_objective(t, 1.0);
  sdp::SdpResult r = sdp::solve(p, opts);
  NormResult out;
  out.status = r.status;
  out.detail = r.detail;
  out.value = r.status == sdp::SdpStatus::Optimal ? r.x(t) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

/// Throws SolverIndeterminateError when the solver does not reach optimality.
inline double norm_coproduct(const SumElement& x, const sdp::SolverOptions& opts = norm_solver_options()) {
  NormResult r = norm_coproduct_detail(x, opts);
  if (r.status != sdp::SdpStatus::Optimal)
    throw SolverIndeterminateError("norm_coproduct: solver returned " + sdp::to_string(r.status) + " " + r.detail);
  return r.value;
}

using NormFn = std::function<double(const SumElement&)>;

/// |‖a + b‖ − ‖−a + b‖| ≤ tol for a odd under g.
inline bool symmetry_check(const SumElement& x, const Grading& g, const NormFn& norm_fn, double tol = 1e-8) {
  g.validate();
  if (!(g.algebra == x.a.algebra)) throw std::invalid_argument("symmetry_check: grading is for another algebra");
  if (!is_odd(x.a, g)) throw std::invalid_argument("symmetry_check: a is not odd");
  return std::abs(norm_fn(x) - norm_fn(SumElement(-x.a, x.b))) <= tol;
}

}  // namespace opsys
