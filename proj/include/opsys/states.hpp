#pragma once

// States on (tensor products of) finite-dimensional C*-algebras, represented
// by density blocks under the trace pairing φ(x) = Σ_i tr(ρ_i x_i).

#include "opsys/algebra.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace opsys {

inline constexpr double kStateTol = 1e-9;
inline constexpr double kPurityTol = 1e-8;

struct State {
  TensorAlgebra algebra;
  std::vector<CMatrix> blocks;

  State() = default;
  State(TensorAlgebra alg, std::vector<CMatrix> bl) : algebra(std::move(alg)), blocks(std::move(bl)) {
    check_shapes();
  }
  State(const FdAlgebra& alg, std::vector<CMatrix> bl) : State(TensorAlgebra({alg}), std::move(bl)) {}

  FdAlgebra combined() const { return algebra.combined(); }

  void check_shapes() const {
    FdAlgebra c = algebra.combined();
    if (static_cast<int>(blocks.size()) != c.num_blocks())
      throw std::invalid_argument("State: block count does not match algebra");
    for (int i = 0; i < c.num_blocks(); ++i)
      if (blocks[i].rows() != c.block_size(i) || blocks[i].cols() != c.block_size(i))
        throw std::invalid_argument("State: density block shape mismatch");
  }

  double trace() const {
    double t = 0.0;
    for (const auto& b : blocks) t += b.trace().real();
    return t;
  }

  double min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) m = std::min(m, opsys::min_eigenvalue(b));
    return m;
  }

  /// PSD within tol, unit trace within tol, Hermitian within tol.
  bool is_valid(double tol = kStateTol) const {
    for (const auto& b : blocks)
      if (opsys::self_adjoint_defect(b) > tol) return false;
    return std::abs(trace() - 1.0) <= tol && min_eigenvalue() >= -tol;
  }

  void validate(double tol = kStateTol) const {
    if (!is_valid(tol)) throw std::invalid_argument("State: not a PSD unit-trace density");
  }

  /// φ(x) = Σ_i tr(ρ_i x_i). The element's blocks must match the density
  /// blocks; in particular a level-k element of A pairs with a state on M_k ⊗ A.
  cplx operator()(const AlgElement& x) const {
    if (x.blocks.size() != blocks.size()) throw std::invalid_argument("State: element block count mismatch");
    cplx v = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (x.blocks[i].rows() != blocks[i].rows())
        throw std::invalid_argument("State: element block shape mismatch");
      v += (blocks[i] * x.blocks[i]).trace();
    }
    return v;
  }

  /// Real part of φ(x); exact for self-adjoint x.
  double expect(const AlgElement& x) const { return (*this)(x).real(); }

  double distance_l1(const State& o) const {
    if (blocks.size() != o.blocks.size()) throw std::invalid_argument("State: algebra mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) d += trace_norm(blocks[i] - o.blocks[i]);
    return d;
  }
};

/// Splits the tensor factors of a state into a left and a right group.
struct Cut {
  std::vector<int> left;

  std::vector<int> right(int num_factors) const {
    std::vector<int> r;
    for (int f = 0; f < num_factors; ++f)
      if (std::find(left.begin(), left.end(), f) == left.end()) r.push_back(f);
    return r;
  }

  void validate(int num_factors) const {
    std::set<int> seen(left.begin(), left.end());
    if (left.empty() || static_cast<int>(seen.size()) != static_cast<int>(left.size()))
      throw std::invalid_argument("Cut: left group must be nonempty and duplicate-free");
    for (int f : left)
      if (f < 0 || f >= num_factors) throw std::invalid_argument("Cut: factor index out of range");
    if (static_cast<int>(left.size()) >= num_factors)
      throw std::invalid_argument("Cut: right group must be nonempty");
  }
};

/// φ ⊗ ψ with density blocks ρ_i ⊗ τ_j.
inline State product_state(const State& phi, const State& psi) {
  std::vector<CMatrix> blocks;
  for (const auto& r : phi.blocks)
    for (const auto& t : psi.blocks) blocks.push_back(kron(r, t));
  return State(concat(phi.algebra, psi.algebra), std::move(blocks));
}

/// Reduced state on the listed factors (kept in the given order, which must
/// be increasing).
inline State reduce(const State& gamma, const std::vector<int>& keep_factors) {
  const int nf = gamma.algebra.num_factors();
  if (keep_factors.empty()) throw std::invalid_argument("reduce: nothing to keep");
  if (!std::is_sorted(keep_factors.begin(), keep_factors.end()))
    throw std::invalid_argument("reduce: kept factors must be increasing");
  std::vector<bool> keep(nf, false);
  for (int f : keep_factors) {
    if (f < 0 || f >= nf) throw std::invalid_argument("reduce: factor index out of range");
    keep[f] = true;
  }
  TensorAlgebra sub = gamma.algebra.sub(keep_factors);
  FdAlgebra sc = sub.combined();
  std::vector<CMatrix> out;
  for (int b = 0; b < sc.num_blocks(); ++b) out.push_back(CMatrix::Zero(sc.block_size(b), sc.block_size(b)));
  for (int b = 0; b < gamma.algebra.num_blocks(); ++b) {
    auto t = gamma.algebra.block_tuple(b);
    std::vector<int> st;
    for (int f : keep_factors) st.push_back(t[f]);
    out[sub.block_index(st)] += partial_trace(gamma.blocks[b], gamma.algebra.inner_dims(b), keep);
  }
  return State(sub, std::move(out));
}

inline State reduce(const State& gamma, const Cut& cut, bool left_side) {
  cut.validate(gamma.algebra.num_factors());
  auto l = cut.left;
  std::sort(l.begin(), l.end());
  return reduce(gamma, left_side ? l : cut.right(gamma.algebra.num_factors()));
}

/// Re-expresses a state on A_0 ⊗ ... ⊗ A_{n-1} as a bipartite state on
/// [⊗ left factors] ⊗ [⊗ right factors].
inline State regroup(const State& gamma, const Cut& cut) {
  const int nf = gamma.algebra.num_factors();
  cut.validate(nf);
  auto left = cut.left;
  std::sort(left.begin(), left.end());
  auto right = cut.right(nf);
  std::vector<int> order = left;
  order.insert(order.end(), right.begin(), right.end());

  TensorAlgebra lt = gamma.algebra.sub(left), rt = gamma.algebra.sub(right);
  TensorAlgebra bip(lt.combined(), rt.combined());
  FdAlgebra bc = bip.combined();
  std::vector<CMatrix> out(bc.num_blocks());
  for (int b = 0; b < bc.num_blocks(); ++b) out[b] = CMatrix::Zero(bc.block_size(b), bc.block_size(b));

  for (int b = 0; b < gamma.algebra.num_blocks(); ++b) {
    auto t = gamma.algebra.block_tuple(b);
    std::vector<int> tl, tr;
    for (int f : left) tl.push_back(t[f]);
    for (int f : right) tr.push_back(t[f]);
    const int nb = bip.block_index({lt.block_index(tl), rt.block_index(tr)});
    auto dims = gamma.algebra.inner_dims(b);
    std::vector<int> pdims;
    for (int f : order) pdims.push_back(dims[f]);
    const int total = product(dims);
    std::vector<int> pd(nf);
    auto permuted = [&](int idx) {
      auto d = unravel(idx, dims);
      for (int f = 0; f < nf; ++f) pd[f] = d[order[f]];
      return ravel(pd, pdims);
    };
    std::vector<int> perm(total);
    for (int i = 0; i < total; ++i) perm[i] = permuted(i);
    for (int r = 0; r < total; ++r)
      for (int c = 0; c < total; ++c) out[nb](perm[r], perm[c]) = gamma.blocks[b](r, c);
  }
  return State(bip, std::move(out));
}

/// Pure: supported on a single block where it has rank one.
inline bool is_pure(const State& s, double tol = kPurityTol) {
  int support = -1;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    if (s.blocks[i].trace().real() > tol) {
      if (support >= 0) return false;
      support = static_cast<int>(i);
    }
  }
  if (support < 0) return false;
  RVector ev = hermitian_eigenvalues(s.blocks[support]);
  return ev.size() < 2 || ev(ev.size() - 2) <= tol;
}

/// Vector state of ψ placed in one block of an algebra.
inline State vector_state(const TensorAlgebra& alg, int block, const CVector& psi) {
  FdAlgebra c = alg.combined();
  if (block < 0 || block >= c.num_blocks()) throw std::invalid_argument("vector_state: block out of range");
  if (psi.size() != c.block_size(block)) throw std::invalid_argument("vector_state: vector size mismatch");
  std::vector<CMatrix> bl;
  for (int i = 0; i < c.num_blocks(); ++i) bl.push_back(CMatrix::Zero(c.block_size(i), c.block_size(i)));
  CVector v = psi / psi.norm();
  bl[block] = v * v.adjoint();
  return State(alg, std::move(bl));
}

inline State vector_state(const FdAlgebra& alg, int block, const CVector& psi) {
  return vector_state(TensorAlgebra({alg}), block, psi);
}

/// Normalized trace on a single-block algebra, e.g. tr_2 on M_2.
inline State normalized_trace(const FdAlgebra& alg) {
  if (alg.num_blocks() != 1) throw std::invalid_argument("normalized_trace: single-block algebra required");
  const int n = alg.block_size(0);
  return State(alg, {identity(n) / static_cast<double>(n)});
}

/// Orthonormal pair used by bell_state.
struct VectorPair {
  CVector first, second;
};

inline VectorPair standard_pair(int dim) { return {CVector::Unit(dim, 0), CVector::Unit(dim, 1)}; }

/// Pure state of (ξ₁⊗ζ₁ + ξ₂⊗ζ₂)/√2 on block (blk_a, blk_b) of A ⊗ B.
inline State bell_state(const FdAlgebra& a, const FdAlgebra& b, int blk_a, int blk_b, const VectorPair& xi,
                        const VectorPair& zeta, double tol = 1e-10) {
  if (blk_a < 0 || blk_a >= a.num_blocks() || blk_b < 0 || blk_b >= b.num_blocks())
    throw std::invalid_argument("bell_state: block index out of range");
  if (a.block_size(blk_a) < 2 || b.block_size(blk_b) < 2)
    throw NoncommutativityRequiredError("bell_state: both chosen blocks need size >= 2");
  auto orthonormal = [tol](const VectorPair& p, int dim) {
    return p.first.size() == dim && p.second.size() == dim && std::abs(p.first.norm() - 1.0) <= tol &&
           std::abs(p.second.norm() - 1.0) <= tol && std::abs(p.first.dot(p.second)) <= tol;
  };
  if (!orthonormal(xi, a.block_size(blk_a)) || !orthonormal(zeta, b.block_size(blk_b)))
    throw std::invalid_argument("bell_state: vector pairs must be orthonormal in the chosen blocks");
  TensorAlgebra ab(a, b);
  CVector psi = (kron(xi.first, zeta.first) + kron(xi.second, zeta.second)) / std::sqrt(2.0);
  return vector_state(ab, ab.block_index({blk_a, blk_b}), psi);
}

/// Bell state on the first blocks of size ≥ 2 with standard basis vectors.
inline State bell_state(const FdAlgebra& a, const FdAlgebra& b) {
  const int ia = a.first_noncommutative_block(), ib = b.first_noncommutative_block();
  if (ia < 0 || ib < 0) throw NoncommutativityRequiredError("bell_state: both algebras must be noncommutative");
  return bell_state(a, b, ia, ib, standard_pair(a.block_size(ia)), standard_pair(b.block_size(ib)));
}

enum class PureSepClass { Entangled, Product, Inconclusive };

inline std::string to_string(PureSepClass c) {
  switch (c) {
    case PureSepClass::Entangled: return "entangled";
    case PureSepClass::Product: return "product";
    default: return "inconclusive";
  }
}

struct PureSepResult {
  PureSepClass verdict = PureSepClass::Inconclusive;
  bool state_pure = false;
  bool left_marginal_pure = false;
  /// ‖γ − γ|_L ⊗ γ|_R‖₁, computed whenever the left marginal is pure.
  std::optional<double> reconstruction_error;
};

inline constexpr double kReconstructionTol = 1e-8;

/// Pure with mixed left marginal ⇒ entangled; pure left marginal ⇒ product
/// (confirmed by reconstruction); otherwise inconclusive.
inline PureSepResult classify_puresep(const State& gamma, const Cut& cut = Cut{{0}}) {
  State bip = regroup(gamma, cut);
  State left = reduce(bip, {0});
  PureSepResult res;
  res.state_pure = is_pure(bip);
  res.left_marginal_pure = is_pure(left);
  if (res.state_pure && !res.left_marginal_pure) {
    res.verdict = PureSepClass::Entangled;
  } else if (res.left_marginal_pure) {
    State recon = product_state(left, reduce(bip, {1}));
    res.reconstruction_error = bip.distance_l1(recon);
    res.verdict = *res.reconstruction_error <= kReconstructionTol ? PureSepClass::Product
                                                                   : PureSepClass::Inconclusive;
  }
  return res;
}

enum class Separability { Separable, Entangled, PptUnknown };

inline std::string to_string(Separability s) {
  switch (s) {
    case Separability::Separable: return "separable";
    case Separability::Entangled: return "entangled";
    default: return "ppt_unknown";
  }
}

/// One term p · (φ ⊗ ψ) of a separable decomposition.
struct ProductTerm {
  double weight;
  State left, right;
};

struct SeparabilityResult {
  Separability status = Separability::PptUnknown;
  double min_pt_eigenvalue = 0.0;
  /// Present when every occupied block has a one-dimensional side.
  std::optional<std::vector<ProductTerm>> decomposition;
};

inline State recompose(const std::vector<ProductTerm>& terms) {
  if (terms.empty()) throw std::invalid_argument("recompose: no terms");
  State out = product_state(terms[0].left, terms[0].right);
  for (auto& b : out.blocks) b *= terms[0].weight;
  for (std::size_t t = 1; t < terms.size(); ++t) {
    State p = product_state(terms[t].left, terms[t].right);
    for (std::size_t i = 0; i < out.blocks.size(); ++i) out.blocks[i] += terms[t].weight * p.blocks[i];
  }
  return out;
}

/// PPT test across a cut. Negative partial transpose ⇒ entangled. Blocks of
/// shape 1⊗m, n⊗1, 2⊗2, 2⊗3 or 3⊗2 are decided exactly; larger blocks that
/// pass give ppt_unknown.
inline SeparabilityResult separability_status(const State& gamma, const Cut& cut, double tol = 1e-9) {
  State bip = regroup(gamma, cut);
  const TensorAlgebra& alg = bip.algebra;
  SeparabilityResult res;
  res.min_pt_eigenvalue = std::numeric_limits<double>::infinity();
  bool exact = true, trivially_separable = true;
  const double weight_cut = 1e-14;
  for (int b = 0; b < alg.num_blocks(); ++b) {
    if (bip.blocks[b].trace().real() <= weight_cut && operator_norm(bip.blocks[b]) <= weight_cut) continue;
    auto dims = alg.inner_dims(b);
    CMatrix pt = partial_transpose(bip.blocks[b], dims, {false, true});
    res.min_pt_eigenvalue = std::min(res.min_pt_eigenvalue, opsys::min_eigenvalue(pt));
    const int n = dims[0], m = dims[1];
    if (std::min(n, m) > 1) {
      trivially_separable = false;
      if (n * m > 6) exact = false;
    }
  }
  if (res.min_pt_eigenvalue < -tol) {
    res.status = Separability::Entangled;
  } else if (exact) {
    res.status = Separability::Separable;
  } else {
    res.status = Separability::PptUnknown;
  }
  if (res.status == Separability::Separable && trivially_separable) {
    std::vector<ProductTerm> terms;
    const FdAlgebra& la = alg.factor(0);
    const FdAlgebra& ra = alg.factor(1);
    auto delta = [](const FdAlgebra& f, int blk, const CMatrix& rho) {
      std::vector<CMatrix> bl;
      for (int i = 0; i < f.num_blocks(); ++i) bl.push_back(CMatrix::Zero(f.block_size(i), f.block_size(i)));
      bl[blk] = rho;
      return State(f, std::move(bl));
    };
    for (int b = 0; b < alg.num_blocks(); ++b) {
      const double p = bip.blocks[b].trace().real();
      if (p <= weight_cut) continue;
      auto t = alg.block_tuple(b);
      auto dims = alg.inner_dims(b);
      CMatrix rho = bip.blocks[b] / p;
      // A 1⊗m block is δ_i ⊗ ρ; an n⊗1 block is ρ ⊗ δ_j.
      if (dims[0] == 1)
        terms.push_back({p, delta(la, t[0], identity(1)), delta(ra, t[1], rho)});
      else
        terms.push_back({p, delta(la, t[0], rho), delta(ra, t[1], identity(1))});
    }
    res.decomposition = std::move(terms);
  }
  return res;
}

/// Checks, on this instance, that an entangled AB-marginal forces the state
/// to be non-separable across A | [B ⊗ C]. Requires three tensor factors.
inline bool tritobi_check(const State& gamma, double tol = 1e-9) {
  if (gamma.algebra.num_factors() != 3) throw std::invalid_argument("tritobi_check: tripartite state required");
  State ab = reduce(gamma, {0, 1});
  auto marginal = separability_status(ab, Cut{{0}}, tol);
  if (marginal.status != Separability::Entangled) return true;
  auto full = separability_status(gamma, Cut{{0}}, tol);
  return full.status != Separability::Separable;
}

}  // namespace opsys
