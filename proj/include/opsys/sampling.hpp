#pragma once

// Seeded random generators for elements, densities and compatible pairs.

#include "opsys/algebra.hpp"
#include "opsys/states.hpp"

#include <cstdint>
#include <random>

namespace opsys {

using Rng = std::mt19937_64;

inline CMatrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = cplx(n01(rng), n01(rng)) / std::sqrt(2.0);
  return g;
}

/// Gaussian Hermitian (GUE-type) matrix.
inline CMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  CMatrix g = random_ginibre(n, n, rng);
  return (g + g.adjoint()) * 0.5;
}

inline CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<CMatrix> qr(random_ginibre(n, n, rng));
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  CMatrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double m = std::abs(r(j, j));
    if (m > 0) q.col(j) *= r(j, j) / m;
  }
  return q;
}

/// Self-adjoint element of M_k(A) with Gaussian Hermitian blocks, scaled to
/// unit operator norm.
inline AlgElement random_self_adjoint(const FdAlgebra& alg, int k, Rng& rng) {
  std::vector<CMatrix> bl;
  for (int n : alg.block_sizes()) bl.push_back(random_hermitian(k * n, rng));
  AlgElement x(alg, k, std::move(bl));
  const double nrm = x.norm();
  if (nrm > 0) x *= cplx(1.0 / nrm);
  return x;
}

/// General (non-self-adjoint) element with Ginibre blocks, unit norm.
inline AlgElement random_element(const FdAlgebra& alg, int k, Rng& rng) {
  std::vector<CMatrix> bl;
  for (int n : alg.block_sizes()) bl.push_back(random_ginibre(k * n, k * n, rng));
  AlgElement x(alg, k, std::move(bl));
  const double nrm = x.norm();
  if (nrm > 0) x *= cplx(1.0 / nrm);
  return x;
}

/// Random positive element x*x of M_k(A), unit norm.
inline AlgElement random_positive(const FdAlgebra& alg, int k, Rng& rng) {
  AlgElement g = random_element(alg, k, rng);
  AlgElement p = g.adjoint() * g;
  const double nrm = p.norm();
  if (nrm > 0) p *= cplx(1.0 / nrm);
  return p;
}

/// Hilbert-Schmidt random state on a (tensor) algebra: G G* per block,
/// normalized jointly.
inline State random_state(const TensorAlgebra& alg, Rng& rng) {
  FdAlgebra c = alg.combined();
  std::vector<CMatrix> bl;
  double tr = 0.0;
  for (int n : c.block_sizes()) {
    CMatrix g = random_ginibre(n, n, rng);
    bl.push_back(g * g.adjoint());
    tr += bl.back().trace().real();
  }
  for (auto& b : bl) b /= tr;
  return State(alg, std::move(bl));
}

inline State random_state(const FdAlgebra& alg, Rng& rng) { return random_state(TensorAlgebra({alg}), rng); }

/// Random vector state supported on a uniformly chosen block.
inline State random_pure_state(const TensorAlgebra& alg, Rng& rng) {
  FdAlgebra c = alg.combined();
  std::uniform_int_distribution<int> pick(0, c.num_blocks() - 1);
  const int blk = pick(rng);
  CVector psi = random_ginibre(c.block_size(blk), 1, rng).col(0);
  return vector_state(alg, blk, psi);
}

/// State on M_k ⊗ A, i.e. a state on M_k(A).
inline TensorAlgebra level_algebra(const FdAlgebra& a, int k) { return TensorAlgebra(matrix_algebra(k), a); }

/// Restriction of a state on M_k ⊗ A to the scalar corner M_k.
inline CMatrix corner_marginal(const State& s) { return reduce(s, {0}).blocks.at(0); }

/// Conjugates the M_k leg of β so its corner marginal equals target:
/// β' = (T ⊗ 1) β (T ⊗ 1)* with T = target^{1/2} σ^{-1/2}, σ = β|M_k.
/// Exact only when σ is invertible; with singular σ the result's corner is
/// matched on the support of σ alone (check marginal_gap of the pair).
inline State match_corner(const State& beta, const CMatrix& target) {
  CMatrix t = psd_sqrt(target) * psd_inverse_sqrt(corner_marginal(beta));
  std::vector<CMatrix> bl;
  for (int b = 0; b < beta.algebra.num_blocks(); ++b) {
    const int n = beta.algebra.inner_dims(b)[1];
    CMatrix tt = kron(t, identity(n));
    bl.push_back(tt * beta.blocks[b] * tt.adjoint());
  }
  return State(beta.algebra, std::move(bl));
}

}  // namespace opsys
