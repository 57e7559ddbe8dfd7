#pragma once

// Unitary intertwiner between two vector families with equal Gram matrices.

#include "opsys/errors.hpp"
#include "opsys/linalg.hpp"

#include <vector>

namespace opsys {

namespace detail {

// Extends the orthonormal columns of q to an orthonormal basis by running
// Gram-Schmidt (twice, for stability) over e_0, e_1, ... in index order.
inline CMatrix complete_basis(const CMatrix& q) {
  const Eigen::Index dim = q.rows();
  CMatrix basis = q;
  for (Eigen::Index j = 0; j < dim && basis.cols() < dim; ++j) {
    CVector v = CVector::Unit(dim, j);
    for (int pass = 0; pass < 2; ++pass) v -= basis * (basis.adjoint() * v);
    const double n = v.norm();
    if (n > 1e-6) {
      basis.conservativeResize(dim, basis.cols() + 1);
      basis.col(basis.cols() - 1) = v / n;
    }
  }
  return basis;
}

inline CMatrix stack_columns(const std::vector<CVector>& vs, Eigen::Index dim) {
  CMatrix m = CMatrix::Zero(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(i).head(vs[i].size()) = vs[i];
  return m;
}

}  // namespace detail

/// Returns a unitary U with U xs[i] = ys[i]. Vectors of different lengths
/// are zero-padded to a common ambient dimension. The non-unique part of U
/// is fixed by Gram-Schmidt of xs in index order and a completion of the
/// orthogonal complement from the standard basis in index order.
///
/// Throws GramMismatchError if the Gram matrices differ by more than
/// tol·max(1, ‖G‖), RankDeficientError if xs is (numerically) dependent.
inline CMatrix gram_intertwiner(const std::vector<CVector>& xs, const std::vector<CVector>& ys,
                                double tol = 1e-9) {
  if (xs.size() != ys.size()) throw std::invalid_argument("gram_intertwiner: families differ in length");
  if (xs.empty()) throw std::invalid_argument("gram_intertwiner: empty families");
  Eigen::Index dim = 0;
  for (const auto& v : xs) dim = std::max(dim, v.size());
  for (const auto& v : ys) dim = std::max(dim, v.size());

  CMatrix x = detail::stack_columns(xs, dim);
  CMatrix y = detail::stack_columns(ys, dim);
  CMatrix gx = x.adjoint() * x;
  CMatrix gy = y.adjoint() * y;
  const double scale = std::max(1.0, operator_norm(gx));
  if (operator_norm(gx - gy) > tol * scale)
    throw GramMismatchError("gram_intertwiner: Gram matrices differ beyond tolerance");

  CMatrix g = 0.5 * (gx + gy);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) <= std::max(tol, 1e-12) * scale)
    throw RankDeficientError("gram_intertwiner: vectors are linearly dependent");

  // G = R* R with R upper triangular; x R^{-1} is Gram-Schmidt of x in order.
  Eigen::LLT<CMatrix> llt(g);
  CMatrix r = llt.matrixU();
  CMatrix qx = r.adjoint().triangularView<Eigen::Lower>().solve(x.adjoint()).adjoint();
  CMatrix qy = r.adjoint().triangularView<Eigen::Lower>().solve(y.adjoint()).adjoint();

  CMatrix u = detail::complete_basis(qy) * detail::complete_basis(qx).adjoint();
  // Polar projection removes the O(tol) non-unitarity left by a Gram mismatch.
  Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace opsys
