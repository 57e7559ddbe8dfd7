#pragma once

// Dense complex linear algebra helpers shared by every module: Kronecker
// products, partial traces, Hermitian checks and the real embedding of
// Hermitian matrices used by the SDP engine.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace opsys {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kDefaultSelfAdjointTol = 1e-9;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

/// Operator norm of the anti-Hermitian part, ||(x - x*)/2||.
inline double self_adjoint_defect(const CMatrix& x) {
  if (x.rows() == 0) return 0.0;
  CMatrix d = (x - x.adjoint()) * 0.5;
  Eigen::JacobiSVD<CMatrix> svd(d);
  return svd.singularValues()(0);
}

inline CMatrix hermitian_part(const CMatrix& x) { return (x + x.adjoint()) * 0.5; }

/// Eigenvalues (ascending) of the Hermitian part of x.
inline RVector hermitian_eigenvalues(const CMatrix& x) {
  if (x.rows() == 0) return RVector();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const CMatrix& x) {
  RVector ev = hermitian_eigenvalues(x);
  return ev.size() ? ev(0) : 0.0;
}

inline double max_eigenvalue(const CMatrix& x) {
  RVector ev = hermitian_eigenvalues(x);
  return ev.size() ? ev(ev.size() - 1) : 0.0;
}

inline double operator_norm(const CMatrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(x);
  return svd.singularValues()(0);
}

inline double trace_norm(const CMatrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(x);
  return svd.singularValues().sum();
}

/// Functional calculus on a Hermitian matrix: V f(D) V*.
template <class F>
CMatrix hermitian_apply(const CMatrix& x, F&& f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(x));
  RVector d = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// Moore-Penrose inverse square root of a PSD matrix; eigenvalues below
/// cutoff are treated as zero.
inline CMatrix psd_inverse_sqrt(const CMatrix& x, double cutoff = 1e-12) {
  return hermitian_apply(x, [cutoff](double v) { return v > cutoff ? 1.0 / std::sqrt(v) : 0.0; });
}

inline CMatrix psd_sqrt(const CMatrix& x) {
  return hermitian_apply(x, [](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
}

// Mixed-radix index helpers for tensor factors. Factor 0 is the most
// significant digit, matching the Kronecker convention above.
inline std::vector<int> unravel(int index, std::span<const int> dims) {
  std::vector<int> digits(dims.size());
  for (std::size_t f = dims.size(); f-- > 0;) {
    digits[f] = index % dims[f];
    index /= dims[f];
  }
  return digits;
}

inline int ravel(std::span<const int> digits, std::span<const int> dims) {
  int index = 0;
  for (std::size_t f = 0; f < dims.size(); ++f) index = index * dims[f] + digits[f];
  return index;
}

inline int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<>());
}

/// Partial trace of a matrix on C^{d_0} ⊗ ... ⊗ C^{d_{n-1}}; factors with
/// keep[f] == false are traced out.
inline CMatrix partial_trace(const CMatrix& rho, std::span<const int> dims,
                             const std::vector<bool>& keep) {
  const int total = product(dims);
  if (rho.rows() != total || rho.cols() != total)
    throw std::invalid_argument("partial_trace: matrix size does not match factor dimensions");
  std::vector<int> kept_dims;
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (keep[f]) kept_dims.push_back(dims[f]);
  const int out_dim = product(kept_dims);
  CMatrix out = CMatrix::Zero(out_dim, out_dim);
  std::vector<int> kept_row(kept_dims.size()), kept_col(kept_dims.size());
  for (int r = 0; r < total; ++r) {
    auto rd = unravel(r, dims);
    for (int c = 0; c < total; ++c) {
      auto cd = unravel(c, dims);
      bool diag_on_traced = true;
      std::size_t k = 0;
      for (std::size_t f = 0; f < dims.size(); ++f) {
        if (keep[f]) {
          kept_row[k] = rd[f];
          kept_col[k] = cd[f];
          ++k;
        } else if (rd[f] != cd[f]) {
          diag_on_traced = false;
          break;
        }
      }
      if (diag_on_traced) out(ravel(kept_row, kept_dims), ravel(kept_col, kept_dims)) += rho(r, c);
    }
  }
  return out;
}

/// Transposes the tensor factors with transpose[f] == true.
inline CMatrix partial_transpose(const CMatrix& rho, std::span<const int> dims,
                                 const std::vector<bool>& transpose) {
  const int total = product(dims);
  CMatrix out(total, total);
  for (int r = 0; r < total; ++r) {
    auto rd = unravel(r, dims);
    for (int c = 0; c < total; ++c) {
      auto cd = unravel(c, dims);
      auto nr = rd, nc = cd;
      for (std::size_t f = 0; f < dims.size(); ++f)
        if (transpose[f]) std::swap(nr[f], nc[f]);
      out(ravel(nr, dims), ravel(nc, dims)) = rho(r, c);
    }
  }
  return out;
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
/// Spectrum is that of h with every eigenvalue doubled in multiplicity.
inline RMatrix real_embedding(const CMatrix& h) {
  const Eigen::Index n = h.rows();
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

/// Hermitian matrix d with <real_embedding(h), z> = Re tr(h d) for every
/// Hermitian h. Structured averaging makes this well defined for any
/// symmetric z; tr d = tr z, and z ⪰ 0 implies d ⪰ 0.
inline CMatrix real_embedding_adjoint(const RMatrix& z) {
  const Eigen::Index n = z.rows() / 2;
  RMatrix p = z.topLeftCorner(n, n), q = z.topRightCorner(n, n), r = z.bottomRightCorner(n, n);
  CMatrix d(n, n);
  d.real() = p + r;
  d.imag() = q.transpose() - q;
  return d;
}

/// Re tr(x y) for Hermitian x, y; the real trace pairing used for states.
inline double real_pairing(const CMatrix& x, const CMatrix& y) {
  return (x.cwiseProduct(y.transpose())).sum().real();
}

}  // namespace opsys
