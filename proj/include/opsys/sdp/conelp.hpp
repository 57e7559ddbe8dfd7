#pragma once

// Primal-dual interior-point method for real cone programs
//
//   minimize    c'x
//   subject to  G x + s = h,  A x = b,  s ∈ S^{d_1}_+ × ... × S^{d_m}_+
//
// with dual  maximize −h'z − b'y  s.t.  G'z + A'y + c = 0,  z ⪰ 0.
//
// The method runs on the homogeneous self-dual embedding with Nesterov-Todd
// scaling and a Mehrotra predictor-corrector, so it returns either an
// optimal pair or a certificate of primal or dual infeasibility. Cone vectors
// use the packed lower-triangular "svec" layout (off-diagonals scaled by √2)
// so that Euclidean inner products equal trace inner products.

#include "opsys/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace opsys::sdp {

struct ConeLpData {
  RVector c;
  RMatrix G;
  RVector h;
  RMatrix A;
  RVector b;
  std::vector<int> dims;
};

struct ConeLpOptions {
  double feastol = 1e-8;
  double abstol = 1e-7;
  double reltol = 1e-7;
  int max_iter = 100;
  bool verbose = false;
};

enum class ConeLpStatus { Optimal, PrimalInfeasible, DualInfeasible, Unknown };

struct ConeLpSolution {
  ConeLpStatus status = ConeLpStatus::Unknown;
  RVector x, s, y, z;
  int iterations = 0;
  double pres = 0.0, dres = 0.0, gap = 0.0, relgap = 0.0;
  double pinfres = 0.0, dinfres = 0.0;
  std::string detail;
};

namespace conelp_detail {

using Blocks = std::vector<RMatrix>;

inline int svec_size(int d) { return d * (d + 1) / 2; }

inline int total_size(const std::vector<int>& dims) {
  int m = 0;
  for (int d : dims) m += svec_size(d);
  return m;
}

inline void pack_into(const RMatrix& x, double* out) {
  const int d = static_cast<int>(x.rows());
  const double r2 = std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    out[k++] = x(j, j);
    for (int i = j + 1; i < d; ++i) out[k++] = r2 * 0.5 * (x(i, j) + x(j, i));
  }
}

inline RMatrix unpack_from(const double* v, int d) {
  RMatrix x(d, d);
  const double ir2 = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    x(j, j) = v[k++];
    for (int i = j + 1; i < d; ++i) {
      x(i, j) = x(j, i) = v[k++] * ir2;
    }
  }
  return x;
}

inline RVector pack(const Blocks& bl, const std::vector<int>& dims) {
  RVector v(total_size(dims));
  int off = 0;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    pack_into(bl[j], v.data() + off);
    off += svec_size(dims[j]);
  }
  return v;
}

inline Blocks unpack(const RVector& v, const std::vector<int>& dims) {
  Blocks bl;
  int off = 0;
  for (int d : dims) {
    bl.push_back(unpack_from(v.data() + off, d));
    off += svec_size(d);
  }
  return bl;
}

/// W is stored as r (W z = r' z r) and rti = r^{-T} (W^{-T} s = rti' s rti).
struct NtScaling {
  Blocks r, rti;
  std::vector<RVector> lambda;
};

inline bool lower_cholesky(const RMatrix& x, RMatrix& l) {
  Eigen::LLT<RMatrix> llt(0.5 * (x + x.transpose()));
  if (llt.info() != Eigen::Success) return false;
  l = llt.matrixL();
  return l.allFinite() && l.diagonal().minCoeff() > 0.0;
}

// Shared core of compute/update: from factors Ls, Lz build the new factors.
inline bool scaling_step(const RMatrix& ls, const RMatrix& lz, RMatrix& r, RMatrix& rti, RVector& lambda) {
  Eigen::JacobiSVD<RMatrix> svd(lz.transpose() * ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  lambda = svd.singularValues();
  if (!(lambda.minCoeff() > 0.0) || !lambda.allFinite()) return false;
  RVector isq = lambda.cwiseSqrt().cwiseInverse();
  r = ls * svd.matrixV() * isq.asDiagonal();
  rti = lz * svd.matrixU() * isq.asDiagonal();
  return true;
}

inline bool compute_scaling(const Blocks& s, const Blocks& z, NtScaling& w) {
  w.r.resize(s.size());
  w.rti.resize(s.size());
  w.lambda.resize(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    RMatrix ls, lz;
    if (!lower_cholesky(s[j], ls) || !lower_cholesky(z[j], lz)) return false;
    if (!scaling_step(ls, lz, w.r[j], w.rti[j], w.lambda[j])) return false;
  }
  return true;
}

/// s_t = W^{-T} s_new, z_t = W z_new in the current scaling.
inline bool update_scaling(NtScaling& w, const Blocks& s_t, const Blocks& z_t) {
  for (std::size_t j = 0; j < s_t.size(); ++j) {
    RMatrix ls, lz, r, rti;
    RVector lam;
    if (!lower_cholesky(s_t[j], ls) || !lower_cholesky(z_t[j], lz)) return false;
    if (!scaling_step(ls, lz, r, rti, lam)) return false;
    w.r[j] = w.r[j] * r;
    w.rti[j] = w.rti[j] * rti;
    w.lambda[j] = lam;
  }
  return true;
}

inline Blocks apply_w(const NtScaling& w, const Blocks& x) {  // W x
  Blocks out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = w.r[j].transpose() * x[j] * w.r[j];
  return out;
}
inline Blocks apply_w_inv_t(const NtScaling& w, const Blocks& x) {  // W^{-T} x
  Blocks out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = w.rti[j].transpose() * x[j] * w.rti[j];
  return out;
}
inline Blocks apply_w_t(const NtScaling& w, const Blocks& x) {  // W^T x
  Blocks out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = w.r[j] * x[j] * w.r[j].transpose();
  return out;
}
inline Blocks apply_w_inv(const NtScaling& w, const Blocks& x) {  // W^{-1} x
  Blocks out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = w.rti[j] * x[j] * w.rti[j].transpose();
  return out;
}

// Jordan products against the diagonal scaled point λ.
inline Blocks lambda_times(const std::vector<RVector>& lam, const Blocks& u) {
  Blocks out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    out[j] = u[j];
    for (Eigen::Index a = 0; a < u[j].rows(); ++a)
      for (Eigen::Index b = 0; b < u[j].cols(); ++b) out[j](a, b) *= 0.5 * (lam[j](a) + lam[j](b));
  }
  return out;
}
inline Blocks lambda_divide(const std::vector<RVector>& lam, const Blocks& v) {
  Blocks out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[j] = v[j];
    for (Eigen::Index a = 0; a < v[j].rows(); ++a)
      for (Eigen::Index b = 0; b < v[j].cols(); ++b) out[j](a, b) *= 2.0 / (lam[j](a) + lam[j](b));
  }
  return out;
}
inline Blocks jordan(const Blocks& u, const Blocks& v) {
  Blocks out(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = 0.5 * (u[j] * v[j] + v[j] * u[j]);
  return out;
}

inline Blocks diag_blocks(const std::vector<RVector>& lam) {
  Blocks out;
  for (const auto& l : lam) out.push_back(l.asDiagonal());
  return out;
}

inline Blocks identity_blocks(const std::vector<int>& dims) {
  Blocks out;
  for (int d : dims) out.push_back(RMatrix::Identity(d, d));
  return out;
}

inline Blocks axpy(double a, const Blocks& x, const Blocks& y) {  // a x + y
  Blocks out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = a * x[j] + y[j];
  return out;
}

inline double dot(const Blocks& x, const Blocks& y) {
  double d = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) d += x[j].cwiseProduct(y[j]).sum();
  return d;
}

inline double min_eig(const RMatrix& x) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (x + x.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// max{ -λ_min(x_j) } over blocks.
inline double max_step_cone(const Blocks& x) {
  double t = -std::numeric_limits<double>::infinity();
  for (const auto& b : x) t = std::max(t, -min_eig(b));
  return t;
}

/// Largest α with λ + α d ⪰ 0 (infinity if unbounded).
inline double step_to_boundary(const std::vector<RVector>& lam, const Blocks& d) {
  double worst = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    RVector isq = lam[j].cwiseSqrt().cwiseInverse();
    RMatrix m = isq.asDiagonal() * d[j] * isq.asDiagonal();
    worst = std::min(worst, min_eig(m));
  }
  return worst < 0.0 ? -1.0 / worst : std::numeric_limits<double>::infinity();
}

/// Reduced KKT solver. Equalities are eliminated once with a QR of A', so
/// each factorization is a Cholesky of N'(Gs'Gs)N on the null space of A.
class KktSolver {
 public:
  KktSolver(const ConeLpData& d) : data_(d) {
    const Eigen::Index n = d.G.cols(), p = d.A.rows();
    if (p > 0) {
      Eigen::HouseholderQR<RMatrix> qr(d.A.transpose());
      RMatrix q = qr.householderQ() * RMatrix::Identity(n, n);
      q1_ = q.leftCols(p);
      null_ = q.rightCols(n - p);
      r_ = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    } else {
      null_ = RMatrix::Identity(n, n);
    }
  }

  bool factor(const NtScaling& w) {
    w_ = &w;
    const Eigen::Index n = data_.G.cols();
    gs_.resize(data_.G.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Blocks col = unpack(data_.G.col(i), data_.dims);
      gs_.col(i) = pack(apply_w_inv_t(w, col), data_.dims);
    }
    h_ = gs_.transpose() * gs_;
    use_qr_ = false;
    if (null_.cols() == 0) return true;
    // N'HN = R'R from a QR of Gs·N, which avoids squaring the condition
    // number of the scaled constraint matrix.
    RMatrix gsn = gs_ * null_;
    if (gsn.rows() >= gsn.cols()) {
      Eigen::HouseholderQR<RMatrix> qr(gsn);
      rq_ = qr.matrixQR().topRows(gsn.cols()).triangularView<Eigen::Upper>();
      const RVector d = rq_.diagonal().cwiseAbs();
      if (d.allFinite() && d.minCoeff() > 1e-15 * std::max(d.maxCoeff(), 1.0)) {
        use_qr_ = true;
        return true;
      }
    }
    RMatrix reduced = null_.transpose() * h_ * null_;
    reduced = 0.5 * (reduced + reduced.transpose());
    llt_.compute(reduced);
    if (llt_.info() == Eigen::Success) return true;
    // Near convergence the scaled system loses definiteness to roundoff; a
    // tiny diagonal shift is repaired by iterative refinement.
    const double dmax = reduced.diagonal().cwiseAbs().maxCoeff();
    for (double eps : {1e-14, 1e-12, 1e-10}) {
      RMatrix shifted = reduced;
      shifted.diagonal().array() += eps * std::max(dmax, 1.0);
      llt_.compute(shifted);
      if (llt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  /// Solves [0 A' G'; A 0 0; G 0 -W'W] [ux; uy; uz] = [bx; by; bz].
  void solve(const RVector& bx, const RVector& by, const Blocks& bz, RVector& ux, RVector& uy, Blocks& uz) const {
    solve_once(bx, by, bz, ux, uy, uz);
    for (int pass = 0; pass < 2; ++pass) {
      RVector rx, ry;
      Blocks rz;
      residual(bx, by, bz, ux, uy, uz, rx, ry, rz);
      RVector dx, dy;
      Blocks dz;
      solve_once(rx, ry, rz, dx, dy, dz);
      ux += dx;
      uy += dy;
      uz = axpy(1.0, dz, uz);
    }
  }

 private:
  void residual(const RVector& bx, const RVector& by, const Blocks& bz, const RVector& ux, const RVector& uy,
                const Blocks& uz, RVector& rx, RVector& ry, Blocks& rz) const {
    RVector uzp = pack(uz, data_.dims);
    rx = bx - data_.G.transpose() * uzp;
    if (data_.A.rows() > 0) rx -= data_.A.transpose() * uy;
    ry = by - data_.A * ux;
    Blocks gx = unpack(data_.G * ux, data_.dims);
    Blocks wtwz = apply_w_t(*w_, apply_w(*w_, uz));
    rz.resize(bz.size());
    for (std::size_t j = 0; j < bz.size(); ++j) rz[j] = bz[j] - (gx[j] - wtwz[j]);
  }

  void solve_once(const RVector& bx, const RVector& by, const Blocks& bz, RVector& ux, RVector& uy,
                  Blocks& uz) const {
    RVector wbz = pack(apply_w_inv_t(*w_, bz), data_.dims);
    RVector rhs = bx + gs_.transpose() * wbz;
    const Eigen::Index p = data_.A.rows();
    RVector x0 = RVector::Zero(data_.G.cols());
    if (p > 0) x0 = q1_ * r_.transpose().triangularView<Eigen::Lower>().solve(by);
    RVector wred = null_.transpose() * (rhs - h_ * x0);
    if (wred.size() > 0) {
      if (use_qr_) {
        wred = rq_.transpose().triangularView<Eigen::Lower>().solve(wred);
        wred = rq_.triangularView<Eigen::Upper>().solve(wred);
      } else {
        wred = llt_.solve(wred);
      }
    }
    ux = x0 + null_ * wred;
    if (p > 0) {
      RVector t = rhs - h_ * ux;
      uy = r_.triangularView<Eigen::Upper>().solve(q1_.transpose() * t);
    } else {
      uy = RVector();
    }
    Blocks wuz = unpack(gs_ * ux - wbz, data_.dims);
    uz = apply_w_inv(*w_, wuz);
  }

  const ConeLpData& data_;
  const NtScaling* w_ = nullptr;
  RMatrix q1_, null_, r_;
  RMatrix gs_, h_, rq_;
  bool use_qr_ = false;
  Eigen::LLT<RMatrix> llt_;
};

}  // namespace conelp_detail

inline ConeLpSolution solve_conelp(const ConeLpData& d, const ConeLpOptions& opt = {}) {
  using namespace conelp_detail;
  const Eigen::Index n = d.G.cols(), p = d.A.rows();
  const auto& dims = d.dims;
  int degree = 0;
  for (int k : dims) degree += k;

  ConeLpSolution sol;
  const double resx0 = std::max(1.0, d.c.norm());
  const double resy0 = std::max(1.0, d.b.norm());
  const double resz0 = std::max(1.0, d.h.norm());
  const Blocks hb = unpack(d.h, dims);

  KktSolver kkt(d);
  NtScaling w;
  w.r = identity_blocks(dims);
  w.rti = identity_blocks(dims);
  w.lambda.clear();
  for (int k : dims) w.lambda.push_back(RVector::Ones(k));
  if (!kkt.factor(w)) {
    sol.detail = "initial KKT system is singular";
    return sol;
  }

  // Starting point: least-squares primal and minimum-norm dual, shifted
  // into the cone interior.
  RVector x, y, y_unused, x_unused;
  Blocks s, z;
  {
    Blocks uz;
    kkt.solve(RVector::Zero(n), d.b, hb, x, y_unused, uz);
    s.resize(uz.size());
    for (std::size_t j = 0; j < uz.size(); ++j) s[j] = -uz[j];
    Blocks zero_rhs(hb.size());
    for (std::size_t j = 0; j < hb.size(); ++j) zero_rhs[j] = RMatrix::Zero(dims[j], dims[j]);
    kkt.solve(-d.c, RVector::Zero(p), zero_rhs, x_unused, y, z);
    auto shift = [&](Blocks& v) {
      const double t = max_step_cone(v);
      double nrm = 0.0;
      for (const auto& b : v) nrm += b.squaredNorm();
      nrm = std::sqrt(nrm);
      if (t >= -1e-8 * std::max(nrm, 1.0))
        for (auto& b : v) b += (1.0 + t) * RMatrix::Identity(b.rows(), b.cols());
    };
    shift(s);
    shift(z);
  }
  double tau = 1.0, kappa = 1.0;

  if (!compute_scaling(s, z, w)) {
    sol.detail = "failed to compute initial scaling";
    return sol;
  }

  auto gx_of = [&](const RVector& v) { return unpack(d.G * v, dims); };
  auto gtz_of = [&](const Blocks& v) { return RVector(d.G.transpose() * pack(v, dims)); };
  auto at_of = [&](const RVector& v) { return p > 0 ? RVector(d.A.transpose() * v) : RVector(RVector::Zero(n)); };

  double best_merit = std::numeric_limits<double>::infinity();
  int best_iter = 0;
  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    sol.iterations = iter;
    // Residuals of the embedding.
    RVector hrx = -at_of(y) - gtz_of(z);
    RVector rx = hrx - d.c * tau;
    RVector hry = d.A * x;
    RVector ry = hry - d.b * tau;
    Blocks gxb = gx_of(x);
    Blocks hrz = axpy(1.0, s, gxb);
    Blocks rz = axpy(-tau, hb, hrz);
    const double cx = d.c.dot(x), by = d.b.dot(y), hz = dot(hb, z);
    const double rt = kappa + cx + by + hz;
    const double gap_raw = dot(s, z);
    const double mu = (gap_raw + tau * kappa) / (degree + 1);

    const double resx = rx.norm() / tau;
    const double resy = ry.norm() / tau;
    double rzn = 0.0;
    for (const auto& b : rz) rzn += b.squaredNorm();
    const double resz = std::sqrt(rzn) / tau;
    double hrzn = 0.0;
    for (const auto& b : hrz) hrzn += b.squaredNorm();
    hrzn = std::sqrt(hrzn);

    const double pcost = cx / tau, dcost = -(by + hz) / tau;
    const double gap = gap_raw / (tau * tau);
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0)
      relgap = gap / -pcost;
    else if (dcost > 0.0)
      relgap = gap / dcost;
    const double pres = std::max(resy / resy0, resz / resz0);
    const double dres = resx / resx0;
    const double pinfres = (hz + by < 0.0) ? hrx.norm() / resx0 / (-hz - by) : std::numeric_limits<double>::infinity();
    const double dinfres = (cx < 0.0) ? std::max(hry.norm() / resy0, hrzn / resz0) / (-cx)
                                      : std::numeric_limits<double>::infinity();
    sol.pres = pres;
    sol.dres = dres;
    sol.gap = gap;
    sol.relgap = relgap;
    sol.pinfres = pinfres;
    sol.dinfres = dinfres;
    if (opt.verbose)
      std::fprintf(stderr, "%3d  pcost % .8e  dcost % .8e  gap %.2e  pres %.2e  dres %.2e  k/t %.2e\n", iter, pcost,
                   dcost, gap, pres, dres, kappa / tau);

    if (pres <= opt.feastol && dres <= opt.feastol && (gap <= opt.abstol || relgap <= opt.reltol)) {
      sol.status = ConeLpStatus::Optimal;
      sol.x = x / tau;
      sol.y = y / tau;
      sol.s = pack(s, dims) / tau;
      sol.z = pack(z, dims) / tau;
      return sol;
    }
    if (pinfres <= opt.feastol) {
      sol.status = ConeLpStatus::PrimalInfeasible;
      const double scale = -hz - by;
      sol.y = y / scale;
      sol.z = pack(z, dims) / scale;
      sol.x = x / tau;
      sol.s = pack(s, dims) / tau;
      return sol;
    }
    if (dinfres <= opt.feastol) {
      sol.status = ConeLpStatus::DualInfeasible;
      const double scale = -cx;
      sol.x = x / scale;
      sol.s = pack(s, dims) / scale;
      sol.y = y / tau;
      sol.z = pack(z, dims) / tau;
      return sol;
    }
    // Progress towards any of the three stopping tests.
    const double merit = std::min({std::max({pres, dres, std::min(gap / opt.abstol, relgap / opt.reltol) * opt.feastol}),
                                   pinfres, dinfres});
    if (merit < best_merit) {
      best_merit = merit;
      best_iter = iter;
    } else if (iter - best_iter > 8) {
      sol.detail = "progress stalled";
      break;
    }
    if (iter == opt.max_iter) {
      sol.detail = "iteration limit reached";
      break;
    }

    if (!kkt.factor(w)) {
      sol.detail = "KKT factorization failed";
      break;
    }
    // Direction for the τ column: K d1 = [-c; b; h].
    RVector x1, y1;
    Blocks z1;
    kkt.solve(-d.c, d.b, hb, x1, y1, z1);
    const double denom_base = d.c.dot(x1) + d.b.dot(y1) + dot(hb, z1);

    const auto& lam = w.lambda;
    Blocks lam_sq;
    for (const auto& l : lam) lam_sq.push_back(l.cwiseAbs2().asDiagonal());
    Blocks eye = identity_blocks(dims);

    Blocks ds_aff, dz_aff;
    double dtau_aff = 0.0, dkappa_aff = 0.0;
    double sigma = 0.0;
    RVector dx, dy;
    Blocks ds_t, dz_t;
    double dtau = 0.0, dkappa = 0.0, step = 0.0;
    bool failed = false;

    for (int phase = 0; phase < 2; ++phase) {
      const double eta = phase == 0 ? 1.0 : 1.0 - sigma;
      const double sig = phase == 0 ? 0.0 : sigma;
      // r_c = -λ∘λ + σμ e - corrector
      Blocks rc(dims.size());
      for (std::size_t j = 0; j < dims.size(); ++j) rc[j] = -lam_sq[j] + sig * mu * eye[j];
      double corr_tau = 0.0;
      if (phase == 1) {
        Blocks corr = jordan(ds_aff, dz_aff);
        for (std::size_t j = 0; j < dims.size(); ++j) rc[j] -= corr[j];
        corr_tau = dtau_aff * dkappa_aff;
      }
      Blocks ldiv = lambda_divide(lam, rc);
      Blocks wt_ldiv = apply_w_t(w, ldiv);
      Blocks bz(dims.size());
      for (std::size_t j = 0; j < dims.size(); ++j) bz[j] = -eta * rz[j] - wt_ldiv[j];
      RVector x2, y2;
      Blocks z2;
      kkt.solve(eta * rx, -eta * ry, bz, x2, y2, z2);
      const double num = -eta * rt - (sig * mu - tau * kappa - corr_tau) / tau -
                         (d.c.dot(x2) + d.b.dot(y2) + dot(hb, z2));
      const double den = denom_base - kappa / tau;
      dtau = num / den;
      dx = x2 + dtau * x1;
      dy = (p > 0) ? RVector(y2 + dtau * y1) : RVector();
      Blocks dz = axpy(dtau, z1, z2);
      dz_t = apply_w(w, dz);
      ds_t.resize(dims.size());
      for (std::size_t j = 0; j < dims.size(); ++j) ds_t[j] = ldiv[j] - dz_t[j];
      dkappa = (sig * mu - tau * kappa - corr_tau - kappa * dtau) / tau;

      double amax = std::min(step_to_boundary(lam, ds_t), step_to_boundary(lam, dz_t));
      if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
      if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);
      if (!std::isfinite(dtau) || !dx.allFinite()) {
        failed = true;
        break;
      }
      if (phase == 0) {
        const double a = std::min(1.0, amax);
        sigma = std::pow(1.0 - a, 3);
        ds_aff = ds_t;
        dz_aff = dz_t;
        dtau_aff = dtau;
        dkappa_aff = dkappa;
      } else {
        step = std::min(1.0, 0.99 * amax);
      }
    }
    if (failed) {
      sol.detail = "non-finite search direction";
      break;
    }
    if (step < 1e-14) {
      sol.detail = "step length underflow";
      break;
    }

    x += step * dx;
    if (p > 0) y += step * dy;
    tau += step * dtau;
    kappa += step * dkappa;
    Blocks lamb = diag_blocks(lam);
    Blocks s_t = axpy(step, ds_t, lamb);
    Blocks z_t = axpy(step, dz_t, lamb);
    if (!update_scaling(w, s_t, z_t)) {
      sol.detail = "scaling update failed";
      break;
    }
    // Recover s = W^T λ, z = W^{-1} λ in the new scaling.
    Blocks lnew = diag_blocks(w.lambda);
    s = apply_w_t(w, lnew);
    z = apply_w_inv(w, lnew);
  }

  sol.status = ConeLpStatus::Unknown;
  sol.x = x / tau;
  sol.y = y / tau;
  sol.s = pack(s, dims) / tau;
  sol.z = pack(z, dims) / tau;
  return sol;
}

}  // namespace opsys::sdp
