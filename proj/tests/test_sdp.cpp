#include "instances.hpp"

#include <gtest/gtest.h>

using namespace opsys;
using sdp::SdpStatus;

TEST(Solve, LambdaMaxMatchesEigendecomposition) {
  Rng rng(101);
  for (int i = 0; i < 40; ++i) {
    auto inst = instances::lambda_max(rng, i);
    auto r = sdp::solve(inst.problem);
    ASSERT_EQ(r.status, SdpStatus::Optimal) << r.detail;
    EXPECT_NEAR(r.x(inst.t), oracle::lmax(inst.x), 1e-6);
  }
}

TEST(Solve, DensityFeasibility) {
  sdp::SdpProblem p;
  auto rho = p.add_psd_block(3);
  p.add_trace_equality(rho.expr(), CMatrix::Identity(3, 3), 1.0);
  auto r = sdp::check_feasible(p);
  ASSERT_EQ(r.status, SdpStatus::Feasible);
  CMatrix v = rho.value(r.x);
  EXPECT_NEAR(v.trace().real(), 1.0, 1e-8);
  EXPECT_GE(oracle::lmin(v), -1e-8);
}

TEST(Solve, NegativeTraceIsInfeasibleWithCertificate) {
  sdp::SdpProblem p;
  auto rho = p.add_psd_block(2);
  p.add_trace_equality(rho.expr(), CMatrix::Identity(2, 2), -1.0);
  auto r = sdp::check_feasible(p);
  ASSERT_EQ(r.status, SdpStatus::Infeasible);
  ASSERT_TRUE(r.certificate.has_value());
  auto rc = instances::recheck(p, *r.certificate);
  EXPECT_GT(rc.margin, 0.0);
  EXPECT_LE(rc.residual, 1e-7);
  EXPECT_GE(rc.min_dual_eigenvalue, -1e-12);
}

TEST(CheckFeasible, ForcedIdentity) {
  const int n = 3;
  sdp::SdpProblem p;
  auto x = p.add_psd_block(n);
  p.add_lmi(sdp::AffineMatrix(CMatrix::Identity(n, n)) - x.expr());
  p.add_trace_equality(x.expr(), CMatrix::Identity(n, n), n);
  auto r = sdp::check_feasible(p);
  ASSERT_EQ(r.status, SdpStatus::Feasible);
  EXPECT_LE((x.value(r.x) - CMatrix::Identity(n, n)).norm(), 1e-6);
}

TEST(CheckFeasible, OneDimensionalInteriorPoint) {
  // a − λ ⪰ 0, b + λ ⪰ 0 with a = 2, b = 0
  sdp::SdpProblem p;
  const int lam = p.add_scalar();
  sdp::AffineMatrix left(CMatrix::Constant(1, 1, 2.0)), right(CMatrix::Zero(1, 1));
  left.terms.emplace_back(lam, -CMatrix::Identity(1, 1));
  right.terms.emplace_back(lam, CMatrix::Identity(1, 1));
  p.add_lmi(left);
  p.add_lmi(right);
  auto r = sdp::check_feasible(p);
  ASSERT_EQ(r.status, SdpStatus::Feasible);
  EXPECT_GT(r.x(lam), 0.0);
  EXPECT_LT(r.x(lam), 2.0);
  EXPECT_NEAR(*r.feasibility_margin, 1.0, 1e-6);
}

TEST(CheckFeasible, RealEmbeddingGivesSameStatus) {
  Rng rng(202);
  int decided = 0;
  for (int i = 0; i < 100; ++i) {
    auto p = instances::feasibility(rng, i);
    auto rc = sdp::check_feasible(p);
    auto rr = sdp::check_feasible(instances::real_embedded(p));
    EXPECT_EQ(rc.status, rr.status) << "instance " << i << ": " << rc.detail << " / " << rr.detail;
    decided += rc.status != SdpStatus::Unknown;
  }
  EXPECT_GE(decided, 95);
}

TEST(CheckFeasible, KindsAreDecidedAsConstructed) {
  Rng rng(303);
  for (int i = 0; i < 60; ++i) {
    auto p = instances::feasibility(rng, i);
    auto r = sdp::check_feasible(p);
    if (i % 3 == 0) EXPECT_EQ(r.status, SdpStatus::Feasible) << i;
    if (i % 3 == 1) EXPECT_EQ(r.status, SdpStatus::Infeasible) << i;
  }
}

TEST(CheckFeasible, NoFlipsUnderTightening) {
  Rng rng(404);
  for (int i = 0; i < 60; ++i) {
    auto p = instances::feasibility(rng, i, i % 4 != 0);
    sdp::SolverOptions loose, tight;
    tight.tol_primal = loose.tol_primal / 10;
    tight.tol_gap = loose.tol_gap / 10;
    tight.tol_psd = loose.tol_psd / 10;
    auto a = sdp::check_feasible(p, loose).status, b = sdp::check_feasible(p, tight).status;
    const bool flip = (a == SdpStatus::Feasible && b == SdpStatus::Infeasible) ||
                      (a == SdpStatus::Infeasible && b == SdpStatus::Feasible);
    EXPECT_FALSE(flip) << i;
  }
}

TEST(CheckFeasible, CertificatesReverify) {
  Rng rng(505);
  int certs = 0;
  for (int i = 0; i < 60; ++i) {
    auto p = instances::feasibility(rng, i);
    auto r = sdp::check_feasible(p);
    if (r.status != SdpStatus::Infeasible) continue;
    ++certs;
    ASSERT_TRUE(r.certificate.has_value());
    auto rc = instances::recheck(p, *r.certificate);
    EXPECT_GE(rc.margin, r.certificate->margin - 1e-9);
    EXPECT_GE(rc.min_dual_eigenvalue, -1e-12);
    EXPECT_LE(rc.residual, std::max(1e-7, 1e-2 * rc.margin));
    auto copy = *r.certificate;
    EXPECT_TRUE(sdp::verify_certificate(p, copy));
  }
  EXPECT_GE(certs, 20);
}

TEST(CheckFeasible, InconsistentEqualities) {
  sdp::SdpProblem p;
  auto x = p.add_psd_block(2);
  p.add_trace_equality(x.expr(), CMatrix::Identity(2, 2), 1.0);
  p.add_trace_equality(x.expr(), 2.0 * CMatrix::Identity(2, 2), 3.0);
  auto r = sdp::check_feasible(p);
  ASSERT_EQ(r.status, SdpStatus::Infeasible);
  auto rc = instances::recheck(p, *r.certificate);
  EXPECT_GT(rc.margin, 0.0);
  EXPECT_LE(rc.residual, 1e-9);
}

TEST(Solve, Deterministic) {
  Rng r1(7), r2(7);
  auto p = instances::feasibility(r1, 4), q = instances::feasibility(r2, 4);
  auto a = sdp::check_feasible(p), b = sdp::check_feasible(q);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.x, b.x);
}

TEST(Solve, MaxIterExhaustionIsUnknown) {
  Rng rng(9);
  auto inst = instances::lambda_max(rng, 7);
  sdp::SolverOptions o;
  o.max_iter = 2;
  EXPECT_EQ(sdp::solve(inst.problem, o).status, SdpStatus::Unknown);
}
