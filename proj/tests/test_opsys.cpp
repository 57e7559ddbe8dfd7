#include "oracles.hpp"

#include "opsys/opsys.hpp"

#include <gtest/gtest.h>

using namespace opsys;

namespace {

const FdAlgebra M2 = matrix_algebra(2);

CMatrix diag(std::initializer_list<double> v) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

AlgElement scalar_el(const FdAlgebra& alg, double s, int k = 1) {
  return AlgElement::scalar(alg, s * CMatrix::Identity(k, k));
}

SumElement random_sa(const FdAlgebra& A, const FdAlgebra& B, int k, Rng& rng) {
  return SumElement(random_self_adjoint(A, k, rng), random_self_adjoint(B, k, rng));
}

/// (P_a + λ⊗1, P_b − λ⊗1) with random positive P and Hermitian λ.
SumElement random_coproduct_positive(const FdAlgebra& A, const FdAlgebra& B, int k, Rng& rng) {
  SumElement x(random_positive(A, k, rng), random_positive(B, k, rng));
  return gauge_shift(x, random_hermitian(k, rng));
}

/// ((γ⊗1)* a (γ⊗1), (γ⊗1)* b (γ⊗1)) for γ ∈ M_{k×l}.
SumElement compress(const SumElement& x, const CMatrix& gamma) {
  auto side = [&](const AlgElement& a) {
    std::vector<CMatrix> bl;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
      CMatrix g = oracle::okron(gamma, oracle::eye(a.algebra.block_size(static_cast<int>(i))));
      bl.push_back(g.adjoint() * a.blocks[i] * g);
    }
    return AlgElement(a.algebra, static_cast<int>(gamma.cols()), std::move(bl));
  };
  return SumElement(side(x.a), side(x.b));
}

}  // namespace

TEST(GaugeShift, Examples) {
  Rng rng(1);
  SumElement x = random_sa(M2, M2, 2, rng);
  SumElement y = gauge_shift(x, CMatrix::Zero(2, 2));
  EXPECT_EQ(distance(x.a, y.a) + distance(x.b, y.b), 0.0);
  SumElement u(scalar_el(M2, 1.0), scalar_el(M2, 0.0));
  SumElement s = gauge_shift(u, CMatrix::Identity(1, 1));
  EXPECT_LE(distance(s.a, scalar_el(M2, 2.0)), 1e-15);
  EXPECT_LE(distance(s.b, scalar_el(M2, -1.0)), 1e-15);
  EXPECT_EQ(is_positive_coproduct(u).verdict, Verdict::Yes);
  EXPECT_EQ(is_positive_coproduct(s).verdict, Verdict::Yes);
}

TEST(GaugeShift, NormMinInvariant) {
  Rng rng(2);
  auto A = build_algebra({2, 1});
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + t % 2;
    SumElement x(random_element(A, k, rng), random_element(M2, k, rng));
    CMatrix mu = random_ginibre(k, k, rng);
    SumElement y(x.a + AlgElement::scalar(A, mu), x.b - AlgElement::scalar(M2, mu));
    EXPECT_NEAR(oracle::joint_norm(x), oracle::joint_norm(y), 1e-10);
    EXPECT_NEAR(norm_min(x), oracle::joint_norm(x), 1e-10);
  }
}

TEST(IsPositiveMin, Examples) {
  Rng rng(3);
  SumElement p(random_positive(M2, 2, rng), random_positive(build_algebra({2, 1}), 2, rng));
  EXPECT_TRUE(is_positive_min(p));
  SumElement d(AlgElement(M2, 1, {diag({1, -1})}), AlgElement(M2, 1, {diag({1, -1})}));
  auto ev = oracle::eigs(oracle::joint_blocks(d)[0]);
  EXPECT_NEAR(ev(0), -2.0, 1e-14);
  EXPECT_NEAR(ev(3), 2.0, 1e-14);
  EXPECT_FALSE(is_positive_min(d));
  SumElement nh(random_element(M2, 1, rng), random_positive(M2, 1, rng));
  EXPECT_THROW(is_positive_min(nh), std::invalid_argument);
}

TEST(IsPositiveMin, NonnegativeOnJointStates) {
  Rng rng(4);
  auto A = build_algebra({2, 1});
  int positives = 0;
  while (positives < 20) {
    SumElement x = random_sa(A, M2, 1, rng);
    x.a += scalar_el(A, 0.9);  // bias towards the cone
    if (!is_positive_min(x)) continue;
    ++positives;
    AlgElement j = joint_element(x);
    for (int s = 0; s < 25; ++s) {
      State g = random_state(TensorAlgebra(A, M2), rng);
      EXPECT_GE(g.expect(j), -1e-7);
    }
  }
}

TEST(IsPositiveCoproduct, PositiveComponents) {
  Rng rng(5);
  for (int k = 1; k <= 3; ++k) {
    SumElement x(random_positive(M2, k, rng), random_positive(build_algebra({2, 1}), k, rng));
    auto r = is_positive_coproduct(x);
    ASSERT_EQ(r.verdict, Verdict::Yes);
    ASSERT_TRUE(r.lambda.has_value());
    // the returned λ certifies membership
    EXPECT_GE((x.a - AlgElement::scalar(M2, *r.lambda)).min_eigenvalue(), -1e-8);
    EXPECT_GE((x.b + AlgElement::scalar(x.b.algebra, *r.lambda)).min_eigenvalue(), -1e-8);
  }
}

TEST(IsPositiveCoproduct, AgreesWithGridScanAtLevelOne) {
  Rng rng(6);
  int compared = 0;
  for (int t = 0; t < 100; ++t) {
    SumElement x = random_sa(M2, M2, 1, rng);
    x.a += scalar_el(M2, 0.5);
    const double scan = oracle::grid_scan_margin(x);
    auto r = is_positive_coproduct(x);
    ASSERT_NE(r.verdict, Verdict::Unknown);
    if (std::abs(scan) < 1e-3) continue;  // within one grid step of the boundary
    ++compared;
    EXPECT_EQ(r.verdict == Verdict::Yes, scan > 0) << "scan margin " << scan;
  }
  EXPECT_GE(compared, 90);
}

TEST(IsPositiveCoproduct, ImpliesMinPositivity) {
  Rng rng(7);
  auto A = build_algebra({2, 1});
  for (int t = 0; t < 60; ++t) {
    const int k = 1 + t % 2;
    SumElement x = random_sa(A, M2, k, rng);
    x.a += scalar_el(A, 0.8, k);
    auto r = is_positive_coproduct(x);
    if (r.verdict == Verdict::Yes) EXPECT_GE(oracle::joint_min_eig(x), -1e-8);
  }
}

TEST(IsPositiveCoproduct, CompressionStability) {
  Rng rng(8);
  auto B = build_algebra({2, 1});
  for (int t = 0; t < 20; ++t) {
    SumElement x = random_coproduct_positive(M2, B, 2, rng);
    ASSERT_EQ(is_positive_coproduct(x).verdict, Verdict::Yes);
    SumElement y = compress(x, random_ginibre(2, 3, rng));
    EXPECT_EQ(is_positive_coproduct(y).verdict, Verdict::Yes);
  }
}

TEST(IsPositiveCoproduct, SampledRepresentationCondition) {
  // Necessary condition: for unital representations π of A and ρ of B on a
  // common space, (id⊗π)(a) + (id⊗ρ)(b) ⪰ 0.
  Rng rng(9);
  auto B = build_algebra({2, 1});
  const int k = 2;
  for (int t = 0; t < 20; ++t) {
    SumElement x = random_coproduct_positive(M2, B, k, rng);
    CMatrix u = oracle::okron(oracle::eye(k), random_unitary(4, rng));
    CMatrix v = oracle::okron(oracle::eye(k), random_unitary(4, rng));
    // π(a) = a ⊗ 1_2 on C^4; ρ(b) = b_0 ⊕ b_1 ⊕ b_1 on C^4
    CMatrix pa = oracle::okron(x.a.blocks[0], oracle::eye(2));
    CMatrix rb = CMatrix::Zero(4 * k, 4 * k);
    for (int c = 0; c < k; ++c)
      for (int d = 0; d < k; ++d) {
        rb.block(4 * c, 4 * d, 2, 2) = x.b.blocks[0].block(2 * c, 2 * d, 2, 2);
        rb(4 * c + 2, 4 * d + 2) = x.b.blocks[1](c, d);
        rb(4 * c + 3, 4 * d + 3) = x.b.blocks[1](c, d);
      }
    EXPECT_GE(oracle::lmin(u * pa * u.adjoint() + v * rb * v.adjoint()), -1e-9);
  }
}

TEST(CompatibleWitness, NegativeUnit) {
  SumElement x(scalar_el(M2, -1.0), scalar_el(M2, 0.0));
  auto w = compatible_witness(x);
  EXPECT_NEAR(w.value, -1.0, 1e-6);
  EXPECT_NEAR(oracle::pair_value(w.pair, x), -1.0, 1e-6);
  EXPECT_LE(w.pair.marginal_gap, 1e-8);
}

TEST(CompatibleWitness, PositiveElementIsPreconditionError) {
  SumElement x(scalar_el(M2, 1.0), scalar_el(M2, 0.0));
  EXPECT_THROW(compatible_witness(x), PreconditionError);
}

TEST(CompatibleWitness, RandomNegativeElements) {
  Rng rng(10);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const int k = 1 + t % 2;
    SumElement x = random_sa(M2, build_algebra({2, 1}), k, rng);
    auto r = is_positive_coproduct(x);
    if (r.verdict != Verdict::No) continue;
    ++checked;
    auto w = compatible_witness(x);
    EXPECT_LT(w.value, 0.0);
    EXPECT_NEAR(oracle::pair_value(w.pair, x), w.value, 1e-12);
    const CMatrix ca = oracle::corner(w.pair.alpha.blocks, k), cb = oracle::corner(w.pair.beta.blocks, k);
    EXPECT_LE(oracle::trnorm(ca - cb), 1e-8);
    EXPECT_TRUE(w.pair.alpha.is_valid() && w.pair.beta.is_valid());
  }
  EXPECT_GT(checked, 5);
}

TEST(TensorCompatible, Examples) {
  Rng rng(11);
  auto k = matrix_algebra(2);
  State ta = normalized_trace(k);
  CompatiblePair prod = make_pair(product_state(ta, random_state(M2, rng)), product_state(ta, random_state(M2, rng)));
  auto r = is_tensor_compatible(prod);
  ASSERT_EQ(r.verdict, Verdict::Yes);
  EXPECT_TRUE(r.joint->is_valid(1e-7));
  // level one: always the product
  auto one = matrix_algebra(1);
  State t1 = normalized_trace(one);
  CompatiblePair p1 = make_pair(product_state(t1, random_state(M2, rng)), product_state(t1, random_state(M2, rng)));
  EXPECT_EQ(is_tensor_compatible(p1).verdict, Verdict::Yes);
}

TEST(TensorCompatible, JointStateHasMarginals) {
  Rng rng(12);
  for (int t = 0; t < 5; ++t) {
    // marginals of a random joint state are always compatible
    State g = random_state(TensorAlgebra({matrix_algebra(2), M2, M2}), rng);
    CompatiblePair p = make_pair(reduce(g, {0, 1}), reduce(g, {0, 2}));
    auto r = is_tensor_compatible(p);
    ASSERT_EQ(r.verdict, Verdict::Yes) << r.detail;
    EXPECT_LE(reduce(*r.joint, {0, 1}).distance_l1(p.alpha), 1e-6);
    EXPECT_LE(reduce(*r.joint, {0, 2}).distance_l1(p.beta), 1e-6);
  }
}

TEST(MonogamyWitness, MatrixAlgebras) {
  auto w = monogamy_witness(M2, M2);
  EXPECT_LE(w.pair.marginal_gap, 1e-10);
  EXPECT_EQ(w.marginal.verdict, Verdict::No);
  ASSERT_TRUE(w.marginal.certificate.has_value());
  EXPECT_GE(oracle::certificate_violation(w.pair, w.marginal.certificate->observable), 1e-3);
  // same verdict at doubled precision
  sdp::SolverOptions tight;
  tight.tol_primal = 1e-10;
  tight.tol_gap = 1e-10;
  tight.tol_psd = 1e-10;
  auto again = is_tensor_compatible(w.pair, 1e-10, tight);
  EXPECT_EQ(again.verdict, Verdict::No);
  ASSERT_TRUE(again.certificate.has_value());
  EXPECT_GE(oracle::certificate_violation(w.pair, again.certificate->observable), 1e-3);
}

TEST(MonogamyWitness, MixedAlgebra) {
  auto w = monogamy_witness(build_algebra({2, 1}), M2);
  EXPECT_LE(w.pair.marginal_gap, 1e-10);
  EXPECT_EQ(w.marginal.verdict, Verdict::No);
  EXPECT_GE(oracle::certificate_violation(w.pair, w.marginal.certificate->observable), 1e-3);
  EXPECT_LE(oracle::pair_value(w.pair, w.separating.element), -1e-3);
}

TEST(MonogamyWitness, CommutativeIsRejected) {
  EXPECT_THROW(monogamy_witness(build_algebra({1, 1}), M2), NoncommutativityRequiredError);
}

TEST(SeparatingElement, OnMonogamyPair) {
  auto w = monogamy_witness(M2, M2);
  const SumElement& x = w.separating.element;
  EXPECT_LE(oracle::pair_value(w.pair, x), -1e-3);
  EXPECT_GE(oracle::joint_min_eig(x), 0.0);
  EXPECT_TRUE(is_positive_min(x));
  sdp::SolverOptions tight;
  tight.tol_primal = 1e-10;
  tight.tol_gap = 1e-10;
  tight.tol_psd = 1e-10;
  auto r = is_positive_coproduct(x, 1e-10, tight);
  EXPECT_EQ(r.verdict, Verdict::No);
  EXPECT_GE(-r.margin, 1e-4);
  ASSERT_TRUE(r.solver.certificate.has_value());
  EXPECT_GE(r.solver.certificate->margin, 1e-4);
  auto cw = compatible_witness(x);
  EXPECT_LE(oracle::pair_value(cw.pair, x), -1e-3);
  EXPECT_EQ(is_tensor_compatible(cw.pair).verdict, Verdict::No);
}

TEST(NormMin, Examples) {
  SumElement u(scalar_el(M2, 1.0), scalar_el(M2, 0.0));
  EXPECT_NEAR(norm_min(u), 1.0, 1e-15);
  Rng rng(13);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    CMatrix a = diag({g(rng), g(rng), g(rng)}), b = diag({g(rng), g(rng)});
    double want = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 2; ++q) want = std::max(want, std::abs(a(p, p).real() + b(q, q).real()));
    SumElement x(AlgElement(matrix_algebra(3), 1, {a}), AlgElement(M2, 1, {b}));
    EXPECT_NEAR(norm_min(x), want, 1e-12);
  }
  for (int t = 0; t < 100; ++t) {
    SumElement x(random_element(M2, 2, rng), random_element(build_algebra({2, 1}), 2, rng));
    EXPECT_NEAR(norm_min(x), norm_min(x.adjoint()), 1e-12);
  }
}

TEST(NormCoproduct, SingleAlgebraIsIsometric) {
  Rng rng(14);
  for (int t = 0; t < 10; ++t) {
    const int k = 1 + t % 2;
    AlgElement a = random_element(build_algebra({2, 1}), k, rng);
    SumElement x(a, AlgElement::zero(M2, k));
    double na = 0.0;
    for (const auto& blk : a.blocks) na = std::max(na, oracle::opnorm(blk));
    EXPECT_NEAR(norm_coproduct(x), na, 1e-7);
  }
}

TEST(NormCoproduct, MatchesBisectionAtLevelOne) {
  Rng rng(15);
  for (int t = 0; t < 5; ++t) {
    SumElement x = random_sa(M2, M2, 1, rng);
    const double hi = oracle::joint_norm(x) * 2 + 1;
    const double bis = std::max(oracle::archimedean_bound(x, -hi, hi, 1e-7), oracle::archimedean_bound(-x, -hi, hi, 1e-7));
    EXPECT_NEAR(norm_coproduct(x), bis, 1e-6);
  }
}

TEST(NormCoproduct, SandwichWithOddComponent) {
  Rng rng(16);
  auto g = standard_grading_m2();
  for (int t = 0; t < 20; ++t) {
    const int k = 1 + t % 2;
    SumElement x(grading_project(random_element(M2, k, rng), g, Parity::Odd), random_element(M2, k, rng));
    const double nm = norm_min(x), nc = norm_coproduct(x);
    EXPECT_LE(nm, nc + 1e-7);
    EXPECT_LE(nc, 2 * nm + 1e-6);
  }
}

TEST(SymmetryCheck, Examples) {
  Rng rng(17);
  auto g = standard_grading_m2();
  CMatrix off = CMatrix::Zero(2, 2);
  off(0, 1) = off(1, 0) = 1.0;
  SumElement x(AlgElement(M2, 1, {off}), random_element(M2, 1, rng));
  EXPECT_TRUE(symmetry_check(x, g, [](const SumElement& y) { return norm_min(y); }));
  EXPECT_TRUE(symmetry_check(x, g, [](const SumElement& y) { return norm_coproduct(y); }));
  SumElement z(AlgElement::zero(M2, 1), random_element(M2, 1, rng));
  EXPECT_TRUE(symmetry_check(z, g, [](const SumElement& y) { return norm_coproduct(y); }));
  SumElement bad(AlgElement(M2, 1, {diag({1, 2})}), random_element(M2, 1, rng));
  EXPECT_THROW(symmetry_check(bad, g, [](const SumElement& y) { return norm_min(y); }), std::invalid_argument);
}
