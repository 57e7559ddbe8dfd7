#include "oracles.hpp"

#include "opsys/gram.hpp"
#include "opsys/sampling.hpp"

#include <gtest/gtest.h>

using namespace opsys;

namespace {

CMatrix diag2(double x, double y) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

}  // namespace

TEST(BuildAlgebra, Examples) {
  EXPECT_EQ(build_algebra({2}).total_dim(), 4);
  auto c2 = build_algebra({1, 1});
  EXPECT_TRUE(c2.is_commutative());
  EXPECT_EQ(c2.total_dim(), 2);
  auto m23 = build_algebra({2, 3});
  EXPECT_EQ(m23.total_dim(), 13);
  EXPECT_FALSE(m23.is_commutative());
  EXPECT_EQ(build_algebra({2, 3}).label(), m23.label());
}

TEST(BuildAlgebra, RejectsBadInput) {
  EXPECT_THROW(build_algebra({}), std::invalid_argument);
  EXPECT_THROW(build_algebra({2, 0}), std::invalid_argument);
}

TEST(IsPositiveAlg, Examples) {
  auto m2 = matrix_algebra(2);
  for (int k = 1; k <= 3; ++k) EXPECT_TRUE(is_positive_alg(AlgElement::unit(build_algebra({2, 1}), k)));
  EXPECT_FALSE(is_positive_alg(AlgElement(m2, 1, {diag2(1, -1)})));
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  EXPECT_THROW(is_positive_alg(AlgElement(m2, 1, {nh})), std::invalid_argument);
}

TEST(IsPositiveAlg, SquaresArePositive) {
  Rng rng(11);
  auto alg = build_algebra({2, 3});
  for (int t = 0; t < 100; ++t) {
    AlgElement x = random_element(alg, 1 + t % 2, rng);
    AlgElement p = x.adjoint() * x;
    double oracle_min = INFINITY;
    for (const auto& b : p.blocks) oracle_min = std::min(oracle_min, oracle::lmin(b));
    EXPECT_GE(oracle_min, -1e-12);
    EXPECT_TRUE(is_positive_alg(p, 1e-9));
  }
}

TEST(Embed, Examples) {
  auto m2 = matrix_algebra(2);
  auto A = build_algebra({2, 1});
  auto B = build_algebra({3, 1});
  AlgElement ul = embed_left(AlgElement::unit(A), B), ur = embed_right(A, AlgElement::unit(B));
  for (std::size_t i = 0; i < ul.blocks.size(); ++i) {
    EXPECT_LE((ul.blocks[i] - CMatrix::Identity(ul.blocks[i].rows(), ul.blocks[i].cols())).norm(), 1e-15);
    EXPECT_LE((ur.blocks[i] - CMatrix::Identity(ur.blocks[i].rows(), ur.blocks[i].cols())).norm(), 1e-15);
  }
  AlgElement e = embed_left(AlgElement(m2, 1, {diag2(1, 0)}), m2);
  CMatrix want = CMatrix::Zero(4, 4);
  want(0, 0) = want(1, 1) = 1.0;
  EXPECT_LE((e.blocks[0] - want).norm(), 1e-15);
}

TEST(Embed, CommutingDiagonalSpectrum) {
  Rng rng(3);
  std::normal_distribution<double> g;
  auto A = matrix_algebra(3), B = matrix_algebra(2);
  for (int t = 0; t < 20; ++t) {
    CMatrix a = CMatrix::Zero(3, 3), b = CMatrix::Zero(2, 2);
    std::vector<double> want;
    for (int p = 0; p < 3; ++p) a(p, p) = g(rng);
    for (int q = 0; q < 2; ++q) b(q, q) = g(rng);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 2; ++q) want.push_back(a(p, p).real() + b(q, q).real());
    std::sort(want.begin(), want.end());
    AlgElement s = embed_left(AlgElement(A, 1, {a}), B) + embed_right(A, AlgElement(B, 1, {b}));
    auto ev = hermitian_eigenvalues(s.blocks[0]);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(ev(i), want[i], 1e-12);
  }
}

TEST(Embed, UnitalMultiplicativeOnRandomPairs) {
  Rng rng(5);
  auto A = build_algebra({2, 1}), B = build_algebra({2, 3});
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + t % 2;
    AlgElement x = random_element(A, k, rng), y = random_element(A, k, rng);
    worst = std::max(worst, distance(embed_left(x * y, B), embed_left(x, B) * embed_left(y, B)));
    AlgElement u = random_element(B, k, rng), v = random_element(B, k, rng);
    worst = std::max(worst, distance(embed_right(A, u * v), embed_right(A, u) * embed_right(A, v)));
    // left and right images commute
    AlgElement l = embed_left(x, B), r = embed_right(A, u);
    if (k == 1) worst = std::max(worst, distance(l * r, r * l));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Embed, MatchesIndependentKronecker) {
  Rng rng(8);
  auto A = build_algebra({2, 1}), B = build_algebra({2, 3});
  for (int k = 1; k <= 2; ++k) {
    SumElement x(random_self_adjoint(A, k, rng), random_self_adjoint(B, k, rng));
    auto j = joint_element(x);
    auto o = oracle::joint_blocks(x);
    ASSERT_EQ(j.blocks.size(), o.size());
    for (std::size_t i = 0; i < o.size(); ++i) EXPECT_LE((j.blocks[i] - o[i]).norm(), 1e-13);
  }
}

TEST(GramIntertwiner, Examples) {
  std::vector<CVector> e = {CVector::Unit(2, 0), CVector::Unit(2, 1)};
  CMatrix u = gram_intertwiner(e, e);
  EXPECT_LE((u - CMatrix::Identity(2, 2)).norm(), 1e-12);
  std::vector<CVector> f = {CVector::Unit(2, 1), CVector::Unit(2, 0)};
  CMatrix p = gram_intertwiner(e, f);
  CMatrix swap = CMatrix::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  EXPECT_LE((p - swap).norm(), 1e-12);
}

TEST(GramIntertwiner, RecoversRandomUnitary) {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const int dim = 2 + t % 4, count = 1 + t % dim;
    CMatrix v = random_unitary(dim, rng);
    std::vector<CVector> xs, ys;
    for (int i = 0; i < count; ++i) {
      CMatrix g = random_ginibre(dim, 1, rng);
      xs.push_back(g.col(0));
      ys.push_back(v * xs.back());
    }
    CMatrix u = gram_intertwiner(xs, ys);
    EXPECT_LE((u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm(), 1e-10);
    for (int i = 0; i < count; ++i) EXPECT_LE((u * xs[i] - ys[i]).norm(), 1e-9 * (1 + xs[i].norm()));
  }
}

TEST(GramIntertwiner, Errors) {
  std::vector<CVector> e = {CVector::Unit(2, 0), CVector::Unit(2, 1)};
  std::vector<CVector> bad = {CVector::Unit(2, 0), 2.0 * CVector::Unit(2, 1)};
  EXPECT_THROW(gram_intertwiner(e, bad), GramMismatchError);
  std::vector<CVector> dep = {CVector::Unit(2, 0), CVector::Unit(2, 0)};
  EXPECT_THROW(gram_intertwiner(dep, dep), RankDeficientError);
}

TEST(Grading, Examples) {
  auto g = standard_grading_m2();
  auto m2 = matrix_algebra(2);
  AlgElement even(m2, 1, {diag2(3, -2)});
  EXPECT_LE(grading_project(even, g, Parity::Odd).norm(), 1e-15);
  CMatrix sx = CMatrix::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1.0;
  AlgElement odd(m2, 1, {sx});
  EXPECT_LE(distance(grading_project(odd, g, Parity::Odd), odd), 1e-15);
  EXPECT_TRUE(is_odd(odd, g));
  Grading bad(m2, {diag2(2, 1)});
  EXPECT_THROW(grading_project(odd, bad, Parity::Odd), std::invalid_argument);
}

TEST(Grading, ProjectionsReassembleAndMultiply) {
  Rng rng(4);
  auto g = standard_grading_m2();
  auto m2 = matrix_algebra(2);
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + t % 3;
    AlgElement x = random_element(m2, k, rng);
    AlgElement e = grading_project(x, g, Parity::Even), o = grading_project(x, g, Parity::Odd);
    // direct recomputation with u = diag(1,-1) on the algebra leg
    CMatrix u = oracle::okron(oracle::eye(k), diag2(1, -1));
    CMatrix direct_odd = 0.5 * (x.blocks[0] - u * x.blocks[0] * u);
    EXPECT_LE((o.blocks[0] - direct_odd).norm(), 1e-12);
    EXPECT_LE(distance(e + o, x), 1e-12);
    EXPECT_LE(distance(grading_project(o, g, Parity::Odd), o), 1e-12);
    AlgElement o2 = grading_project(random_element(m2, k, rng), g, Parity::Odd);
    EXPECT_LE(grading_project(o * o2, g, Parity::Odd).norm(), 1e-12);
    AlgElement h = random_self_adjoint(m2, k, rng);
    EXPECT_EQ(is_positive_alg(h), is_positive_alg(g.apply(h)));
    AlgElement p = random_positive(m2, k, rng);
    EXPECT_TRUE(is_positive_alg(g.apply(p), 1e-12));
  }
}
