#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace symop;
using namespace testing_util;

TEST(Mu, TwoAtomRearrangement) {
  auto a = alg_of({{1, 1.0}, {1, 2.0}});
  const Element x = Element::central(a, std::vector<cplx>{1.0, 2.0});
  const auto f = mu(x);
  const auto& st = f.steps();
  ASSERT_EQ(st.size(), 2u);
  EXPECT_DOUBLE_EQ(st[0].value, 2.0);
  EXPECT_DOUBLE_EQ(st[0].length, 2.0);
  EXPECT_DOUBLE_EQ(st[1].value, 1.0);
  EXPECT_DOUBLE_EQ(st[1].length, 1.0);
}

TEST(Mu, ProjectionIsIndicator) {
  auto a = alg_of({{3, 0.5}, {2, 2.0}});
  Element p = Element::zero(a);
  p.block(0)(0, 0) = 1.0;
  p.block(0)(2, 2) = 1.0;
  p.block(1)(1, 1) = 1.0;
  const auto f = mu(p);
  ASSERT_EQ(f.steps().size(), 1u);
  EXPECT_NEAR(f.steps()[0].value, 1.0, 1e-15);
  EXPECT_NEAR(f.steps()[0].length, 3.0, 1e-15);
  EXPECT_NEAR(f.support(), trace(p).real(), 1e-15);
}

TEST(Mu, IntegralIsWeightedTraceNorm) {
  auto a = alg_of({{3, 0.7}, {2, 1.9}, {1, 3.0}});
  Rng rng = make_rng(10);
  for (int s = 0; s < 50; ++s) {
    const Element x = random_element(a, rng);
    double oracle = 0.0;
    for (auto [sv, w] : weighted_singular_values(x)) oracle += w * sv;
    EXPECT_NEAR(mu(x).integral(), oracle, 1e-12 * oracle);
  }
}

TEST(Mu, ZeroElementHasEmptyFunction) {
  auto a = alg_of({{2, 1.0}});
  EXPECT_TRUE(mu(Element::zero(a)).empty());
  EXPECT_EQ(mu(Element::zero(a))(0.5), 0.0);
}

TEST(Mu, UnitaryInvariance) {
  auto a = alg_of({{3, 1.0}, {2, 0.5}});
  Rng rng = make_rng(11);
  for (int s = 0; s < 50; ++s) {
    const Element x = random_element(a, rng);
    const Element u = random_unitary(a, rng), v = random_unitary(a, rng);
    EXPECT_TRUE(mu(u * x * v).approx_equal(mu(x), 1e-12));
    EXPECT_TRUE(mu(x.adjoint()).approx_equal(mu(x), 1e-12));
  }
}

TEST(Mu, RepeatedValuesMergeCanonically) {
  auto a = alg_of({{2, 1.0}, {1, 1.0}});
  Element x = Element::identity(a);
  const auto f = mu(x);
  ASSERT_EQ(f.steps().size(), 1u);
  EXPECT_NEAR(f.steps()[0].length, 3.0, 1e-15);
}

TEST(StepFunctionType, EvaluationAndIntegral) {
  const auto f = StepFunction::rearrange({{1.0, 1.0}, {3.0, 0.5}});
  EXPECT_DOUBLE_EQ(f(0.0), 3.0);
  EXPECT_DOUBLE_EQ(f(0.49), 3.0);
  EXPECT_DOUBLE_EQ(f(0.5), 1.0);  // right-continuous
  EXPECT_DOUBLE_EQ(f(1.5), 0.0);
  EXPECT_DOUBLE_EQ(f.integral(1.0), 2.0);
  EXPECT_DOUBLE_EQ(f.integral(), 2.5);
  EXPECT_DOUBLE_EQ(f.distribution(1.0), 0.5);
  EXPECT_THROW(StepFunction::rearrange({{1.0, 0.0}}), DomainError);
}

TEST(Distribution, DiagonalExample) {
  auto a = alg_of({{2, 1.0}});
  Element x = Element::zero(a);
  x.block(0)(0, 0) = 3.0;
  x.block(0)(1, 1) = 1.0;
  EXPECT_DOUBLE_EQ(distribution(x, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(distribution(x, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(distribution(x, 10.0), 0.0);
}

TEST(Distribution, RejectsNonSelfAdjoint) {
  auto a = alg_of({{2, 1.0}});
  Element x = Element::zero(a);
  x.block(0)(1, 0) = 1.0;
  EXPECT_THROW(distribution(x, 0.0), DomainError);
}

TEST(Distribution, InversionIdentityAgainstMu) {
  // mu(t; x) = inf { s >= 0 : d_{|x|}(s) <= t }.
  auto a = alg_of({{3, 1.0}, {2, 0.5}, {1, 2.0}});
  Rng rng = make_rng(12);
  std::uniform_real_distribution<double> td(0.0, a->total_trace());
  for (int s = 0; s < 500; ++s) {
    const Element x = random_element(a, rng);
    const Element ax = polar_decompose(x).m;
    const double t = td(rng);
    const auto f = mu(x);
    // The infimum is attained at one of the singular values or at zero;
    // probe just above each candidate to stay clear of rounding in |x|.
    double inf = kInf;
    std::vector<double> cands{0.0};
    for (auto [sv, w] : weighted_singular_values(x)) cands.push_back(sv);
    for (double c : cands)
      if (distribution(ax, c + 1e-9, 1e-8) <= t) inf = std::min(inf, c);
    EXPECT_NEAR(f(t), inf, 1e-8);
  }
}

TEST(Submajorization, Basics) {
  auto a = alg_of({{3, 1.0}, {1, 2.0}});
  Rng rng = make_rng(13);
  const Element x = random_element(a, rng);
  EXPECT_TRUE(submajorizes(x, x));
  EXPECT_TRUE(submajorizes(x, x * cplx(0.5)));
  EXPECT_FALSE(submajorizes(x * cplx(0.5), x));
}

TEST(Submajorization, AveragedProfileIsSubmajorized) {
  // The constant (int_0^{tau(p)} mu(z)) / tau(p) on (0, tau(p)) is
  // submajorized by mu(z).
  auto a = alg_of({{3, 1.0}, {2, 0.5}});
  Rng rng = make_rng(14);
  for (int s = 0; s < 50; ++s) {
    const Element z = random_element(a, rng);
    const auto f = mu(z);
    for (double tp : {0.5, 1.0, 2.0, 4.0}) {
      const auto avg = StepFunction::rearrange({{f.integral(tp) / tp, tp}});
      EXPECT_TRUE(submajorized(avg, f));
    }
  }
}

TEST(Submajorization, TriangleInequality) {
  auto a = alg_of({{3, 1.0}, {2, 2.0}});
  Rng rng = make_rng(15);
  for (int s = 0; s < 100; ++s) {
    const Element x = random_element(a, rng), y = random_element(a, rng);
    EXPECT_TRUE(submajorized(mu(x + y), add(mu(x), mu(y)), 1e-12));
  }
}

TEST(Submajorization, HardyLittlewood) {
  auto a = alg_of({{3, 1.0}, {2, 0.4}});
  Rng rng = make_rng(16);
  for (int s = 0; s < 100; ++s) {
    const Element x = random_element(a, rng), y = random_element(a, rng);
    EXPECT_LE(std::abs(trace(x * y)), integral_product(mu(x), mu(y)) * (1 + 1e-12));
  }
}
