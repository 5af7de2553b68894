#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace symop;
using namespace testing_util;

namespace {

SamplingOptions opts(std::uint64_t seed = 99, int samples = 48) { return {seed, samples}; }

/// Non-central self-adjoint element with ||a||_inf = 1.
Element unit_self_adjoint(const AlgebraPtr& a, Rng& rng) {
  Element h = random_self_adjoint(a, rng);
  return h * cplx(1.0 / h.norm_inf());
}

/// ||(x - y) - central part||_inf, zero iff x - y is central.
double non_central_gap(const Element& x, const Element& y) {
  const Element d = x - y;
  return (d - d.scalar_part()).norm_inf();
}

}  // namespace

TEST(ExpDefect, ZeroOperator) {
  auto a = alg_of({{2, 1.0}});
  EXPECT_LT(exp_isometry_defect(SuperOperator::zero(a), SymmetricNorm::lp(3.0), opts()), 1e-15);
}

TEST(ExpDefect, StructuredIsSmall) {
  auto a = alg_of({{3, 1.0}});
  Rng rng = make_rng(60);
  const auto t = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng));
  EXPECT_LT(exp_isometry_defect(t, SymmetricNorm::lp(3.0), opts()), 1e-9);
}

TEST(ExpDefect, SkewLeftMultiplicationIsLarge) {
  auto a = alg_of({{3, 1.0}});
  Rng rng = make_rng(61);
  const Element h = unit_self_adjoint(a, rng);
  const auto t = SuperOperator::left(h * cplx(0.0, 1.0));
  EXPECT_GT(exp_isometry_defect(t, SymmetricNorm::lp(3.0), opts()), 1e-2);
}

TEST(NumericalRange, IdentityTimesI) {
  auto a = alg_of({{2, 1.0}, {1, 1.0}});
  const auto t = cplx(0.0, 1.0) * SuperOperator::identity(a);
  EXPECT_GE(max_imag_numerical_range(t, SymmetricNorm::lp(3.0), opts()), 1.0 - 1e-8);
}

TEST(NumericalRange, StructuredIsReal) {
  auto a = alg_of({{2, 1.0}, {2, 1.0}});
  Rng rng = make_rng(62);
  const auto t = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng));
  for (const auto& n : {SymmetricNorm::lp(3.0), SymmetricNorm::lp(1.0), SymmetricNorm::lorentz(0.5)})
    EXPECT_LT(max_imag_numerical_range(t, n, opts()), 1e-8) << n.describe();
}

TEST(NumericalRange, ExamHermitianOnCustomNorm) {
  EXPECT_LT(max_imag_numerical_range(exam_hermitian(), SymmetricNorm::custom_two_atom(3.0), opts()), 1e-8);
}

TEST(Decompose, LeftMultiplicationUpToGauge) {
  auto a = alg_of({{3, 1.0}, {2, 1.0}});
  Rng rng = make_rng(63);
  const Element h = random_self_adjoint(a, rng);
  const auto d = decompose_hermitian(SuperOperator::left(h));
  EXPECT_LT(d.residual, 1e-12);
  EXPECT_LT(non_central_gap(d.a, h), 1e-12);
  EXPECT_LT(d.b.norm_inf(), 1e-12);  // traceless central part is zero
}

TEST(Decompose, GaugeFixesBlockTraceOfB) {
  auto a = alg_of({{3, 1.0}, {1, 2.0}, {2, 0.5}});
  Rng rng = make_rng(64);
  for (int s = 0; s < 10; ++s) {
    const Element l = random_self_adjoint(a, rng), r = random_self_adjoint(a, rng);
    const auto d = decompose_hermitian(SuperOperator::structured(l, r));
    EXPECT_LT(d.residual, 1e-11);
    for (int i = 0; i < a->num_blocks(); ++i) EXPECT_LT(std::abs(d.b.block(i).trace()), 1e-12);
    // a - a_true is central and equals -(b - b_true).
    const Element da = d.a - l, db = d.b - r;
    EXPECT_TRUE(da.is_central(1e-10));
    EXPECT_LT((da + db).norm_inf(), 1e-10);
    EXPECT_LT(op_distance(SuperOperator::structured(d.a, d.b), SuperOperator::structured(l, r)), 1e-11);
  }
}

TEST(Decompose, TransposeOnM2HasLargeResidual) {
  const auto d = decompose_hermitian(SuperOperator::transpose_map(alg_of({{2, 1.0}})));
  EXPECT_GT(d.residual, 0.5);
}

TEST(Certify, StructuredOnL1) {
  auto a = alg_of({{2, 1.0}, {2, 1.0}});
  Rng rng = make_rng(65);
  const Element l = random_self_adjoint(a, rng), r = random_self_adjoint(a, rng);
  const auto c = certify(SuperOperator::structured(l, r), SymmetricNorm::lp(1.0), {opts(), {}});
  EXPECT_EQ(c.verdict, Verdict::Hermitian);
  ASSERT_TRUE(c.decomposition.has_value());
  EXPECT_LT(non_central_gap(c.decomposition->a, l), 1e-8);
  EXPECT_FALSE(c.l2_exception);
  EXPECT_EQ(c.norm_id, "lp(p=1)");
}

TEST(Certify, SkewLeftIsNotHermitian) {
  auto a = alg_of({{3, 1.0}});
  Rng rng = make_rng(66);
  const auto t = SuperOperator::left(unit_self_adjoint(a, rng) * cplx(0.0, 1.0));
  EXPECT_EQ(certify(t, SymmetricNorm::lp(3.0), {opts(), {}}).verdict, Verdict::NotHermitian);
}

TEST(Certify, TransposeOnL2) {
  const auto a = alg_of({{2, 1.0}});
  const auto c = certify(SuperOperator::transpose_map(a), SymmetricNorm::lp(2.0), {opts(), {}});
  EXPECT_EQ(c.verdict, Verdict::Hermitian);
  EXPECT_FALSE(c.decomposition.has_value());
  EXPECT_TRUE(c.l2_exception);
  EXPECT_GT(c.fit_residual, 0.5);
}

TEST(Certify, RealLinearCombinations) {
  auto a = alg_of({{2, 1.0}, {1, 1.0}});
  Rng rng = make_rng(67);
  const auto t1 = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng));
  const auto t2 = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng));
  const auto c = certify(cplx(0.7) * t1 + cplx(-1.3) * t2, SymmetricNorm::lp(3.0), {opts(), {}});
  EXPECT_EQ(c.verdict, Verdict::Hermitian);
}

TEST(Certify, PerturbationsAreDetected) {
  auto a = alg_of({{2, 1.0}, {1, 1.0}});
  Rng rng = make_rng(68);
  for (int s = 0; s < 5; ++s) {
    const auto t = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng)) +
                   cplx(1e-2) * SuperOperator::dense(a, random_gaussian_matrix(5, 5, rng));
    const auto c = certify(t, SymmetricNorm::lp(3.0), {opts(), {}});
    EXPECT_NE(c.verdict, Verdict::Hermitian);
    EXPECT_GT(std::max(c.exp_defect, c.max_imag_numrange), 1e-3);
  }
}

TEST(Certify, Deterministic) {
  auto a = alg_of({{2, 1.0}});
  Rng rng = make_rng(69);
  const auto t = SuperOperator::dense(a, random_gaussian_matrix(4, 4, rng));
  const auto c1 = certify(t, SymmetricNorm::lp(3.0), {opts(5), {}});
  const auto c2 = certify(t, SymmetricNorm::lp(3.0), {opts(5), {}});
  EXPECT_EQ(c1.exp_defect, c2.exp_defect);
  EXPECT_EQ(c1.max_imag_numrange, c2.max_imag_numrange);
}

TEST(Orthogonality, StructuredOnDisjointProjections) {
  auto a = alg_of({{3, 1.0}, {2, 1.0}});
  Rng rng = make_rng(70);
  const auto t = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng));
  for (unsigned long m = 1; m < 31; ++m) {
    const unsigned long q = 31UL & ~m;
    EXPECT_LT(orthogonality_defect(t, diagonal_projection(a, m), diagonal_projection(a, q)), 1e-10);
  }
}

TEST(Orthogonality, ZeroSecondArgument) {
  auto a = alg_of({{2, 1.0}});
  const auto t = SuperOperator::identity(a);
  EXPECT_EQ(orthogonality_defect(t, diagonal_projection(a, 1), Element::zero(a)), 0.0);
}

TEST(Orthogonality, RejectsOverlappingSupports) {
  auto a = alg_of({{2, 1.0}});
  const auto t = SuperOperator::identity(a);
  EXPECT_THROW(orthogonality_defect(t, diagonal_projection(a, 1), diagonal_projection(a, 3)), DomainError);
  Element x = Element::identity(a) * cplx(2.0);
  EXPECT_THROW(orthogonality_defect(t, x, Element::zero(a)), DomainError);
}

TEST(Orthogonality, SkewMultiplicationByOnesVanishes) {
  // tau(i a x1 x2*) = 0 whenever r(x1) and r(x2) are orthogonal, so the
  // left multiplication by i a never violates the identity.
  auto a = alg_of({{3, 1.0}});
  Element ones = Element::zero(a);
  ones.block(0).setOnes();
  const auto t = SuperOperator::left(ones * cplx(0.0, 1.0));
  for (unsigned long m = 1; m < 7; ++m)
    EXPECT_LT(orthogonality_defect(t, diagonal_projection(a, m), diagonal_projection(a, 7UL & ~m)), 1e-14);
}

TEST(Orthogonality, TwoSidedMultiplicationViolates) {
  auto a = alg_of({{2, 1.0}});
  Element ones = Element::zero(a);
  ones.block(0).setOnes();
  const auto t = SuperOperator::from_map(a, [&](const Element& x) { return ones * x * ones; });
  EXPECT_NEAR(orthogonality_defect(t, diagonal_projection(a, 1), diagonal_projection(a, 2)), 1.0, 1e-14);
}

TEST(Corner, InvertibleGivesExactZero) {
  auto a = alg_of({{3, 1.0}});
  Rng rng = make_rng(71);
  const auto t = SuperOperator::dense(a, random_gaussian_matrix(9, 9, rng));
  EXPECT_EQ(corner_defect(t, random_element(a, rng)), 0.0);
}

TEST(Corner, StructuredRankOne) {
  auto a = alg_of({{3, 1.0}});
  Rng rng = make_rng(72);
  const auto t = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng));
  const Mat v = random_gaussian_matrix(3, 1, rng), w = random_gaussian_matrix(3, 1, rng);
  const Element x(a, {v * w.adjoint()});
  EXPECT_LT(corner_defect(t, x), 1e-11);
}

TEST(Corner, GenericDenseRankOne) {
  auto a = alg_of({{3, 1.0}});
  Rng rng = make_rng(73);
  const auto t = SuperOperator::dense(a, random_gaussian_matrix(9, 9, rng));
  const Mat v = random_gaussian_matrix(3, 1, rng), w = random_gaussian_matrix(3, 1, rng);
  EXPECT_GT(corner_defect(t, Element(a, {v * w.adjoint()})), 1e-3);
}

TEST(ProjectionBound, ZeroOperator) {
  auto a = alg_of({{2, 1.0}});
  EXPECT_EQ(projection_bound_check(SuperOperator::zero(a), SymmetricNorm::lp(1.0)).ratio, 0.0);
}

TEST(ProjectionBound, LeftMultiplicationOnL1) {
  auto a = alg_of({{3, 1.0}, {2, 1.0}});
  Rng rng = make_rng(74);
  const auto pb = projection_bound_check(SuperOperator::left(unit_self_adjoint(a, rng)), SymmetricNorm::lp(1.0));
  EXPECT_LE(pb.ratio, 3.0);
  EXPECT_TRUE(pb.within_bound);
}

TEST(ProjectionBound, RandomStructuredOnL3) {
  auto a = alg_of({{2, 1.0}, {2, 1.0}});
  Rng rng = make_rng(75);
  for (int s = 0; s < 200; ++s) {
    const auto t = SuperOperator::structured(random_self_adjoint(a, rng), random_self_adjoint(a, rng));
    EXPECT_LE(projection_bound_check(t, SymmetricNorm::lp(3.0), {static_cast<std::uint64_t>(s), 8}).ratio, 3.0);
  }
}

TEST(CentralSplit, LeftMultiplication) {
  auto a = alg_of({{3, 1.0}});
  Rng rng = make_rng(76);
  const Element h = random_self_adjoint(a, rng);
  const auto t = SuperOperator::left(h);
  const auto s = central_split(t);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->w.to_string(), "1");
  EXPECT_LT(s->b.norm_inf(), 1e-12);
  EXPECT_LT((s->a - h).norm_inf(), 1e-10);
  EXPECT_EQ(certify(t.compose(t), SymmetricNorm::lp(3.0), {opts(), {}}).verdict, Verdict::Hermitian);
}

TEST(CentralSplit, SeparatedBlocks) {
  auto a = alg_of({{2, 1.0}, {2, 1.0}});
  Rng rng = make_rng(77);
  Element l = random_self_adjoint(a, rng), r = random_self_adjoint(a, rng);
  l.block(1).setZero();
  r.block(0).setZero();
  const auto t = SuperOperator::structured(l, r);
  const auto s = central_split(t);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->w.to_string(), "10");
  EXPECT_LT(op_distance(SuperOperator::structured(s->a, s->b), t), 1e-10);
  EXPECT_LT(s->a.block(1).norm() + s->b.block(0).norm(), 1e-12);
  EXPECT_EQ(certify(t.compose(t), SymmetricNorm::lp(3.0), {opts(), {}}).verdict, Verdict::Hermitian);
}

TEST(CentralSplit, NoSplitOnFactor) {
  auto a = alg_of({{2, 1.0}});
  Rng rng = make_rng(78);
  const auto t = SuperOperator::structured(unit_self_adjoint(a, rng), unit_self_adjoint(a, rng));
  EXPECT_FALSE(central_split(t).has_value());
  EXPECT_EQ(certify(t.compose(t), SymmetricNorm::lp(3.0), {opts(), {}}).verdict, Verdict::NotHermitian);
}

TEST(CentralSplit, RequiresDecomposition) {
  auto a = alg_of({{2, 1.0}});
  Rng rng = make_rng(79);
  EXPECT_THROW(central_split(SuperOperator::dense(a, random_gaussian_matrix(4, 4, rng))), DomainError);
}
