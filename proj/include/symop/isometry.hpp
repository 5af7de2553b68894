#pragma once

// Surjective isometries between symmetric spaces on the same block algebra:
// verification, extraction of the Jordan *-isomorphism from the hermitian
// operators T L_a T^{-1}, and factorization T(x) = J(x) A z + B J(x) (1 - z).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "symop/algebra.hpp"
#include "symop/errors.hpp"
#include "symop/norms.hpp"
#include "symop/superoperator.hpp"

namespace symop {

struct IsometryCheck {
  bool isometry = false;
  double defect = 0.0;
  double condition = 0.0;
};

/// max over random unit x (in the source norm) and the coordinate basis of
/// | ||Tx||_target - ||x||_source |.
inline IsometryCheck is_isometry(const SuperOperator& t_op, const SymmetricNorm& source, const SymmetricNorm& target,
                                 const SamplingOptions& opt = {}, double tol = 1e-10) {
  const auto& alg = t_op.algebra();
  source.check_algebra(*alg);
  target.check_algebra(*alg);
  IsometryCheck out;
  out.condition = t_op.condition_number();
  if (out.condition > 1e12) throw NotSurjective("is_isometry: superoperator is not invertible");
  auto probe = [&](const Element& x) {
    const double nx = norm(x, source);
    if (nx == 0.0) return;
    out.defect = std::max(out.defect, std::abs(norm(t_op.apply(x), target) / nx - 1.0));
  };
  for (int k = 0; k < alg->coord_dim(); ++k) probe(Element::unit(alg, k));
  Rng rng = make_rng(opt.seed, 4);
  for (int s = 0; s < opt.samples; ++s) probe(random_element(alg, rng));
  out.isometry = out.defect < tol;
  return out;
}

/// T o L_a o T^{-1}.
inline SuperOperator conjugate_left_mult(const SuperOperator& t_op, const Element& a, double tol = 1e-10) {
  if (!a.is_self_adjoint(tol)) throw DomainError("conjugate_left_mult: a is not self-adjoint");
  return t_op.compose(SuperOperator::left(a)).compose(t_op.inverse());
}

/// Block permutation pi, per-block unitary v_i and flag: source block i is
/// sent to target block pi(i) by x -> v x v* (straight) or x -> v x^T v*.
struct JordanIso {
  AlgebraPtr alg;
  std::vector<int> perm;
  std::vector<Mat> v;
  std::vector<bool> transpose;

  Element apply(const Element& x) const {
    Element y = Element::zero(alg);
    for (int i = 0; i < alg->num_blocks(); ++i) {
      const auto& vi = v[static_cast<std::size_t>(i)];
      const Mat xi = transpose[static_cast<std::size_t>(i)] ? Mat(x.block(i).transpose()) : x.block(i);
      y.block(perm[static_cast<std::size_t>(i)]) = vi * xi * vi.adjoint();
    }
    return y;
  }
  Element operator()(const Element& x) const { return apply(x); }

  SuperOperator as_operator() const {
    return SuperOperator::from_map(alg, [this](const Element& x) { return apply(x); });
  }

  bool trace_preserving(double tol = 1e-12) const {
    for (int i = 0; i < alg->num_blocks(); ++i)
      if (std::abs(alg->weight(perm[static_cast<std::size_t>(i)]) - alg->weight(i)) > tol * alg->weight(i)) return false;
    return true;
  }
};

namespace detail {

/// Element with a single matrix unit E_jk in block i.
inline Element matrix_unit(const AlgebraPtr& alg, int i, int j, int k) {
  Element e = Element::zero(alg);
  e.block(i)(j, k) = 1.0;
  return e;
}

/// Make the first nonzero entry of the first column positive real.
inline void canonical_phase(Mat& v) {
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double m = std::abs(v(r, 0));
    if (m > 1e-8) {
      v *= std::conj(v(r, 0)) / m;
      return;
    }
  }
}

}  // namespace detail

/// Recover (pi, v_i, flags) from a Jordan *-isomorphism given densely.
inline JordanIso jordan_classify(const SuperOperator& j_op, double tol = 1e-9) {
  const auto& alg = j_op.algebra();
  const int nb = alg->num_blocks();
  JordanIso out{alg, std::vector<int>(static_cast<std::size_t>(nb)), {}, std::vector<bool>(static_cast<std::size_t>(nb))};
  const double scale = std::max(1.0, j_op.matrix().norm());
  std::vector<bool> used(static_cast<std::size_t>(nb), false);
  for (int i = 0; i < nb; ++i) {
    const int d = alg->dim(i);
    Element one_i = Element::zero(alg);
    one_i.block(i).setIdentity();
    const Element img = j_op.apply(one_i);
    int target = -1;
    for (int k = 0; k < nb; ++k) {
      if (img.block(k).norm() < 0.5) continue;
      if (target >= 0) throw ClassificationFailed("jordan_classify: a block unit is sent to several blocks");
      target = k;
    }
    if (target < 0 || used[static_cast<std::size_t>(target)] || alg->dim(target) != d)
      throw ClassificationFailed("jordan_classify: block units do not map to a block permutation");
    if (!img.block(target).isIdentity(tol * scale))
      throw ClassificationFailed("jordan_classify: block unit is not sent to a block unit");
    used[static_cast<std::size_t>(target)] = true;
    out.perm[static_cast<std::size_t>(i)] = target;

    double mult = 0.0, anti = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            const Element x = detail::matrix_unit(alg, i, a, b);
            const Element y = detail::matrix_unit(alg, i, c, e);
            const Element jx = j_op.apply(x), jy = j_op.apply(y), jxy = j_op.apply(x * y);
            mult = std::max(mult, (jxy - jx * jy).norm_inf());
            anti = std::max(anti, (jxy - jy * jx).norm_inf());
          }
    if (std::min(mult, anti) > tol * scale)
      throw ClassificationFailed("jordan_classify: block is neither multiplicative nor anti-multiplicative");
    const bool tr = anti < mult;
    out.transpose[static_cast<std::size_t>(i)] = tr;

    const Mat e11 = j_op.apply(detail::matrix_unit(alg, i, 0, 0)).block(target);
    Eigen::Index col = 0;
    e11.colwise().norm().maxCoeff(&col);
    Mat v(d, d);
    v.col(0) = e11.col(col).normalized();
    for (int k = 1; k < d; ++k) {
      const Element ek = tr ? detail::matrix_unit(alg, i, 0, k) : detail::matrix_unit(alg, i, k, 0);
      v.col(k) = j_op.apply(ek).block(target) * v.col(0);
    }
    detail::canonical_phase(v);
    out.v.push_back(std::move(v));
  }
  if ((out.as_operator().matrix() - j_op.matrix()).norm() > tol * scale)
    throw ClassificationFailed("jordan_classify: recovered data does not reproduce the map");
  return out;
}

struct JordanExtraction {
  JordanIso j;
  CentralProjection z;  // blocks where J is multiplicative
  double residual = 0.0;
  SuperOperator j_dense;
};

namespace detail {

/// Relative distance of S to L_c (left) or R_c (right) on each target block,
/// with c fitted by partial trace averaging. Writes c per block.
inline double fit_split(const Mat& s, const TracialAlgebra& alg, const CentralProjection& z, std::vector<Mat>& c) {
  Mat fitted = Mat::Zero(s.rows(), s.cols());
  c.clear();
  for (int i = 0; i < alg.num_blocks(); ++i) {
    const int d = alg.dim(i);
    const int off = alg.offset(i);
    Mat ci = Mat::Zero(d, d);
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        cplx acc = 0.0;
        for (int m = 0; m < d; ++m)
          acc += z[i] ? s(off + j * d + m, off + l * d + m) : s(off + m * d + l, off + m * d + j);
        ci(j, l) = acc / static_cast<double>(d);
      }
    for (int r = 0; r < d; ++r)
      for (int cc = 0; cc < d; ++cc)
        for (int k = 0; k < d; ++k) {
          if (z[i])
            fitted(off + r * d + cc, off + k * d + cc) += ci(r, k);
          else
            fitted(off + r * d + cc, off + r * d + k) += ci(k, cc);
        }
    c.push_back(std::move(ci));
  }
  return (s - fitted).norm() / std::max(1.0, s.norm());
}

}  // namespace detail

/// Fit every T L_h T^{-1} (h in a self-adjoint basis) to L_{J(h) z} +
/// R_{J(h)(1-z)} over all central projections z, keep the best z and
/// classify the assembled J. Ties prefer z with more blocks set, then the
/// lexicographically larger z.
inline JordanExtraction extract_jordan(const SuperOperator& t_op, double tol = 1e-9) {
  const auto& alg = t_op.algebra();
  const int nb = alg->num_blocks();
  if (nb > 16) throw DomainError("extract_jordan: more than 16 blocks");
  const SuperOperator t_inv = t_op.inverse();
  const auto basis = self_adjoint_basis(alg);
  std::vector<Mat> conj;
  conj.reserve(basis.size());
  for (const auto& h : basis) conj.push_back(t_op.compose(SuperOperator::left(h)).compose(t_inv).matrix());

  std::vector<unsigned long> masks(1UL << nb);
  std::iota(masks.begin(), masks.end(), 0UL);
  std::stable_sort(masks.begin(), masks.end(), [](unsigned long a, unsigned long b) {
    const int pa = __builtin_popcountl(a), pb = __builtin_popcountl(b);
    return pa != pb ? pa > pb : a > b;
  });

  double best = std::numeric_limits<double>::infinity();
  CentralProjection best_z = CentralProjection::ones(nb);
  std::vector<std::vector<Mat>> best_c;
  std::vector<Mat> c;
  for (unsigned long mask : masks) {
    const auto z = CentralProjection::from_mask(mask, nb);
    double res = 0.0;
    std::vector<std::vector<Mat>> cs;
    for (const auto& s : conj) {
      res = std::max(res, detail::fit_split(s, *alg, z, c));
      if (res >= best) break;
      cs.push_back(c);
    }
    if (res < best - 1e-14) {
      best = res;
      best_z = z;
      best_c = std::move(cs);
    }
  }
  if (!(best < tol)) throw NotFactorable("extract_jordan: no central projection fits T L_a T^{-1}");

  // J on the self-adjoint basis, extended complex-linearly to matrix units.
  std::vector<Element> jh;
  for (const auto& cb : best_c) jh.emplace_back(alg, cb);
  const int n = alg->coord_dim();
  Mat jm = Mat::Zero(n, n);
  const cplx I(0.0, 1.0);
  std::size_t k = 0;
  for (int i = 0; i < nb; ++i) {
    const int d = alg->dim(i);
    const int off = alg->offset(i);
    for (int a = 0; a < d; ++a) jm.col(off + a * d + a) = jh[k++].coords();
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        const Vec s = jh[k++].coords();
        const Vec an = jh[k++].coords();
        jm.col(off + a * d + b) = (s + I * an) / 2.0;
        jm.col(off + b * d + a) = (s - I * an) / 2.0;
      }
  }
  SuperOperator j_dense = SuperOperator::dense(alg, std::move(jm));
  JordanIso j = jordan_classify(j_dense, std::max(tol, 1e-9));
  return {std::move(j), best_z, best, std::move(j_dense)};
}

struct IsometryFactorization {
  JordanIso j;
  CentralProjection z;
  Element a;  // T(1) z
  Element b;  // T(1) (1 - z)
  double residual = 0.0;
  double jordan_residual = 0.0;
  double condition = 0.0;
  std::optional<Element> u;        // factor case: T(1)
  double unitary_defect = 0.0;     // factor case: ||u* u - 1||_inf
  bool trace_preserving = false;

  Element apply(const Element& x) const {
    const Element jx = j.apply(x);
    return jx * a + b * jx;
  }
};

/// T(x) = J(x) A z + B J(x) (1 - z) with A = T(1) z, B = T(1)(1 - z).
inline IsometryFactorization factor_isometry(const SuperOperator& t_op, double tol = 1e-9) {
  auto ex = extract_jordan(t_op, tol);
  const auto& alg = t_op.algebra();
  const Element t1 = t_op.apply(Element::identity(alg));
  IsometryFactorization f{ex.j, ex.z, t1.times(ex.z), t1.times(ex.z.complement()), 0.0, ex.residual,
                          t_op.condition_number(), std::nullopt, 0.0, ex.j.trace_preserving()};
  const double scale = std::max(1.0, t1.norm_inf());
  for (int k = 0; k < alg->coord_dim(); ++k) {
    const Element x = Element::unit(alg, k);
    f.residual = std::max(f.residual, (t_op.apply(x) - f.apply(x)).norm_inf() / scale);
  }
  if (!(f.residual < tol)) throw FactorizationRejected("factor_isometry: reconstruction residual above tolerance");
  if (alg->num_blocks() == 1) {
    f.unitary_defect = (t1.adjoint() * t1 - Element::identity(alg)).norm_inf();
    f.u = t1;
  }
  return f;
}

struct ElementaryForm {
  bool elementary = false;
  std::vector<int> sigma;             // (Tx)(g) = A(g) x(sigma(g))
  std::vector<cplx> multiplier;       // A(g)
  double best_defect = 0.0;           // smallest distance to diag(A) P_sigma over sigma
};

/// Brute force over atom permutations on an abelian algebra.
inline ElementaryForm is_elementary(const SuperOperator& t_op, double tol = 1e-10) {
  const auto& alg = t_op.algebra();
  if (!alg->abelian()) throw DomainError("is_elementary: algebra is not abelian");
  const int n = alg->coord_dim();
  if (n > 10) throw DomainError("is_elementary: too many atoms for exhaustive search");
  const Mat& m = t_op.matrix();
  ElementaryForm out;
  out.best_defect = std::numeric_limits<double>::infinity();
  std::vector<int> sigma(static_cast<std::size_t>(n));
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    double defect = 0.0;
    std::vector<cplx> mult;
    for (int g = 0; g < n; ++g) {
      for (int c = 0; c < n; ++c)
        if (c != sigma[static_cast<std::size_t>(g)]) defect = std::max(defect, std::abs(m(g, c)));
      const cplx ag = m(g, sigma[static_cast<std::size_t>(g)]);
      defect = std::max(defect, std::abs(std::abs(ag) - 1.0));
      mult.push_back(ag);
    }
    if (defect < out.best_defect) {
      out.best_defect = defect;
      out.sigma = sigma;
      out.multiplier = std::move(mult);
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  out.elementary = out.best_defect < tol;
  if (!out.elementary) {
    out.sigma.clear();
    out.multiplier.clear();
  }
  return out;
}

/// min over scalars-per-atom multipliers D of ||T - D||_F (abelian algebra):
/// the Frobenius norm of the off-diagonal part.
inline double multiplier_fit_residual(const SuperOperator& t_op) {
  if (!t_op.algebra()->abelian()) throw DomainError("multiplier_fit_residual: algebra is not abelian");
  Mat off = t_op.matrix();
  off.diagonal().setZero();
  return off.norm();
}

}  // namespace symop
