#pragma once

// Linear maps on a block algebra, stored densely in the coordinate basis
// (blocks stacked, each block row-major). x -> a x + x b is kept in
// structured form alongside its dense matrix.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <functional>
#include <optional>
#include <utility>

#include "symop/algebra.hpp"

namespace symop {

class SuperOperator {
 public:
  struct Structured {
    Element a;
    Element b;
  };

  SuperOperator() = default;

  static SuperOperator dense(AlgebraPtr alg, Mat m) {
    if (m.rows() != alg->coord_dim() || m.cols() != alg->coord_dim())
      throw StructuralError("dense superoperator has wrong size");
    return SuperOperator(std::move(alg), std::move(m));
  }

  static SuperOperator zero(const AlgebraPtr& alg) {
    return SuperOperator(alg, Mat::Zero(alg->coord_dim(), alg->coord_dim()));
  }
  static SuperOperator identity(const AlgebraPtr& alg) {
    return SuperOperator(alg, Mat::Identity(alg->coord_dim(), alg->coord_dim()));
  }

  /// x -> a x + x b.
  static SuperOperator structured(const Element& a, const Element& b) {
    a.check_same(b);
    const auto& alg = a.algebra();
    Mat m = Mat::Zero(alg->coord_dim(), alg->coord_dim());
    for (int i = 0; i < alg->num_blocks(); ++i) {
      const int d = alg->dim(i);
      const int off = alg->offset(i);
      const Mat& ai = a.block(i);
      const Mat& bi = b.block(i);
      // vec(a x) = (a (x) 1) vec(x), vec(x b) = (1 (x) b^T) vec(x) for row-major vec.
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          for (int k = 0; k < d; ++k) {
            m(off + r * d + c, off + k * d + c) += ai(r, k);
            m(off + r * d + c, off + r * d + k) += bi(k, c);
          }
    }
    SuperOperator t(alg, std::move(m));
    t.structured_ = Structured{a, b};
    return t;
  }
  static SuperOperator left(const Element& a) { return structured(a, Element::zero(a.algebra())); }
  static SuperOperator right(const Element& b) { return structured(Element::zero(b.algebra()), b); }

  /// Dense form of an arbitrary linear map given as a callable, by
  /// evaluating it on the coordinate basis.
  static SuperOperator from_map(const AlgebraPtr& alg, const std::function<Element(const Element&)>& f) {
    const int n = alg->coord_dim();
    Mat m(n, n);
    for (int k = 0; k < n; ++k) m.col(k) = f(Element::unit(alg, k)).coords();
    return SuperOperator(alg, std::move(m));
  }

  /// x -> x^T (blockwise transpose).
  static SuperOperator transpose_map(const AlgebraPtr& alg) {
    return from_map(alg, [](const Element& x) { return x.transpose(); });
  }

  const AlgebraPtr& algebra() const { return alg_; }
  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  const std::optional<Structured>& structured_parts() const { return structured_; }

  Element apply(const Element& x) const {
    if (!x.algebra()->same_shape(*alg_)) throw StructuralError("superoperator applied to foreign element");
    return Element::from_coords(alg_, m_ * x.coords());
  }
  Element operator()(const Element& x) const { return apply(x); }

  /// this o other.
  SuperOperator compose(const SuperOperator& other) const {
    check_same(other);
    return SuperOperator(alg_, m_ * other.m_);
  }

  SuperOperator inverse(double rcond = 1e-12) const {
    if (condition_number() > 1.0 / rcond) throw NotSurjective("superoperator is singular");
    return SuperOperator(alg_, m_.inverse());
  }

  /// Ratio of extreme singular values of the dense form.
  double condition_number() const {
    Eigen::JacobiSVD<Mat> svd(m_);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
  }

  /// exp(s T), scaling and squaring with a degree-13 Pade approximant.
  SuperOperator exp(cplx s) const { return SuperOperator(alg_, (s * m_).exp()); }

  SuperOperator& operator+=(const SuperOperator& o) {
    check_same(o);
    m_ += o.m_;
    structured_.reset();
    return *this;
  }
  SuperOperator& operator-=(const SuperOperator& o) {
    check_same(o);
    m_ -= o.m_;
    structured_.reset();
    return *this;
  }
  SuperOperator& operator*=(cplx s) {
    m_ *= s;
    structured_.reset();
    return *this;
  }
  friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
  friend SuperOperator operator-(SuperOperator a, const SuperOperator& b) { return a -= b; }
  friend SuperOperator operator*(cplx s, SuperOperator a) { return a *= s; }

 private:
  SuperOperator(AlgebraPtr alg, Mat m) : alg_(std::move(alg)), m_(std::move(m)) {}

  void check_same(const SuperOperator& o) const {
    if (!alg_->same_shape(*o.alg_)) throw StructuralError("superoperators act on different algebras");
  }

  AlgebraPtr alg_;
  Mat m_;
  std::optional<Structured> structured_;
};

}  // namespace symop
