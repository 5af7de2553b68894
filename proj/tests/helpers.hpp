#pragma once

#include <symop/symop.hpp>

namespace testing_util {

using namespace symop;

inline AlgebraPtr alg_of(std::initializer_list<BlockSpec> blocks) { return TracialAlgebra::make(blocks); }

/// Weighted diagonal sum computed entry by entry.
inline cplx brute_trace(const Element& x) {
  cplx acc = 0.0;
  const auto& alg = *x.algebra();
  for (int i = 0; i < alg.num_blocks(); ++i)
    for (int k = 0; k < alg.dim(i); ++k) acc += alg.weight(i) * x.block(i)(k, k);
  return acc;
}

/// All singular values with their block weights, from a fresh SVD.
inline std::vector<std::pair<double, double>> weighted_singular_values(const Element& x) {
  std::vector<std::pair<double, double>> out;
  for (int i = 0; i < x.num_blocks(); ++i) {
    Eigen::BDCSVD<Mat> svd(x.block(i));
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
      out.emplace_back(svd.singularValues()(k), x.algebra()->weight(i));
  }
  return out;
}

/// (sum_i w_i sum_k s_ik^p)^{1/p}.
inline double schatten(const Element& x, double p) {
  double acc = 0.0;
  for (auto [s, w] : weighted_singular_values(x)) acc += w * std::pow(s, p);
  return std::pow(acc, 1.0 / p);
}

/// Full-basis distance of two superoperators.
inline double op_distance(const SuperOperator& a, const SuperOperator& b) {
  double d = 0.0;
  for (int k = 0; k < a.algebra()->coord_dim(); ++k) {
    const Element e = Element::unit(a.algebra(), k);
    d = std::max(d, (a.apply(e) - b.apply(e)).norm_inf());
  }
  return d;
}

/// The two-atom isometry and hermitian operator on weights (1, 2).
inline AlgebraPtr exam_algebra() { return TracialAlgebra::make({{1, 1.0}, {1, 2.0}}); }

inline SuperOperator exam_isometry() {
  const auto alg = exam_algebra();
  const cplx I(0.0, 1.0);
  Mat m(2, 2);
  m << -I / std::sqrt(2.0), std::sqrt(3.0) / std::sqrt(2.0), I / (std::sqrt(2.0) * std::sqrt(3.0)), 1.0 / std::sqrt(2.0);
  return SuperOperator::dense(alg, m);
}

inline SuperOperator exam_hermitian() {
  const auto alg = exam_algebra();
  const cplx I(0.0, 1.0);
  Mat m(2, 2);
  m << 1.0, I * std::sqrt(3.0), -I / std::sqrt(3.0), 1.0;
  return SuperOperator::dense(alg, m);
}

}  // namespace testing_util
