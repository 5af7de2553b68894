#pragma once

// Certification of hermitian superoperators on a symmetric space and
// recovery of the canonical form T x = a x + x b with a, b self-adjoint.
//
// Two sampling oracles decide hermitian-ness independently of each other:
// the exponential group e^{itT} must consist of isometries, and the
// numerical range {<Tx, x> : ||x|| = 1} must be real. The least-squares
// decomposition then recovers (a, b).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "symop/algebra.hpp"
#include "symop/norms.hpp"
#include "symop/superoperator.hpp"

namespace symop {

namespace detail {

/// Random element of unit norm in N.
inline Element random_unit(const AlgebraPtr& alg, const SymmetricNorm& n, Rng& rng) {
  Element x = random_element(alg, rng);
  return x * cplx(1.0 / norm(x, n));
}

/// Traceless self-adjoint basis of each block (gauge-fixed space for b).
inline std::vector<Element> traceless_self_adjoint_basis(const AlgebraPtr& alg) {
  std::vector<Element> out;
  for (const auto& h : self_adjoint_basis(alg)) {
    // Drop diagonal units; re-add differences E_jj - E_{j+1,j+1} below.
    bool diagonal_unit = false;
    for (int i = 0; i < alg->num_blocks() && !diagonal_unit; ++i) {
      const Mat& b = h.block(i);
      if (b.isZero()) continue;
      diagonal_unit = b.isDiagonal() && std::abs(b.trace() - 1.0) < 1e-15;
    }
    if (!diagonal_unit) out.push_back(h);
  }
  for (int i = 0; i < alg->num_blocks(); ++i)
    for (int j = 0; j + 1 < alg->dim(i); ++j) {
      Element e = Element::zero(alg);
      e.block(i)(j, j) = 1.0;
      e.block(i)(j + 1, j + 1) = -1.0;
      out.push_back(std::move(e));
    }
  return out;
}

inline RealVec realify(const Mat& m) {
  RealVec v(2 * m.size());
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      v(k++) = m(r, c).real();
      v(k++) = m(r, c).imag();
    }
  return v;
}

}  // namespace detail

/// max over sampled real t in [-2, 2] and random unit x of | ||e^{itT} x|| - 1 |.
inline double exp_isometry_defect(const SuperOperator& t_op, const SymmetricNorm& n, const SamplingOptions& opt) {
  const auto& alg = t_op.algebra();
  n.check_algebra(*alg);
  Rng rng = make_rng(opt.seed, 1);
  std::uniform_real_distribution<double> tdist(-2.0, 2.0);
  double defect = 0.0;
  const int per_t = 4;
  const int groups = std::max(1, opt.samples / per_t);
  for (int g = 0; g < groups; ++g) {
    const double t = tdist(rng);
    const SuperOperator u = t_op.exp(cplx(0.0, t));
    for (int k = 0; k < per_t; ++k) {
      const Element x = detail::random_unit(alg, n, rng);
      defect = std::max(defect, std::abs(norm(u.apply(x), n) - 1.0));
    }
  }
  return defect;
}

/// Lower bound for sup |Im <Tx, x>| over the unit sphere of N, by random
/// restarts followed by a derivative-free local ascent.
inline double max_imag_numerical_range(const SuperOperator& t_op, const SymmetricNorm& n,
                                       const SamplingOptions& opt) {
  const auto& alg = t_op.algebra();
  n.check_algebra(*alg);
  Rng rng = make_rng(opt.seed, 2);
  auto value = [&](const Element& x) { return std::abs(sip(t_op.apply(x), x, n).imag()); };
  const int restarts = std::max(4, opt.samples / 8);
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Element x = detail::random_unit(alg, n, rng);
    double fx = value(x);
    double step = 0.5;
    for (int it = 0; it < 40 && step > 1e-4; ++it) {
      Element y = x + cplx(step) * random_element(alg, rng);
      const double ny = norm(y, n);
      if (ny == 0.0) continue;
      y *= cplx(1.0 / ny);
      const double fy = value(y);
      if (fy > fx) {
        x = std::move(y);
        fx = fy;
      } else {
        step *= 0.7;
      }
    }
    best = std::max(best, fx);
  }
  return best;
}

struct HermitianDecomposition {
  Element a;
  Element b;
  double residual;  // Frobenius distance of the dense forms
};

/// Least-squares fit of T over {L_a + R_b : a = a*, b = b*}. The central
/// gauge (a + c, b - c) is fixed by making every block of b traceless.
inline HermitianDecomposition decompose_hermitian(const SuperOperator& t_op) {
  const auto& alg = t_op.algebra();
  const auto basis_a = self_adjoint_basis(alg);
  const auto basis_b = detail::traceless_self_adjoint_basis(alg);
  const Eigen::Index rows = 2 * static_cast<Eigen::Index>(t_op.matrix().size());
  const auto na = static_cast<Eigen::Index>(basis_a.size());
  const auto nb = static_cast<Eigen::Index>(basis_b.size());
  Eigen::MatrixXd design(rows, na + nb);
  for (Eigen::Index k = 0; k < na; ++k)
    design.col(k) = detail::realify(SuperOperator::left(basis_a[static_cast<std::size_t>(k)]).matrix());
  for (Eigen::Index k = 0; k < nb; ++k)
    design.col(na + k) = detail::realify(SuperOperator::right(basis_b[static_cast<std::size_t>(k)]).matrix());
  const RealVec target = detail::realify(t_op.matrix());
  const RealVec coef = design.colPivHouseholderQr().solve(target);
  Element a = Element::zero(alg), b = Element::zero(alg);
  for (Eigen::Index k = 0; k < na; ++k) a += cplx(coef(k)) * basis_a[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 0; k < nb; ++k) b += cplx(coef(na + k)) * basis_b[static_cast<std::size_t>(k)];
  const double residual = (t_op.matrix() - SuperOperator::structured(a, b).matrix()).norm();
  return {std::move(a), std::move(b), residual};
}

enum class Verdict { Hermitian, NotHermitian, Undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Hermitian: return "Hermitian";
    case Verdict::NotHermitian: return "NotHermitian";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

struct CertifyOptions {
  SamplingOptions sampling;
  Tolerances tol;
};

struct HermitianCertificate {
  Verdict verdict = Verdict::Undecided;
  double exp_defect = 0.0;
  double max_imag_numrange = 0.0;
  double fit_residual = 0.0;
  std::optional<HermitianDecomposition> decomposition;
  bool l2_exception = false;  // norm proportional to ||.||_2: no multiplication form
  std::string norm_id;
  int samples = 0;
  std::uint64_t seed = 0;
  Tolerances tol;
};

/// Hermitian iff both oracles are below tol.oracle, NotHermitian iff both
/// exceed it, Undecided otherwise. The decomposition is attached when the
/// norm is not proportional to ||.||_2 and the fit residual is below tol.fit.
inline HermitianCertificate certify(const SuperOperator& t_op, const SymmetricNorm& n, const CertifyOptions& opt = {}) {
  HermitianCertificate c;
  c.norm_id = n.describe();
  c.samples = opt.sampling.samples;
  c.seed = opt.sampling.seed;
  c.tol = opt.tol;
  c.exp_defect = exp_isometry_defect(t_op, n, opt.sampling);
  c.max_imag_numrange = max_imag_numerical_range(t_op, n, opt.sampling);
  const bool e_ok = c.exp_defect < opt.tol.oracle;
  const bool w_ok = c.max_imag_numrange < opt.tol.oracle;
  c.verdict = (e_ok && w_ok) ? Verdict::Hermitian : (!e_ok && !w_ok) ? Verdict::NotHermitian : Verdict::Undecided;
  c.l2_exception = proportional_to_l2(n, t_op.algebra(), opt.sampling.seed);
  auto dec = decompose_hermitian(t_op);
  c.fit_residual = dec.residual;
  if (!c.l2_exception && dec.residual < opt.tol.fit) c.decomposition = std::move(dec);
  return c;
}

/// |tau(T(x1) x2*)| for partial isometries with orthogonal left and right
/// supports.
inline double orthogonality_defect(const SuperOperator& t_op, const Element& x1, const Element& x2,
                                   double tol = 1e-10) {
  x1.check_same(x2);
  for (const Element* x : {&x1, &x2})
    if (!(x->adjoint() * *x).is_projection(tol)) throw DomainError("orthogonality_defect: argument is not a partial isometry");
  const auto p1 = polar_decompose(x1, tol);
  const auto p2 = polar_decompose(x2, tol);
  if ((p1.left * p2.left).norm_inf() > tol || (p1.right * p2.right).norm_inf() > tol)
    throw DomainError("orthogonality_defect: supports are not disjoint");
  return std::abs(trace(t_op.apply(x1) * x2.adjoint()));
}

/// ||l(x)^perp T(x) r(x)^perp||_inf. The complements are built from the
/// trailing singular vectors, so they vanish exactly for invertible x.
inline double corner_defect(const SuperOperator& t_op, const Element& x, double tol = 1e-10) {
  const Element tx = t_op.apply(x);
  const double scale = std::max(1.0, x.norm_inf());
  double out = 0.0;
  for (int i = 0; i < x.num_blocks(); ++i) {
    const auto d = x.block(i).rows();
    Eigen::JacobiSVD<Mat> svd(x.block(i), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Index rank = 0;
    while (rank < d && svd.singularValues()(rank) > tol * scale) ++rank;
    if (rank == d) continue;
    const Mat lu = svd.matrixU().rightCols(d - rank), rv = svd.matrixV().rightCols(d - rank);
    out = std::max(out, op_norm(lu.adjoint() * tx.block(i) * rv));
  }
  return out;
}

struct ProjectionBound {
  double ratio = 0.0;          // max_p ||T(p)||_inf / norm_estimate
  double max_image = 0.0;      // max_p ||T(p)||_inf
  double norm_estimate = 0.0;  // lower bound for ||T|| on (E, ||.||_N)
  bool within_bound = true;    // ratio <= 3
  bool within_slack = true;    // ratio <= 3 (1 + slack)
  int projections = 0;
};

/// Compare ||T(p)||_inf over all diagonal projections with a lower bound
/// for the operator norm of T on (E, N): the spectral radius of T together
/// with sampled ratios ||Tx|| / ||x||.
inline ProjectionBound projection_bound_check(const SuperOperator& t_op, const SymmetricNorm& n,
                                              const SamplingOptions& opt = {}, double slack = 0.05) {
  const auto& alg = t_op.algebra();
  n.check_algebra(*alg);
  const int atoms = alg->atom_count();
  if (atoms > 20) throw DomainError("projection_bound_check: too many atoms to enumerate");
  ProjectionBound pb;
  Eigen::ComplexEigenSolver<Mat> es(t_op.matrix(), false);
  double est = es.eigenvalues().cwiseAbs().maxCoeff();
  auto ratio_of = [&](const Element& x) {
    const double nx = norm(x, n);
    return nx > 0.0 ? norm(t_op.apply(x), n) / nx : 0.0;
  };
  for (unsigned long mask = 1; mask < (1UL << atoms); ++mask) {
    const Element p = diagonal_projection(alg, mask);
    pb.max_image = std::max(pb.max_image, t_op.apply(p).norm_inf());
    est = std::max(est, ratio_of(p));
    ++pb.projections;
  }
  for (int k = 0; k < alg->coord_dim(); ++k) est = std::max(est, ratio_of(Element::unit(alg, k)));
  Rng rng = make_rng(opt.seed, 3);
  for (int k = 0; k < opt.samples; ++k) est = std::max(est, ratio_of(random_element(alg, rng)));
  pb.norm_estimate = est;
  pb.ratio = est > 0.0 ? pb.max_image / est : 0.0;
  pb.within_bound = pb.ratio <= 3.0;
  pb.within_slack = pb.ratio <= 3.0 * (1.0 + slack);
  return pb;
}

struct CentralSplit {
  CentralProjection w;  // a' lives in M_w, b' in M_{1-w}
  Element a;
  Element b;
  CentralProjection z_a;  // blocks of w where a' is central
  CentralProjection z_b;  // blocks of 1 - w where b' is central
};

/// Split T = L_a + R_b as T y = a' y + y b' with a' supported on a central
/// projection w and b' on 1 - w, absorbing central parts. Per block, w_i = 1
/// when b_i is scalar, otherwise w_i = 0 and a_i must be scalar; no split
/// exists when neither is.
inline std::optional<CentralSplit> central_split(const SuperOperator& t_op, const Tolerances& tol = {}) {
  const auto dec = decompose_hermitian(t_op);
  if (dec.residual >= tol.fit * std::max(1.0, t_op.matrix().norm()))
    throw DomainError("central_split: operator has no decomposition a x + x b");
  const auto& alg = t_op.algebra();
  const int nb = alg->num_blocks();
  CentralSplit s{CentralProjection::zeros(nb), Element::zero(alg), Element::zero(alg), CentralProjection::zeros(nb),
                 CentralProjection::zeros(nb)};
  for (int i = 0; i < nb; ++i) {
    const Mat& ai = dec.a.block(i);
    const Mat& bi = dec.b.block(i);
    const auto d = ai.rows();
    const Mat one = Mat::Identity(d, d);
    if (is_scalar_matrix(bi, tol.oracle)) {
      s.w.set(i, true);
      s.a.block(i) = ai + (bi.trace() / static_cast<double>(d)) * one;
      s.z_a.set(i, is_scalar_matrix(s.a.block(i), tol.oracle));
    } else if (is_scalar_matrix(ai, tol.oracle)) {
      s.b.block(i) = bi + (ai.trace() / static_cast<double>(d)) * one;
      s.z_b.set(i, is_scalar_matrix(s.b.block(i), tol.oracle));
    } else {
      return std::nullopt;
    }
  }
  return s;
}

}  // namespace symop
