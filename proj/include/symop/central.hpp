#pragma once

// Central projections splitting pairs (a, b) that satisfy the bimodule
// identity e y + y f = a y b for every y.

#include <algorithm>

#include "symop/algebra.hpp"
#include "symop/config.hpp"
#include "symop/errors.hpp"

namespace symop {

struct BimoduleDefects {
  double identity = 0.0;      // max_y ||e y + y f - a y b||_inf
  double commutator = 0.0;    // ||[a, b]||_inf
  double double_comm = 0.0;   // max_y ||[b, [a, y]]||_inf
};

/// Evaluate the identity and its consequences [a,b] = 0, [b,[a,y]] = 0 on
/// the coordinate basis.
inline BimoduleDefects verify_bimodule_identity(const Element& a, const Element& b, const Element& e, const Element& f,
                                                double tol = 1e-10) {
  a.check_same(b);
  a.check_same(e);
  a.check_same(f);
  for (const Element* x : {&a, &b, &e, &f})
    if (!x->is_self_adjoint(tol)) throw DomainError("verify_bimodule_identity: inputs must be self-adjoint");
  const auto& alg = a.algebra();
  BimoduleDefects d;
  d.commutator = commutator(a, b).norm_inf();
  for (int k = 0; k < alg->coord_dim(); ++k) {
    const Element y = Element::unit(alg, k);
    d.identity = std::max(d.identity, (e * y + y * f - a * y * b).norm_inf());
    d.double_comm = std::max(d.double_comm, commutator(b, commutator(a, y)).norm_inf());
  }
  return d;
}

/// Per block: z_i = 1 when b_i is scalar, otherwise z_i = 0 and a_i must be
/// scalar. Then a (1 - z) and b z are central.
inline CentralProjection central_split_pair(const Element& a, const Element& b, double tol = 1e-10) {
  a.check_same(b);
  const int nb = a.num_blocks();
  auto z = CentralProjection::zeros(nb);
  for (int i = 0; i < nb; ++i) {
    if (is_scalar_matrix(b.block(i), tol)) {
      z.set(i, true);
    } else if (!is_scalar_matrix(a.block(i), tol)) {
      throw HypothesisViolated("central_split_pair: neither a nor b is scalar on block " + std::to_string(i));
    }
  }
  return z;
}

/// ||x - scalar_part(x)||_inf.
inline double centrality_defect(const Element& x) { return (x - x.scalar_part()).norm_inf(); }

struct CentralDecomposition {
  CentralProjection z;
  double a_defect = 0.0;  // a (1 - z)
  double e_defect = 0.0;  // e (1 - z)
  double b_defect = 0.0;  // b z
  double f_defect = 0.0;  // f z
  BimoduleDefects identity;

  double max_defect() const { return std::max({a_defect, e_defect, b_defect, f_defect}); }
};

/// z with a(1 - z), e(1 - z), b z and f z central.
inline CentralDecomposition central_decomposition(const Element& a, const Element& b, const Element& e,
                                                  const Element& f, const Tolerances& tol = {}) {
  CentralDecomposition out;
  out.identity = verify_bimodule_identity(a, b, e, f, tol.check);
  const double scale = std::max({1.0, a.norm_inf() * b.norm_inf(), e.norm_inf(), f.norm_inf()});
  if (out.identity.identity > tol.fit * scale)
    throw DomainError("central_decomposition: e y + y f = a y b does not hold");
  out.z = central_split_pair(a, b, tol.check);
  const auto w = out.z.complement();
  out.a_defect = centrality_defect(a.times(w));
  out.e_defect = centrality_defect(e.times(w));
  out.b_defect = centrality_defect(b.times(out.z));
  out.f_defect = centrality_defect(f.times(out.z));
  if (out.max_defect() > tol.fit * scale)
    throw HypothesisViolated("central_decomposition: centrality check failed");
  return out;
}

}  // namespace symop
