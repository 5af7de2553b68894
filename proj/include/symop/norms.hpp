#pragma once

// Symmetric norms ||x||_E = ||mu(x)||_E, their Koethe duals, support
// functionals and the semi-inner products they induce.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "symop/algebra.hpp"
#include "symop/singular.hpp"

namespace symop {

enum class NormKind { Lp, KyFan, Lorentz, L1capLinf, L1plusLinf, CustomTwoAtom };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A symmetric norm given by a gauge on decreasing step functions.
///
/// Gauges (before normalization):
///   Lp          (\int mu^p)^{1/p}, p in [1, inf]
///   KyFan(k)    \int_0^k mu
///   Lorentz(a)  \int mu d(t^a), 0 < a <= 1
///   L1capLinf   max(\int mu, mu(0))
///   L1plusLinf  \int_0^1 mu
///   CustomTwoAtom(c)  sqrt(|a|^2 + c|b|^2) on blocks [(1, w=1), (1, w=2)]
///
/// All but CustomTwoAtom are rescaled so that the indicator of (0, 1) has
/// norm one.
class SymmetricNorm {
 public:
  static SymmetricNorm lp(double p) {
    if (!(p >= 1.0)) throw DomainError("Lp norm needs p >= 1");
    return SymmetricNorm(NormKind::Lp, p);
  }
  static SymmetricNorm ky_fan(double k) {
    if (!(k > 0.0)) throw DomainError("Ky Fan norm needs k > 0");
    return SymmetricNorm(NormKind::KyFan, k);
  }
  static SymmetricNorm lorentz(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("Lorentz exponent must lie in (0, 1]");
    return SymmetricNorm(NormKind::Lorentz, alpha);
  }
  static SymmetricNorm l1_cap_linf() { return SymmetricNorm(NormKind::L1capLinf, 0.0); }
  static SymmetricNorm l1_plus_linf() { return SymmetricNorm(NormKind::L1plusLinf, 0.0); }
  static SymmetricNorm custom_two_atom(double c = 3.0) {
    if (!(c > 0.0)) throw DomainError("custom_two_atom needs c > 0");
    return SymmetricNorm(NormKind::CustomTwoAtom, c);
  }

  NormKind kind() const { return kind_; }
  double param() const { return param_; }
  double normalization() const { return scale_; }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case NormKind::Lp:
        if (std::isinf(param_)) os << "lp(p=inf)";
        else os << "lp(p=" << param_ << ")";
        break;
      case NormKind::KyFan: os << "ky_fan(k=" << param_ << ")"; break;
      case NormKind::Lorentz: os << "lorentz(alpha=" << param_ << ")"; break;
      case NormKind::L1capLinf: os << "l1_cap_linf"; break;
      case NormKind::L1plusLinf: os << "l1_plus_linf"; break;
      case NormKind::CustomTwoAtom: os << "custom_two_atom(c=" << param_ << ")"; break;
    }
    return os.str();
  }

  /// Differentiable away from zero on the atom coordinates.
  bool smooth() const {
    return (kind_ == NormKind::Lp && param_ > 1.0 && !std::isinf(param_)) || kind_ == NormKind::CustomTwoAtom;
  }

  /// Throws DomainError if this norm cannot be evaluated on `alg`.
  void check_algebra(const TracialAlgebra& alg) const {
    if (kind_ != NormKind::CustomTwoAtom) return;
    if (alg.num_blocks() != 2 || alg.dim(0) != 1 || alg.dim(1) != 1 || alg.weight(0) != 1.0 ||
        alg.weight(1) != 2.0)
      throw DomainError("custom_two_atom is only defined on blocks [(1, w=1), (1, w=2)]");
  }

  /// Normalized gauge of a decreasing step function.
  double gauge(const StepFunction& f) const { return raw_gauge(f) / scale_; }

  /// Norm of the diagonal element with nonnegative entries c on atoms of
  /// weights w (atoms in algebra order: block by block).
  double atom_norm(const RealVec& c, const RealVec& w) const {
    if (kind_ == NormKind::CustomTwoAtom) {
      if (c.size() != 2) throw DomainError("custom_two_atom acts on two atoms");
      return std::sqrt(c(0) * c(0) + param_ * c(1) * c(1));
    }
    std::vector<Step> steps;
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (c(k) > 0.0) steps.push_back({c(k), w(k)});
    return gauge(StepFunction::rearrange(std::move(steps), 0.0));
  }

  /// Linear pieces l_j with N(v) = max_j l_j . v on the cone
  /// v_1 >= v_2 >= ... >= 0 whose entries occupy lengths `lens`.
  /// Only defined for the non-smooth (polyhedral on cones) kinds.
  std::vector<RealVec> cone_pieces(const RealVec& lens) const {
    const auto m = lens.size();
    RealVec cum(m + 1);
    cum(0) = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) cum(k + 1) = cum(k) + lens(k);
    auto first = [&]() {
      RealVec e = RealVec::Zero(m);
      if (m > 0) e(0) = 1.0;
      return e;
    };
    auto ky_fan_piece = [&](double k) {
      RealVec l(m);
      for (Eigen::Index j = 0; j < m; ++j) l(j) = std::max(0.0, std::min(cum(j + 1), k) - cum(j));
      return l;
    };
    std::vector<RealVec> out;
    switch (kind_) {
      case NormKind::Lp:
        if (param_ == 1.0) out.push_back(lens);
        else if (std::isinf(param_)) out.push_back(first());
        else throw DomainError("cone_pieces: Lp with 1 < p < inf is smooth");
        break;
      case NormKind::KyFan: out.push_back(ky_fan_piece(param_)); break;
      case NormKind::Lorentz: {
        RealVec l(m);
        for (Eigen::Index j = 0; j < m; ++j) l(j) = std::pow(cum(j + 1), param_) - std::pow(cum(j), param_);
        out.push_back(l);
        break;
      }
      case NormKind::L1capLinf:
        out.push_back(lens);
        out.push_back(first());
        break;
      case NormKind::L1plusLinf: out.push_back(ky_fan_piece(1.0)); break;
      case NormKind::CustomTwoAtom: throw DomainError("cone_pieces: custom_two_atom is smooth");
    }
    for (auto& l : out) l /= scale_;
    return out;
  }

  /// Gradient of the atom norm at c (entries of c positive or zero).
  RealVec atom_gradient(const RealVec& c, const RealVec& w) const {
    const double n = atom_norm(c, w);
    RealVec g = RealVec::Zero(c.size());
    if (n == 0.0) return g;
    if (kind_ == NormKind::CustomTwoAtom) {
      g(0) = c(0) / n;
      g(1) = param_ * c(1) / n;
      return g;
    }
    if (kind_ == NormKind::Lp && smooth()) {
      const double p = param_;
      for (Eigen::Index k = 0; k < c.size(); ++k) g(k) = w(k) * std::pow(c(k) / n, p - 1.0);
      return g;
    }
    throw DomainError("atom_gradient: norm is not smooth");
  }

  /// Gradient and Hessian of F(c) = N(c)^2 / 2 for the smooth kinds.
  void half_square_derivatives(const RealVec& c, const RealVec& w, RealVec& grad, Eigen::MatrixXd& hess) const {
    const auto m = c.size();
    if (kind_ == NormKind::CustomTwoAtom) {
      grad = RealVec(2);
      grad << c(0), param_ * c(1);
      hess = Eigen::MatrixXd::Zero(2, 2);
      hess(0, 0) = 1.0;
      hess(1, 1) = param_;
      return;
    }
    const double p = param_;
    const double n = atom_norm(c, w);
    RealVec h(m);
    for (Eigen::Index k = 0; k < m; ++k) h(k) = w(k) * std::pow(c(k), p - 1.0);
    grad = std::pow(n, 2.0 - p) * h;
    hess = (2.0 - p) * std::pow(n, 2.0 - 2.0 * p) * h * h.transpose();
    for (Eigen::Index k = 0; k < m; ++k) hess(k, k) += (p - 1.0) * std::pow(n, 2.0 - p) * w(k) * std::pow(c(k), p - 2.0);
  }

 private:
  SymmetricNorm(NormKind kind, double param) : kind_(kind), param_(param) {
    if (kind_ != NormKind::CustomTwoAtom) scale_ = raw_gauge(StepFunction::rearrange({{1.0, 1.0}}));
  }

  double raw_gauge(const StepFunction& f) const {
    const auto& st = f.steps();
    switch (kind_) {
      case NormKind::Lp: {
        if (std::isinf(param_)) return f.sup();
        double acc = 0.0;
        for (const auto& s : st) acc += std::pow(s.value, param_) * s.length;
        return std::pow(acc, 1.0 / param_);
      }
      case NormKind::KyFan: return f.integral(param_);
      case NormKind::Lorentz: {
        double acc = 0.0, start = 0.0;
        for (const auto& s : st) {
          acc += s.value * (std::pow(start + s.length, param_) - std::pow(start, param_));
          start += s.length;
        }
        return acc;
      }
      case NormKind::L1capLinf: return std::max(f.integral(), f.sup());
      case NormKind::L1plusLinf: return f.integral(1.0);
      case NormKind::CustomTwoAtom: {
        // Recover (|a|, |b|) on atoms of trace 1 and 2 from the breakpoints.
        const auto bps = f.breakpoints();
        auto near = [](double x, double y) { return std::abs(x - y) < 1e-9; };
        double a = 0.0, b = 0.0;
        if (bps.empty()) return 0.0;
        if (near(bps[0], 2.0)) {
          b = f(0.0);
          a = f(2.0);
        } else if (near(bps[0], 1.0)) {
          a = f(0.0);
          b = f(1.0);
        } else if (near(bps[0], 3.0)) {
          a = b = f(0.0);
        } else {
          throw DomainError("custom_two_atom: step function is not mu of a two-atom element");
        }
        return std::sqrt(a * a + param_ * b * b);
      }
    }
    return 0.0;
  }

  NormKind kind_;
  double param_;
  double scale_ = 1.0;
};

/// ||x||_N = gauge(mu(x)).
inline double norm(const Element& x, const SymmetricNorm& n) {
  n.check_algebra(*x.algebra());
  return n.gauge(mu(x));
}

/// Trace-weighted Hilbert-Schmidt norm sqrt(tau(x* x)).
inline double l2_norm(const Element& x) { return std::sqrt(std::max(0.0, trace(x.adjoint() * x).real())); }

namespace detail {

/// Atom data of an element in algebra order: singular values, weights and
/// the block SVD factors.
struct AtomData {
  RealVec s;
  RealVec w;
  std::vector<int> block;
  std::vector<Mat> U, V;
};

inline AtomData atom_data(const Element& x) {
  AtomData d;
  const auto& alg = *x.algebra();
  const int m = alg.atom_count();
  d.s.resize(m);
  d.w.resize(m);
  int k = 0;
  for (int i = 0; i < alg.num_blocks(); ++i) {
    Eigen::JacobiSVD<Mat> svd(x.block(i), Eigen::ComputeFullU | Eigen::ComputeFullV);
    d.U.push_back(svd.matrixU());
    d.V.push_back(svd.matrixV());
    for (int j = 0; j < alg.dim(i); ++j, ++k) {
      d.s(k) = svd.singularValues()(j);
      d.w(k) = alg.weight(i);
      d.block.push_back(i);
    }
  }
  return d;
}

/// Maximize g . v over {v_1 >= ... >= v_m >= 0, l_j . v <= 1} by vertex
/// enumeration (m + J constraints, J <= 2).
inline double cone_lp(const RealVec& g, const std::vector<RealVec>& pieces) {
  const auto m = g.size();
  if (m == 0) return 0.0;
  const auto J = static_cast<Eigen::Index>(pieces.size());
  const Eigen::Index total = m + J;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(total, m);
  RealVec b = RealVec::Zero(total);
  for (Eigen::Index k = 0; k + 1 < m; ++k) {
    A(k, k) = -1.0;
    A(k, k + 1) = 1.0;
  }
  A(m - 1, m - 1) = -1.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    A.row(m + j) = pieces[static_cast<std::size_t>(j)].transpose();
    b(m + j) = 1.0;
  }
  double best = 0.0;
  // Choose which J constraints are left inactive.
  std::vector<int> drop(static_cast<std::size_t>(J));
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == J) {
      Eigen::MatrixXd S(m, m);
      RealVec r(m);
      Eigen::Index row = 0;
      for (Eigen::Index c = 0; c < total; ++c) {
        if (std::find(drop.begin(), drop.end(), static_cast<int>(c)) != drop.end()) continue;
        S.row(row) = A.row(c);
        r(row) = b(c);
        ++row;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
      if (lu.rank() < m) return;
      const RealVec v = lu.solve(r);
      const RealVec slack = A * v - b;
      if (slack.maxCoeff() > 1e-12 * (1.0 + v.cwiseAbs().maxCoeff())) return;
      best = std::max(best, g.dot(v));
      return;
    }
    for (int c = start; c < total; ++c) {
      drop[static_cast<std::size_t>(pos)] = c;
      rec(pos + 1, c + 1);
    }
  };
  rec(0, 0);
  return best;
}

/// Enumerate interleavings of per-block sorted atom lists (multiset
/// permutations of block labels), calling f with each global order.
inline void for_each_interleaving(const std::vector<std::vector<int>>& lists, std::size_t cap,
                                  const std::function<void(const std::vector<int>&)>& f) {
  std::vector<std::size_t> pos(lists.size(), 0);
  std::vector<int> order;
  std::size_t total = 0, seen = 0;
  for (const auto& l : lists) total += l.size();
  std::function<void()> rec = [&]() {
    if (seen >= cap) return;
    if (order.size() == total) {
      ++seen;
      f(order);
      return;
    }
    for (std::size_t b = 0; b < lists.size(); ++b) {
      if (pos[b] == lists[b].size()) continue;
      order.push_back(lists[b][pos[b]++]);
      rec();
      --pos[b];
      order.pop_back();
    }
  };
  rec();
}

/// max g . c - N(c)^2 / 2 over c > 0 by damped Newton; returns the ratio
/// g . c / N(c) at the maximizer, which equals the dual norm of g.
inline double smooth_dual(const SymmetricNorm& n, const RealVec& g, const RealVec& w) {
  RealVec c = g.cwiseQuotient(w);
  c /= n.atom_norm(c, w);
  auto objective = [&](const RealVec& v) {
    const double nv = n.atom_norm(v, w);
    return g.dot(v) - 0.5 * nv * nv;
  };
  RealVec grad;
  Eigen::MatrixXd hess;
  for (int it = 0; it < 200; ++it) {
    n.half_square_derivatives(c, w, grad, hess);
    const RealVec resid = g - grad;
    if (resid.norm() <= 1e-15 * g.norm()) break;
    RealVec step = hess.ldlt().solve(resid);
    double t = 1.0;
    const double f0 = objective(c);
    RealVec next = c + step;
    while (t > 1e-12) {
      next = c + t * step;
      const bool inside = n.kind() == NormKind::CustomTwoAtom ? (next.array() >= 0.0).all() : (next.array() > 0.0).all();
      if (inside && objective(next) >= f0 - 1e-15 * std::abs(f0)) break;
      t *= 0.5;
    }
    if (t <= 1e-12) break;
    if ((next - c).norm() <= 1e-16 * c.norm()) {
      c = next;
      break;
    }
    c = next;
  }
  return g.dot(c) / n.atom_norm(c, w);
}

}  // namespace detail

/// Koethe dual norm sup { |tau(x y)| : ||x||_N <= 1 }.
///
/// By von Neumann's trace inequality the supremum is attained at elements
/// sharing the singular vectors of y, which reduces it to the atom program
///   max sum_a w_a s_a(y) c_a  subject to  N(c) <= 1, c >= 0.
/// Smooth gauges solve it by Newton's method, polyhedral ones by exact
/// vertex enumeration on every ordering cone.
inline double dual_norm(const Element& y, const SymmetricNorm& n) {
  n.check_algebra(*y.algebra());
  const auto d = detail::atom_data(y);
  const double smax = d.s.size() ? d.s.maxCoeff() : 0.0;
  if (smax == 0.0) return 0.0;
  // Drop zero atoms: their objective coefficient vanishes and N is monotone.
  std::vector<int> keep;
  for (Eigen::Index k = 0; k < d.s.size(); ++k)
    if (d.s(k) > 1e-15 * smax || n.kind() == NormKind::CustomTwoAtom) keep.push_back(static_cast<int>(k));

  if (n.smooth()) {
    if (n.kind() == NormKind::CustomTwoAtom) {
      RealVec g = d.w.cwiseProduct(d.s);
      return detail::smooth_dual(n, g, d.w);
    }
    RealVec g(static_cast<Eigen::Index>(keep.size())), w(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      g(static_cast<Eigen::Index>(k)) = d.w(keep[k]) * d.s(keep[k]);
      w(static_cast<Eigen::Index>(k)) = d.w(keep[k]);
    }
    return detail::smooth_dual(n, g, w);
  }

  // Per-block lists sorted by decreasing singular value.
  const auto& alg = *y.algebra();
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(alg.num_blocks()));
  for (int k : keep) lists[static_cast<std::size_t>(d.block[static_cast<std::size_t>(k)])].push_back(k);
  for (auto& l : lists)
    std::stable_sort(l.begin(), l.end(), [&](int a, int b) { return d.s(a) > d.s(b); });

  auto solve_order = [&](const std::vector<int>& order) {
    const auto m = static_cast<Eigen::Index>(order.size());
    RealVec g(m), lens(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const int a = order[static_cast<std::size_t>(k)];
      g(k) = d.w(a) * d.s(a);
      lens(k) = d.w(a);
    }
    return detail::cone_lp(g, n.cone_pieces(lens));
  };

  if (alg.equal_atoms()) {
    // Equal lengths: the similarly ordered cone is optimal.
    std::vector<int> order = keep;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d.s(a) > d.s(b); });
    return solve_order(order);
  }
  double best = 0.0;
  detail::for_each_interleaving(lists, 200000, [&](const std::vector<int>& order) { best = std::max(best, solve_order(order)); });
  return best;
}

namespace detail {

/// Unit dual vector d (in atom coordinates) with sum w_a d_a s_a = N(s):
/// the subgradient of N at s divided by the atom weights, averaged over
/// ties and set to zero on the kernel.
inline RealVec subgradient(const SymmetricNorm& n, const RealVec& s, const RealVec& w) {
  const auto m = s.size();
  RealVec d = RealVec::Zero(m);
  const double smax = m ? s.maxCoeff() : 0.0;
  if (smax == 0.0) return d;
  if (n.smooth()) {
    const RealVec grad = n.atom_gradient(s, w);
    d = grad.cwiseQuotient(w);
  } else {
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s(a) > s(b); });
    RealVec v(m), lens(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      v(k) = s(order[static_cast<std::size_t>(k)]);
      lens(k) = w(order[static_cast<std::size_t>(k)]);
    }
    const auto pieces = n.cone_pieces(lens);
    double top = -kInf;
    for (const auto& l : pieces) top = std::max(top, l.dot(v));
    RealVec acc = RealVec::Zero(m);
    int active = 0;
    for (const auto& l : pieces)
      if (l.dot(v) >= top - 1e-12 * std::max(1.0, std::abs(top))) {
        acc += l;
        ++active;
      }
    acc /= static_cast<double>(active);
    for (Eigen::Index k = 0; k < m; ++k) d(order[static_cast<std::size_t>(k)]) = acc(k) / lens(k);
  }
  const double eps = 1e-12 * smax;
  for (Eigen::Index k = 0; k < m; ++k)
    if (s(k) <= eps) d(k) = 0.0;
  // Equalize over groups of tied singular values (weighted mean).
  std::vector<bool> done(static_cast<std::size_t>(m), false);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (done[static_cast<std::size_t>(k)] || s(k) <= eps) continue;
    double num = 0.0, den = 0.0;
    std::vector<Eigen::Index> group;
    for (Eigen::Index j = k; j < m; ++j)
      if (!done[static_cast<std::size_t>(j)] && std::abs(s(j) - s(k)) <= eps) {
        group.push_back(j);
        num += w(j) * d(j);
        den += w(j);
      }
    for (auto j : group) {
      d(j) = num / den;
      done[static_cast<std::size_t>(j)] = true;
    }
  }
  return d;
}

}  // namespace detail

/// Support functional of x realized through trace duality: returns y with
/// tau(x y) = ||x||^2 and dual_norm(y) = ||x||.
///
/// y = ||x|| V diag(d) U* per block, where x = U diag(s) V* and d is the
/// symmetric unit subgradient of the gauge at the singular values.
inline Element support_functional(const Element& x, const SymmetricNorm& n) {
  n.check_algebra(*x.algebra());
  const auto ad = detail::atom_data(x);
  if (ad.s.size() == 0 || ad.s.maxCoeff() == 0.0) throw DomainError("support functional of the zero element");
  const double nx = n.atom_norm(ad.s, ad.w);
  const RealVec dv = detail::subgradient(n, ad.s, ad.w);
  const auto& alg = *x.algebra();
  std::vector<Mat> blocks;
  int k = 0;
  for (int i = 0; i < alg.num_blocks(); ++i) {
    const int dim = alg.dim(i);
    Eigen::VectorXcd diag(dim);
    for (int j = 0; j < dim; ++j, ++k) diag(j) = dv(k);
    const auto ui = static_cast<std::size_t>(i);
    blocks.push_back(nx * ad.V[ui] * diag.asDiagonal() * ad.U[ui].adjoint());
  }
  return Element(x.algebra(), std::move(blocks));
}

/// Semi-inner product <x, y> = tau(x f_y) with f_y the support functional of y.
inline cplx sip(const Element& x, const Element& y, const SymmetricNorm& n) {
  return trace(x * support_functional(y, n));
}

/// Decide whether N = lambda ||.||_2 on the algebra by fitting lambda on
/// 64 random elements; true iff the max relative deviation is below 1e-8.
inline bool proportional_to_l2(const SymmetricNorm& n, const AlgebraPtr& alg, std::uint64_t seed = 7,
                               int samples = 64) {
  n.check_algebra(*alg);
  Rng rng = make_rng(seed, 0x1234);
  std::vector<double> r;
  for (int k = 0; k < samples; ++k) {
    const Element x = random_element(alg, rng);
    r.push_back(norm(x, n) / l2_norm(x));
  }
  const double lambda = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  double dev = 0.0;
  for (double v : r) dev = std::max(dev, std::abs(v - lambda) / lambda);
  return dev < 1e-8;
}

}  // namespace symop
