#pragma once

// Generalized singular value functions mu(t; x), distribution functions and
// submajorization for weighted block algebras.
//
// Every singular value of block i occupies an interval of length w_i in the
// decreasing rearrangement, so mu(x) is a decreasing step function on
// (0, tau(1)].

#include <algorithm>
#include <cmath>
#include <vector>

#include "symop/algebra.hpp"

namespace symop {

struct Step {
  double value;
  double length;
};

class StepFunction {
 public:
  StepFunction() = default;

  /// Decreasing rearrangement of (value, length) atoms. Ties keep input
  /// order. Values within `merge_tol * max value` of each other are merged
  /// (length-weighted) and values below that threshold are dropped.
  static StepFunction rearrange(std::vector<Step> atoms, double merge_tol = 1e-12) {
    for (const auto& a : atoms)
      if (a.value < 0.0 || !(a.length > 0.0)) throw DomainError("step atoms need value >= 0 and length > 0");
    std::stable_sort(atoms.begin(), atoms.end(), [](const Step& a, const Step& b) { return a.value > b.value; });
    StepFunction f;
    if (atoms.empty()) return f;
    const double vmax = atoms.front().value;
    const double eps = merge_tol * vmax;
    for (const auto& a : atoms) {
      if (a.value <= eps) break;
      if (!f.steps_.empty() && f.steps_.back().value - a.value <= eps) {
        auto& last = f.steps_.back();
        const double len = last.length + a.length;
        last.value = (last.value * last.length + a.value * a.length) / len;
        last.length = len;
      } else {
        f.steps_.push_back(a);
      }
    }
    return f;
  }

  const std::vector<Step>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }

  /// Length of the support {mu > 0}.
  double support() const {
    double s = 0.0;
    for (const auto& st : steps_) s += st.length;
    return s;
  }
  double sup() const { return steps_.empty() ? 0.0 : steps_.front().value; }

  /// Right-continuous evaluation: value k on [T_{k-1}, T_k).
  double operator()(double t) const {
    if (t < 0.0) return sup();
    double end = 0.0;
    for (const auto& st : steps_) {
      end += st.length;
      if (t < end) return st.value;
    }
    return 0.0;
  }

  /// Cumulative breakpoints T_1 < T_2 < ... (ends of the steps).
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    double end = 0.0;
    for (const auto& st : steps_) {
      end += st.length;
      out.push_back(end);
    }
    return out;
  }

  /// \int_0^t mu(s) ds.
  double integral(double t) const {
    double acc = 0.0, start = 0.0;
    for (const auto& st : steps_) {
      if (t <= start) break;
      acc += st.value * (std::min(t, start + st.length) - start);
      start += st.length;
    }
    return acc;
  }
  double integral() const {
    double acc = 0.0;
    for (const auto& st : steps_) acc += st.value * st.length;
    return acc;
  }

  /// Measure of {mu > s}.
  double distribution(double s) const {
    double acc = 0.0;
    for (const auto& st : steps_)
      if (st.value > s) acc += st.length;
    return acc;
  }

  StepFunction scaled(double c) const {
    if (c < 0.0) throw DomainError("step functions scale by nonnegative factors");
    StepFunction f;
    if (c == 0.0) return f;
    f.steps_ = steps_;
    for (auto& st : f.steps_) st.value *= c;
    return f;
  }

  /// Same breakpoints and values up to `tol` (relative to the larger sup).
  bool approx_equal(const StepFunction& o, double tol = 1e-12) const {
    if (steps_.size() != o.steps_.size()) return false;
    const double scale = std::max({1.0, sup(), o.sup()});
    for (std::size_t k = 0; k < steps_.size(); ++k) {
      if (std::abs(steps_[k].value - o.steps_[k].value) > tol * scale) return false;
      if (std::abs(steps_[k].length - o.steps_[k].length) > tol * std::max(1.0, steps_[k].length)) return false;
    }
    return true;
  }

 private:
  std::vector<Step> steps_;
};

/// Singular values of every block tagged with the block weight, in the
/// stable order (descending value, then block, then position in block).
struct Atom {
  double value;
  double weight;
  int block;
  int index;  // position inside the block's singular value list
};

inline std::vector<Atom> singular_atoms(const Element& x) {
  std::vector<Atom> atoms;
  const auto& alg = *x.algebra();
  for (int i = 0; i < alg.num_blocks(); ++i) {
    Eigen::JacobiSVD<Mat> svd(x.block(i));
    const auto& s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k) atoms.push_back({s(k), alg.weight(i), i, static_cast<int>(k)});
  }
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value > b.value; });
  return atoms;
}

/// mu(x): decreasing rearrangement of all singular values with lengths equal
/// to the block weights.
inline StepFunction mu(const Element& x) {
  std::vector<Step> steps;
  for (const auto& a : singular_atoms(x)) steps.push_back({a.value, a.weight});
  return StepFunction::rearrange(std::move(steps));
}

/// d_x(t) = tau(e^x((t, inf))) for self-adjoint x.
inline double distribution(const Element& x, double t, double tol = 1e-10) {
  const auto eig = eigen_blocks(x, tol);
  const auto& alg = *x.algebra();
  double acc = 0.0;
  for (int i = 0; i < alg.num_blocks(); ++i)
    for (Eigen::Index k = 0; k < eig[static_cast<std::size_t>(i)].values.size(); ++k)
      if (eig[static_cast<std::size_t>(i)].values(k) > t) acc += alg.weight(i);
  return acc;
}

/// Pointwise sum of two decreasing step functions (again decreasing).
inline StepFunction add(const StepFunction& f, const StepFunction& g) {
  auto bps = f.breakpoints();
  const auto gb = g.breakpoints();
  bps.insert(bps.end(), gb.begin(), gb.end());
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  std::vector<Step> steps;
  double start = 0.0;
  for (double b : bps) {
    if (b <= start) continue;
    const double mid = 0.5 * (start + b);
    steps.push_back({f(mid) + g(mid), b - start});
    start = b;
  }
  return StepFunction::rearrange(std::move(steps), 0.0);
}

/// \int_0^inf f g, both decreasing (the Hardy-Littlewood bound).
inline double integral_product(const StepFunction& f, const StepFunction& g) {
  auto bps = f.breakpoints();
  const auto gb = g.breakpoints();
  bps.insert(bps.end(), gb.begin(), gb.end());
  std::sort(bps.begin(), bps.end());
  double acc = 0.0, start = 0.0;
  for (double b : bps) {
    if (b <= start) continue;
    const double mid = 0.5 * (start + b);
    acc += f(mid) * g(mid) * (b - start);
    start = b;
  }
  return acc;
}

/// y is submajorized by x: \int_0^t y <= \int_0^t x for all t. Both partial
/// integrals are piecewise linear, so checking the union of breakpoints
/// suffices.
inline bool submajorized(const StepFunction& y, const StepFunction& x, double tol = 1e-12) {
  auto bps = x.breakpoints();
  const auto yb = y.breakpoints();
  bps.insert(bps.end(), yb.begin(), yb.end());
  const double scale = std::max({1.0, x.integral(), y.integral()});
  return std::all_of(bps.begin(), bps.end(),
                     [&](double t) { return y.integral(t) <= x.integral(t) + tol * scale; });
}

/// True iff y is submajorized by x.
inline bool submajorizes(const Element& x, const Element& y, double tol = 1e-12) {
  x.check_same(y);
  return submajorized(mu(y), mu(x), tol);
}

}  // namespace symop
