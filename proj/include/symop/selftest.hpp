#pragma once

// The acceptance suite: eight end-to-end checks with runtime budgets,
// shared by the acceptance test binary and `symop selftest`.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "symop/central.hpp"
#include "symop/hermitian.hpp"
#include "symop/isometry.hpp"

namespace symop::selftest {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool property = false;  // the mathematical check
  double seconds = 0.0;
  double budget = 0.0;
  std::string detail;

  bool within_budget() const { return seconds < budget; }
  bool passed() const { return property && within_budget(); }
};

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// The paper's two-atom space and its explicit operators.
inline AlgebraPtr exam_algebra() { return TracialAlgebra::make({{1, 1.0}, {1, 2.0}}); }

inline SuperOperator exam_isometry() {
  const cplx I(0.0, 1.0);
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);
  Mat m(2, 2);
  m << -I / r2, r3 / r2, I / (r2 * r3), 1.0 / r2;
  return SuperOperator::dense(exam_algebra(), m);
}

inline SuperOperator exam_hermitian() {
  const cplx I(0.0, 1.0);
  Mat m(2, 2);
  m << 1.0, I * std::sqrt(3.0), -I / std::sqrt(3.0), 1.0;
  return SuperOperator::dense(exam_algebra(), m);
}

class Suite {
 public:
  explicit Suite(SamplingOptions opt = {}) : opt_(opt) {}

  std::vector<CriterionResult> run_all() {
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 8; ++id) out.push_back(run(id));
    return out;
  }

  CriterionResult run(int id) {
    switch (id) {
      case 1: return timed(1, "example isometry is non-elementary", 1.0, [this](auto& r) { c1(r); });
      case 2: return timed(2, "example hermitian is not a multiplication", 1.0, [this](auto& r) { c2(r); });
      case 3: return timed(3, "hermitian round trip", 30.0, [this](auto& r) { c3(r); });
      case 4: return timed(4, "L2 sharpness of the transpose", 1.0, [this](auto& r) { c4(r); });
      case 5: return timed(5, "isometry factorization soundness", 60.0, [this](auto& r) { c5(r); });
      case 6: return timed(6, "central decomposition theorem", 10.0, [this](auto& r) { c6(r); });
      case 7: return timed(7, "structural lemmas on hermitian operators", 60.0, [this](auto& r) { c7(r); });
      case 8: return timed(8, "negative controls", 30.0, [this](auto& r) { c8(r); });
      default: throw DomainError("selftest: criteria are numbered 1 to 8");
    }
  }

 private:
  struct Instance {
    AlgebraPtr alg;
    SymmetricNorm norm;
    Element a, b;
    SuperOperator t;
  };

  template <typename F>
  CriterionResult timed(int id, const char* title, double budget, F&& body) {
    CriterionResult r;
    r.id = id;
    r.title = title;
    r.budget = budget;
    const auto start = std::chrono::steady_clock::now();
    try {
      body(r);
    } catch (const std::exception& e) {
      r.property = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }

  CertifyOptions certify_opts(std::uint64_t shard) const { return {{opt_.seed + shard, opt_.samples}, {}}; }

  /// 100 structured (a, b) on (M4, Lp(3)) and 100 on M2 + M3 with a Lorentz gauge.
  const std::vector<Instance>& round_trip_instances() {
    if (!instances_.empty()) return instances_;
    const auto m4 = TracialAlgebra::make({{4, 1.0}});
    const auto m23 = TracialAlgebra::make({{2, 1.0}, {3, 1.0}});
    Rng rng = make_rng(opt_.seed, 300);
    for (int s = 0; s < 200; ++s) {
      const bool first = s < 100;
      const auto& alg = first ? m4 : m23;
      Element a = random_self_adjoint(alg, rng), b = random_self_adjoint(alg, rng);
      auto t = SuperOperator::structured(a, b);
      instances_.push_back({alg, first ? SymmetricNorm::lp(3.0) : SymmetricNorm::lorentz(0.5), std::move(a),
                            std::move(b), std::move(t)});
    }
    return instances_;
  }

  void c1(CriterionResult& r) {
    const auto t = exam_isometry();
    const auto n = SymmetricNorm::custom_two_atom(3.0);
    const auto iso = is_isometry(t, n, n, {opt_.seed, 1000}, 1e-10);
    // Independent oracle: ||x||^2 = x* W x with W = diag(1, 3), so T is an
    // isometry iff T* W T = W.
    Mat w = Mat::Zero(2, 2);
    w(0, 0) = 1.0;
    w(1, 1) = 3.0;
    const double gram = (t.matrix().adjoint() * w * t.matrix() - w).norm();
    const auto el = is_elementary(t);
    r.property = iso.isometry && iso.defect < 1e-10 && gram < 1e-12 && !el.elementary;
    r.detail = "isometry defect " + fmt("%.3e", iso.defect) + ", gram defect " + fmt("%.3e", gram) +
               ", elementary " + (el.elementary ? "yes" : "no") + " (best defect " + fmt("%.3f", el.best_defect) + ")";
  }

  void c2(CriterionResult& r) {
    const auto t = exam_hermitian();
    const auto n = SymmetricNorm::custom_two_atom(3.0);
    const auto c = certify(t, n, certify_opts(2));
    // Independent oracle: hermitian for <x, y> = y* W x iff W T = T* W.
    Mat w = Mat::Zero(2, 2);
    w(0, 0) = 1.0;
    w(1, 1) = 3.0;
    const double sym = (w * t.matrix() - t.matrix().adjoint() * w).norm();
    const double fit = multiplier_fit_residual(t);
    r.property = c.verdict == Verdict::Hermitian && c.exp_defect < 1e-8 && c.max_imag_numrange < 1e-8 && sym < 1e-12 &&
                 fit > 0.1;
    r.detail = std::string("verdict ") + to_string(c.verdict) + ", exp defect " + fmt("%.3e", c.exp_defect) +
               ", numrange " + fmt("%.3e", c.max_imag_numrange) + ", multiplier fit residual " + fmt("%.4f", fit);
  }

  void c3(CriterionResult& r) {
    const auto& inst = round_trip_instances();
    int ok = 0;
    double worst_res = 0.0, worst_gap = 0.0, worst_exp = 0.0, worst_nr = 0.0;
    certified_.clear();
    for (std::size_t s = 0; s < inst.size(); ++s) {
      const auto& in = inst[s];
      const auto c = certify(in.t, in.norm, certify_opts(1000 + s));
      worst_exp = std::max(worst_exp, c.exp_defect);
      worst_nr = std::max(worst_nr, c.max_imag_numrange);
      if (c.verdict != Verdict::Hermitian || !c.decomposition) continue;
      certified_.push_back(s);
      const auto& d = *c.decomposition;
      const Element da = d.a - in.a;
      const double gap = (da - da.scalar_part()).norm_inf();
      worst_res = std::max(worst_res, d.residual);
      worst_gap = std::max(worst_gap, gap);
      if (d.residual < 1e-9 && gap < 1e-8) ++ok;
    }
    r.property = ok == static_cast<int>(inst.size());
    r.detail = std::to_string(ok) + "/" + std::to_string(inst.size()) + " recovered; max exp defect " +
               fmt("%.2e", worst_exp) + ", max numrange " + fmt("%.2e", worst_nr) + ", max residual " +
               fmt("%.2e", worst_res) + ", max non-central gap " + fmt("%.2e", worst_gap);
  }

  void c4(CriterionResult& r) {
    const auto alg = TracialAlgebra::make({{2, 1.0}});
    const auto c = certify(SuperOperator::transpose_map(alg), SymmetricNorm::lp(2.0), certify_opts(4));
    r.property = c.verdict == Verdict::Hermitian && c.fit_residual > 0.5 && !c.decomposition && c.l2_exception;
    r.detail = std::string("verdict ") + to_string(c.verdict) + ", decomposition residual " + fmt("%.4f", c.fit_residual);
  }

  void c5(CriterionResult& r) {
    const auto alg = TracialAlgebra::make({{3, 1.0}});
    const auto n = SymmetricNorm::lp(1.0);
    Rng rng = make_rng(opt_.seed, 500);
    int ok = 0;
    double worst_res = 0.0, worst_unit = 0.0;
    for (int s = 0; s < 50; ++s) {
      const bool tr = s % 2 == 1;
      const Element u = random_unitary(alg, rng), v = random_unitary(alg, rng);
      const auto t = SuperOperator::from_map(alg, [&](const Element& x) { return u * v * (tr ? x.transpose() : x) * v.adjoint(); });
      const auto iso = is_isometry(t, n, n, {opt_.seed + static_cast<std::uint64_t>(s), 32}, 1e-10);
      const auto f = factor_isometry(t);
      // Straight: T(x) = (uv) x (uv)* u, so J = Ad(uv) and A = u.
      // Transpose: T(x) = u (v x^T v*), so J = Ad(v) o transpose and B = u.
      const Element& mult = tr ? f.b : f.a;
      const double unit = (mult.adjoint() * mult - Element::identity(alg)).norm_inf();
      const double match = (mult - u).norm_inf();
      const Mat expect_v = tr ? v.block(0) : Mat(u.block(0) * v.block(0));
      const cplx ph = (expect_v.adjoint() * f.j.v[0]).trace();
      const double v_err = (f.j.v[0] - (ph / std::abs(ph)) * expect_v).norm();
      worst_res = std::max(worst_res, f.residual);
      worst_unit = std::max(worst_unit, unit);
      const bool good = iso.isometry && f.residual < 1e-9 && f.j.transpose[0] == tr && f.z[0] == !tr && unit < 1e-10 &&
                        match < 1e-9 && v_err < 1e-9 && f.trace_preserving;
      if (good) ++ok;
    }
    r.property = ok == 50;
    r.detail = std::to_string(ok) + "/50 factored; max residual " + fmt("%.2e", worst_res) + ", max multiplier unitarity defect " +
               fmt("%.2e", worst_unit);
  }

  void c6(CriterionResult& r) {
    const std::vector<AlgebraPtr> algs{TracialAlgebra::make({{2, 1.0}, {3, 1.0}, {2, 2.0}}),
                                       TracialAlgebra::make({{3, 1.0}, {1, 1.0}, {2, 0.5}})};
    Rng rng = make_rng(opt_.seed, 600);
    std::normal_distribution<double> g;
    std::bernoulli_distribution coin(0.5);
    int ok = 0;
    double worst = 0.0;
    for (int s = 0; s < 200; ++s) {
      const auto& alg = algs[static_cast<std::size_t>(s % 2)];
      Element a = random_self_adjoint(alg, rng), b = random_self_adjoint(alg, rng);
      Element e = Element::zero(alg), f = Element::zero(alg);
      for (int i = 0; i < 3; ++i) {
        const auto d = alg->dim(i);
        const double c = g(rng);
        if (coin(rng)) {
          b.block(i) = c * Mat::Identity(d, d);
          e.block(i) = c * a.block(i);
        } else {
          a.block(i) = c * Mat::Identity(d, d);
          f.block(i) = c * b.block(i);
        }
      }
      const auto cd = central_decomposition(a, b, e, f);
      worst = std::max(worst, cd.max_defect());
      // Brute force over all central projections; the admissible set is a
      // product over blocks, and ties resolve to 1, i.e. its largest member.
      CentralProjection best = CentralProjection::zeros(3);
      int best_count = -1;
      for (unsigned long m = 0; m < 8; ++m) {
        const auto z = CentralProjection::from_mask(m, 3);
        const auto w = z.complement();
        auto central = [](const Element& x) { return (x - x.scalar_part()).norm_inf() < 1e-12; };
        if (!(central(a.times(w)) && central(e.times(w)) && central(b.times(z)) && central(f.times(z)))) continue;
        const int cnt = __builtin_popcountl(m);
        if (cnt > best_count) {
          best_count = cnt;
          best = z;
        }
      }
      if (cd.max_defect() < 1e-12 && best_count >= 0 && best == cd.z) ++ok;
    }
    r.property = ok == 200;
    r.detail = std::to_string(ok) + "/200 agree with brute force; max centrality defect " + fmt("%.2e", worst);
  }

  void c7(CriterionResult& r) {
    const auto& inst = round_trip_instances();
    if (certified_.empty()) {
      for (std::size_t s = 0; s < inst.size(); ++s)
        if (certify(inst[s].t, inst[s].norm, certify_opts(1000 + s)).verdict == Verdict::Hermitian) certified_.push_back(s);
    }
    Rng rng = make_rng(opt_.seed, 700);
    std::uniform_int_distribution<int> pick(0, 2);
    double worst_orth = 0.0, worst_corner = 0.0, worst_ratio = 0.0;
    for (std::size_t s : certified_) {
      const auto& in = inst[s];
      const auto& alg = in.alg;
      for (int k = 0; k < 100; ++k) {
        // Disjoint partial isometries from shared singular frames.
        const Element u = random_unitary(alg, rng), v = random_unitary(alg, rng);
        Element d1 = Element::zero(alg), d2 = Element::zero(alg);
        bool any = false;
        for (int i = 0; i < alg->num_blocks(); ++i)
          for (int j = 0; j < alg->dim(i); ++j) {
            const int side = pick(rng);
            if (side == 0 || (!any && i == alg->num_blocks() - 1 && j == alg->dim(i) - 1)) {
              d1.block(i)(j, j) = 1.0;
              any = true;
            } else if (side == 1) {
              d2.block(i)(j, j) = 1.0;
            }
          }
        worst_orth = std::max(worst_orth, orthogonality_defect(in.t, u * d1 * v.adjoint(), u * d2 * v.adjoint()));
        // Rank-deficient x so that both corners are nontrivial.
        Element x = Element::zero(alg);
        for (int i = 0; i < alg->num_blocks(); ++i) {
          const int d = alg->dim(i);
          const int rank = std::uniform_int_distribution<int>(0, d - 1)(rng);
          x.block(i) = random_gaussian_matrix(d, rank, rng) * random_gaussian_matrix(rank, d, rng);
        }
        worst_corner = std::max(worst_corner, corner_defect(in.t, x));
      }
      worst_ratio = std::max(worst_ratio, projection_bound_check(in.t, in.norm, {opt_.seed + s, 16}).ratio);
    }
    r.property = !certified_.empty() && worst_orth < 1e-9 && worst_corner < 1e-9 && worst_ratio <= 3.0;
    r.detail = std::to_string(certified_.size()) + " operators; max orthogonality defect " + fmt("%.2e", worst_orth) +
               ", max corner defect " + fmt("%.2e", worst_corner) + ", max projection ratio " + fmt("%.3f", worst_ratio);
  }

  void c8(CriterionResult& r) {
    const auto& inst = round_trip_instances();
    Rng rng = make_rng(opt_.seed, 800);
    int ok = 0;
    double weakest = kInf;
    for (int s = 0; s < 100; ++s) {
      const auto& in = inst[static_cast<std::size_t>(s % 2 == 0 ? s / 2 : 100 + s / 2)];
      const int n = in.alg->coord_dim();
      const auto t = in.t + cplx(1e-2) * SuperOperator::dense(in.alg, random_gaussian_matrix(n, n, rng));
      const auto c = certify(t, in.norm, certify_opts(2000 + static_cast<std::uint64_t>(s)));
      const double top = std::max(c.exp_defect, c.max_imag_numrange);
      weakest = std::min(weakest, top);
      if (top > 1e-3 && c.verdict != Verdict::Hermitian) ++ok;
    }
    r.property = ok == 100;
    r.detail = std::to_string(ok) + "/100 rejected; weakest detection " + fmt("%.3e", weakest);
  }

  SamplingOptions opt_;
  std::vector<Instance> instances_;
  std::vector<std::size_t> certified_;
};

}  // namespace symop::selftest
