#pragma once

// Finite tracial von Neumann algebras: weighted direct sums of full matrix
// blocks M_{d_1} (+) ... (+) M_{d_k} with trace tau(x) = sum_i w_i tr(x_i).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "symop/config.hpp"
#include "symop/errors.hpp"

namespace symop {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;

struct BlockSpec {
  int dim = 1;
  double weight = 1.0;  // trace of a minimal projection in this block
};

class TracialAlgebra;
using AlgebraPtr = std::shared_ptr<const TracialAlgebra>;

class TracialAlgebra {
 public:
  static AlgebraPtr make(std::vector<BlockSpec> blocks) {
    return AlgebraPtr(new TracialAlgebra(std::move(blocks)));
  }

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  int dim(int i) const { return blocks_[static_cast<std::size_t>(i)].dim; }
  double weight(int i) const { return blocks_[static_cast<std::size_t>(i)].weight; }

  /// Offset of block i in the coordinate vector (blocks stacked, row-major).
  int offset(int i) const { return offsets_[static_cast<std::size_t>(i)]; }
  /// Complex dimension of the algebra as a vector space.
  int coord_dim() const { return offsets_.back(); }
  /// Number of atoms in a maximal abelian subalgebra (sum of dims).
  int atom_count() const {
    int n = 0;
    for (const auto& b : blocks_) n += b.dim;
    return n;
  }

  double total_trace() const {
    double t = 0.0;
    for (const auto& b : blocks_) t += b.weight * b.dim;
    return t;
  }

  /// All atoms carry the same trace.
  bool equal_atoms() const {
    return std::all_of(blocks_.begin(), blocks_.end(),
                       [&](const BlockSpec& b) { return b.weight == blocks_.front().weight; });
  }
  /// Atoms are normalized to trace one.
  bool unit_atoms() const {
    return std::all_of(blocks_.begin(), blocks_.end(),
                       [](const BlockSpec& b) { return b.weight == 1.0; });
  }
  bool abelian() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const BlockSpec& b) { return b.dim == 1; });
  }

  bool same_shape(const TracialAlgebra& other) const {
    if (other.blocks_.size() != blocks_.size()) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (blocks_[i].dim != other.blocks_[i].dim || blocks_[i].weight != other.blocks_[i].weight)
        return false;
    }
    return true;
  }

  /// (block, row, col) of a coordinate index.
  struct Coord {
    int block, row, col;
  };
  Coord coord(int k) const {
    int i = 0;
    while (k >= offsets_[static_cast<std::size_t>(i) + 1]) ++i;
    const int local = k - offset(i);
    return {i, local / dim(i), local % dim(i)};
  }

 private:
  explicit TracialAlgebra(std::vector<BlockSpec> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw StructuralError("algebra needs at least one block");
    offsets_.push_back(0);
    for (const auto& b : blocks_) {
      if (b.dim < 1) throw StructuralError("block dimension must be >= 1");
      if (!(b.weight > 0.0) || !std::isfinite(b.weight))
        throw StructuralError("block weight must be positive and finite");
      offsets_.push_back(offsets_.back() + b.dim * b.dim);
    }
  }

  std::vector<BlockSpec> blocks_;
  std::vector<int> offsets_;
};

/// Central projection of a block algebra: one bit per block.
class CentralProjection {
 public:
  CentralProjection() = default;
  explicit CentralProjection(std::vector<bool> bits) : bits_(std::move(bits)) {}
  static CentralProjection zeros(int n) { return CentralProjection(std::vector<bool>(static_cast<std::size_t>(n), false)); }
  static CentralProjection ones(int n) { return CentralProjection(std::vector<bool>(static_cast<std::size_t>(n), true)); }
  /// Bit i of `mask` (block 0 = most significant) for n blocks.
  static CentralProjection from_mask(unsigned long mask, int n) {
    std::vector<bool> bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bits[static_cast<std::size_t>(i)] = (mask >> (n - 1 - i)) & 1UL;
    return CentralProjection(std::move(bits));
  }

  int size() const { return static_cast<int>(bits_.size()); }
  bool operator[](int i) const { return bits_[static_cast<std::size_t>(i)]; }
  void set(int i, bool v) { bits_[static_cast<std::size_t>(i)] = v; }
  const std::vector<bool>& bits() const { return bits_; }

  CentralProjection complement() const {
    std::vector<bool> out(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = !bits_[i];
    return CentralProjection(std::move(out));
  }
  CentralProjection operator&(const CentralProjection& o) const {
    std::vector<bool> out(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] && o.bits_[i];
    return CentralProjection(std::move(out));
  }
  CentralProjection operator|(const CentralProjection& o) const {
    std::vector<bool> out(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = bits_[i] || o.bits_[i];
    return CentralProjection(std::move(out));
  }
  bool is_zero() const { return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; }); }
  /// z <= other.
  bool le(const CentralProjection& o) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !o.bits_[i]) return false;
    return true;
  }
  bool operator==(const CentralProjection& o) const { return bits_ == o.bits_; }

  std::string to_string() const {
    std::string s;
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

 private:
  std::vector<bool> bits_;
};

inline double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

/// ||m - (tr m / dim) 1||_inf < tol (1 + ||m||_inf).
inline bool is_scalar_matrix(const Mat& m, double tol) {
  const auto d = m.rows();
  const cplx s = m.trace() / static_cast<double>(d);
  const Mat dev = m - s * Mat::Identity(d, d);
  return op_norm(dev) < tol * (1.0 + op_norm(m));
}

/// Element of a TracialAlgebra: one complex matrix per block.
class Element {
 public:
  Element() = default;
  Element(AlgebraPtr alg, std::vector<Mat> blocks) : alg_(std::move(alg)), blocks_(std::move(blocks)) {
    if (!alg_) throw StructuralError("element without algebra");
    if (static_cast<int>(blocks_.size()) != alg_->num_blocks())
      throw StructuralError("element has " + std::to_string(blocks_.size()) + " blocks, algebra has " +
                            std::to_string(alg_->num_blocks()));
    for (int i = 0; i < alg_->num_blocks(); ++i) {
      const auto& b = blocks_[static_cast<std::size_t>(i)];
      if (b.rows() != alg_->dim(i) || b.cols() != alg_->dim(i))
        throw StructuralError("block " + std::to_string(i) + " has wrong shape");
    }
  }

  static Element zero(const AlgebraPtr& alg) {
    std::vector<Mat> blocks;
    for (int i = 0; i < alg->num_blocks(); ++i) blocks.push_back(Mat::Zero(alg->dim(i), alg->dim(i)));
    return Element(alg, std::move(blocks));
  }
  static Element identity(const AlgebraPtr& alg) {
    std::vector<Mat> blocks;
    for (int i = 0; i < alg->num_blocks(); ++i) blocks.push_back(Mat::Identity(alg->dim(i), alg->dim(i)));
    return Element(alg, std::move(blocks));
  }
  /// Central element with scalar c_i on block i.
  static Element central(const AlgebraPtr& alg, const std::vector<cplx>& scalars) {
    std::vector<Mat> blocks;
    for (int i = 0; i < alg->num_blocks(); ++i)
      blocks.push_back(scalars[static_cast<std::size_t>(i)] * Mat::Identity(alg->dim(i), alg->dim(i)));
    return Element(alg, std::move(blocks));
  }
  static Element central(const AlgebraPtr& alg, const CentralProjection& z) {
    std::vector<cplx> s;
    for (int i = 0; i < alg->num_blocks(); ++i) s.emplace_back(z[i] ? 1.0 : 0.0);
    return central(alg, s);
  }
  /// Coordinate basis element number k (blocks stacked, row-major).
  static Element unit(const AlgebraPtr& alg, int k) {
    Element e = zero(alg);
    const auto c = alg->coord(k);
    e.blocks_[static_cast<std::size_t>(c.block)](c.row, c.col) = 1.0;
    return e;
  }

  static Element from_coords(const AlgebraPtr& alg, const Vec& v) {
    if (v.size() != alg->coord_dim()) throw StructuralError("coordinate vector has wrong length");
    std::vector<Mat> blocks;
    for (int i = 0; i < alg->num_blocks(); ++i) {
      const int d = alg->dim(i);
      Mat b(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) b(r, c) = v(alg->offset(i) + r * d + c);
      blocks.push_back(std::move(b));
    }
    return Element(alg, std::move(blocks));
  }

  Vec coords() const {
    Vec v(alg_->coord_dim());
    for (int i = 0; i < alg_->num_blocks(); ++i) {
      const int d = alg_->dim(i);
      const auto& b = block(i);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) v(alg_->offset(i) + r * d + c) = b(r, c);
    }
    return v;
  }

  const AlgebraPtr& algebra() const { return alg_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const Mat& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  Mat& block(int i) { return blocks_[static_cast<std::size_t>(i)]; }
  const std::vector<Mat>& blocks() const { return blocks_; }

  Element adjoint() const {
    return map([](const Mat& m) -> Mat { return m.adjoint(); });
  }
  Element transpose() const {
    return map([](const Mat& m) -> Mat { return m.transpose(); });
  }
  Element conjugate() const {
    return map([](const Mat& m) -> Mat { return m.conjugate(); });
  }
  /// Hermitian part (x + x*) / 2.
  Element real_part() const {
    return map([](const Mat& m) -> Mat { return (m + m.adjoint()) / 2.0; });
  }

  template <class F>
  Element map(F&& f) const {
    std::vector<Mat> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(f(b));
    return Element(alg_, std::move(out));
  }

  /// Multiply by the central projection z (zero out blocks with bit 0).
  Element times(const CentralProjection& z) const {
    Element out = *this;
    for (int i = 0; i < num_blocks(); ++i)
      if (!z[i]) out.block(i).setZero();
    return out;
  }

  double norm_inf() const {
    double n = 0.0;
    for (const auto& b : blocks_) n = std::max(n, op_norm(b));
    return n;
  }
  double frobenius() const {
    double s = 0.0;
    for (const auto& b : blocks_) s += b.squaredNorm();
    return std::sqrt(s);
  }

  bool is_self_adjoint(double tol) const {
    return (*this - adjoint()).norm_inf() <= tol * std::max(1.0, norm_inf());
  }
  bool is_projection(double tol) const {
    if (!is_self_adjoint(tol)) return false;
    return (*this * *this - *this).norm_inf() <= tol * std::max(1.0, norm_inf());
  }
  bool is_central(double tol) const {
    return std::all_of(blocks_.begin(), blocks_.end(), [&](const Mat& m) { return is_scalar_matrix(m, tol); });
  }
  /// Central part: per-block (tr x_i / d_i) 1.
  Element scalar_part() const {
    return map([](const Mat& m) -> Mat {
      return (m.trace() / static_cast<double>(m.rows())) * Mat::Identity(m.rows(), m.cols());
    });
  }

  Element& operator+=(const Element& o) {
    check_same(o);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
  }
  Element& operator-=(const Element& o) {
    check_same(o);
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
    return *this;
  }
  Element& operator*=(cplx s) {
    for (auto& b : blocks_) b *= s;
    return *this;
  }

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator-(Element a) { return a *= -1.0; }
  friend Element operator*(cplx s, Element a) { return a *= s; }
  friend Element operator*(Element a, cplx s) { return a *= s; }
  friend Element operator*(const Element& a, const Element& b) {
    a.check_same(b);
    std::vector<Mat> out;
    out.reserve(a.blocks_.size());
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) out.push_back(a.blocks_[i] * b.blocks_[i]);
    return Element(a.alg_, std::move(out));
  }

  void check_same(const Element& o) const {
    if (alg_ != o.alg_ && !(alg_ && o.alg_ && alg_->same_shape(*o.alg_)))
      throw StructuralError("elements belong to different algebras");
  }

 private:
  AlgebraPtr alg_;
  std::vector<Mat> blocks_;
};

inline Element commutator(const Element& a, const Element& b) { return a * b - b * a; }

/// tau(x) = sum_i w_i tr(x_i).
inline cplx trace(const Element& x) {
  cplx t = 0.0;
  const auto& alg = *x.algebra();
  for (int i = 0; i < alg.num_blocks(); ++i) t += alg.weight(i) * x.block(i).trace();
  return t;
}

/// Polar decomposition x = u |x| together with the support projections.
struct PolarDecomposition {
  Element u;      // partial isometry, u*u = r(x)
  Element m;      // |x| = (x*x)^{1/2}
  Element left;   // l(x) = u u*
  Element right;  // r(x) = u* u
  Element null;   // n(x) = 1 - r(x)
};

/// Numerical rank threshold: singular values below `tol * max(1, sigma_max)`
/// are treated as zero.
inline PolarDecomposition polar_decompose(const Element& x, double tol = 1e-10) {
  const auto& alg = x.algebra();
  std::vector<Mat> u, m, l, r, n;
  const double scale = std::max(1.0, x.norm_inf());
  for (int i = 0; i < alg->num_blocks(); ++i) {
    const int d = alg->dim(i);
    Eigen::JacobiSVD<Mat> svd(x.block(i), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    while (rank < d && s(rank) > tol * scale) ++rank;
    const Mat U = svd.matrixU().leftCols(rank);
    const Mat V = svd.matrixV().leftCols(rank);
    u.push_back(U * V.adjoint());
    Mat mi = svd.matrixV() * s.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
    m.push_back(std::move(mi));
    l.push_back(U * U.adjoint());
    r.push_back(V * V.adjoint());
    const Mat N = svd.matrixV().rightCols(d - rank);
    n.push_back(N * N.adjoint());
  }
  return {Element(alg, std::move(u)), Element(alg, std::move(m)), Element(alg, std::move(l)),
          Element(alg, std::move(r)), Element(alg, std::move(n))};
}

/// Half-open real interval (lo, hi]; either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double t) const { return t > lo && t <= hi; }
  static Interval above(double t) { return {t, std::numeric_limits<double>::infinity()}; }
  static Interval all() { return {}; }
};

/// Eigenpairs per block of a self-adjoint element (ascending eigenvalues).
struct BlockEigen {
  RealVec values;
  Mat vectors;
};

inline std::vector<BlockEigen> eigen_blocks(const Element& x, double tol) {
  if (!x.is_self_adjoint(tol)) throw DomainError("element is not self-adjoint");
  std::vector<BlockEigen> out;
  for (const auto& b : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<Mat> es((b + b.adjoint()) / 2.0);
    out.push_back({es.eigenvalues(), es.eigenvectors()});
  }
  return out;
}

/// e^x(interval): projection onto eigenvectors with eigenvalue in (lo, hi].
inline Element spectral_projection(const Element& x, const Interval& iv, double tol = 1e-10) {
  const auto eig = eigen_blocks(x, tol);
  std::vector<Mat> out;
  for (const auto& e : eig) {
    const auto d = e.values.size();
    Mat p = Mat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
      if (iv.contains(e.values(k))) p += e.vectors.col(k) * e.vectors.col(k).adjoint();
    out.push_back(std::move(p));
  }
  return Element(x.algebra(), std::move(out));
}

/// Smallest central projection dominating the projection p.
inline CentralProjection central_support(const Element& p, double tol = 1e-10) {
  if (!p.is_projection(tol)) throw DomainError("central_support: argument is not a projection");
  std::vector<bool> bits;
  for (const auto& b : p.blocks()) bits.push_back(op_norm(b) > 0.5);
  return CentralProjection(std::move(bits));
}

// ---------------------------------------------------------------------------
// Random elements (deterministic given the generator).

inline Mat random_gaussian_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
  return m;
}

inline Element random_element(const AlgebraPtr& alg, Rng& rng) {
  std::vector<Mat> blocks;
  for (int i = 0; i < alg->num_blocks(); ++i) blocks.push_back(random_gaussian_matrix(alg->dim(i), alg->dim(i), rng));
  return Element(alg, std::move(blocks));
}

inline Element random_self_adjoint(const AlgebraPtr& alg, Rng& rng) { return random_element(alg, rng).real_part(); }

/// Haar-distributed unitary per block (QR of a Ginibre matrix with phase fix).
inline Mat random_unitary_matrix(int d, Rng& rng) {
  const Mat g = random_gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const cplx rk = r(k, k);
    if (std::abs(rk) > 0) q.col(k) *= rk / std::abs(rk);
  }
  return q;
}

inline Element random_unitary(const AlgebraPtr& alg, Rng& rng) {
  std::vector<Mat> blocks;
  for (int i = 0; i < alg->num_blocks(); ++i) blocks.push_back(random_unitary_matrix(alg->dim(i), rng));
  return Element(alg, std::move(blocks));
}

/// Diagonal projection whose diagonal is given by the bits of `mask` over
/// the atoms (block 0 first, then diagonal order), least significant first.
inline Element diagonal_projection(const AlgebraPtr& alg, unsigned long mask) {
  Element p = Element::zero(alg);
  int atom = 0;
  for (int i = 0; i < alg->num_blocks(); ++i)
    for (int k = 0; k < alg->dim(i); ++k, ++atom)
      if ((mask >> atom) & 1UL) p.block(i)(k, k) = 1.0;
  return p;
}

/// Real basis of the self-adjoint part: E_jj, E_jk + E_kj, -i E_jk + i E_kj
/// (j < k) per block. Its complex span is the whole algebra.
inline std::vector<Element> self_adjoint_basis(const AlgebraPtr& alg) {
  std::vector<Element> out;
  const cplx I(0.0, 1.0);
  for (int i = 0; i < alg->num_blocks(); ++i) {
    const int d = alg->dim(i);
    for (int j = 0; j < d; ++j) {
      Element e = Element::zero(alg);
      e.block(i)(j, j) = 1.0;
      out.push_back(std::move(e));
    }
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        Element s = Element::zero(alg);
        s.block(i)(j, k) = 1.0;
        s.block(i)(k, j) = 1.0;
        out.push_back(std::move(s));
        Element a = Element::zero(alg);
        a.block(i)(j, k) = -I;
        a.block(i)(k, j) = I;
        out.push_back(std::move(a));
      }
  }
  return out;
}

}  // namespace symop
