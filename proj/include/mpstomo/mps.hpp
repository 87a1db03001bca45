// Copyright 2026 The mpstomo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Open-boundary matrix product states with a tracked canonical center.
//
// Site k holds q slices A^(k)[v], each a D_{k-1} x D_k complex matrix, with
// D_0 = D_N = 1. Sites left of the center are left-canonical
// (sum_v A[v]^dagger A[v] = 1), sites right of it right-canonical
// (sum_v A[v] A[v]^dagger = 1), and the state is kept at unit norm. Bond k
// (0 <= k <= N-2) joins sites k and k+1. Dense vectors use site 0 as the most
// significant digit.

#ifndef MPSTOMO_MPS_HPP
#define MPSTOMO_MPS_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpstomo/errors.hpp"
#include "mpstomo/spin.hpp"

namespace mpstomo {

using Index = Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline constexpr std::size_t kDefaultDenseLimit = std::size_t{1} << 20;

// One MPS site: a (D_left, q, D_right) tensor stored as q matrices.
template <typename Real>
struct BasicSiteTensor {
  using Matrix = ComplexMatrix<Real>;

  std::vector<Matrix> slices;

  BasicSiteTensor() = default;
  BasicSiteTensor(int q, Index left, Index right) : slices(q, Matrix::Zero(left, right)) {}
  explicit BasicSiteTensor(std::vector<Matrix> s) : slices(std::move(s)) {}

  int local_dim() const { return static_cast<int>(slices.size()); }
  Index left_dim() const { return slices.front().rows(); }
  Index right_dim() const { return slices.front().cols(); }

  Matrix& operator[](int v) { return slices[v]; }
  const Matrix& operator[](int v) const { return slices[v]; }

  // (q D_left) x D_right, row v * D_left + l.
  Matrix stacked_rows() const {
    const Index dl = left_dim();
    Matrix m(local_dim() * dl, right_dim());
    for (int v = 0; v < local_dim(); ++v) m.middleRows(v * dl, dl) = slices[v];
    return m;
  }

  // D_left x (q D_right), column v * D_right + r.
  Matrix stacked_cols() const {
    const Index dr = right_dim();
    Matrix m(left_dim(), local_dim() * dr);
    for (int v = 0; v < local_dim(); ++v) m.middleCols(v * dr, dr) = slices[v];
    return m;
  }

  static BasicSiteTensor from_stacked_rows(const Matrix& m, int q) {
    const Index dl = m.rows() / q;
    BasicSiteTensor t;
    t.slices.reserve(q);
    for (int v = 0; v < q; ++v) t.slices.push_back(m.middleRows(v * dl, dl));
    return t;
  }

  static BasicSiteTensor from_stacked_cols(const Matrix& m, int q) {
    const Index dr = m.cols() / q;
    BasicSiteTensor t;
    t.slices.reserve(q);
    for (int v = 0; v < q; ++v) t.slices.push_back(m.middleCols(v * dr, dr));
    return t;
  }

  Real squared_norm() const {
    Real n = 0;
    for (const auto& s : slices) n += s.squaredNorm();
    return n;
  }
};

// Two neighbouring sites contracted over bond k. The merged tensor
// (D_{k-1}, q, q, D_{k+1}) is held as a (q D_{k-1}) x (q D_{k+1}) matrix with
// row v * D_{k-1} + l and column w * D_{k+1} + r, i.e. the stacked left site
// times the column-stacked right site.
template <typename Real>
struct BasicTwoSiteTensor {
  ComplexMatrix<Real> data;
  int bond = 0;
  int local_dim = 2;

  Index left_dim() const { return data.rows() / local_dim; }
  Index right_dim() const { return data.cols() / local_dim; }

  std::complex<Real>& operator()(Index l, int v, int w, Index r) {
    return data(v * left_dim() + l, w * right_dim() + r);
  }
  const std::complex<Real>& operator()(Index l, int v, int w, Index r) const {
    return data(v * left_dim() + l, w * right_dim() + r);
  }
};

enum class SweepDirection { left, right };

template <typename Real>
class BasicMps {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = ComplexMatrix<Real>;
  using SiteTensor = BasicSiteTensor<Real>;

  BasicMps() = default;

  // Takes ownership of the tensors, checks bond consistency, then brings the
  // state to canonical form with center 0 and unit norm.
  explicit BasicMps(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {
    check_shapes();
    canonicalize(0);
  }

  int size() const { return static_cast<int>(sites_.size()); }
  int local_dim() const { return sites_.front().local_dim(); }
  int two_s() const { return local_dim() - 1; }

  const SiteTensor& site(int k) const { return sites_.at(k); }
  const std::vector<SiteTensor>& sites() const { return sites_; }
  std::optional<int> center() const { return center_; }

  // D_1 .. D_{N-1}.
  std::vector<Index> bond_dims() const {
    std::vector<Index> d;
    for (int k = 0; k + 1 < size(); ++k) d.push_back(sites_[k].right_dim());
    return d;
  }

  Index max_bond_dim() const {
    Index m = 1;
    for (Index d : bond_dims()) m = std::max(m, d);
    return m;
  }

  // Moves the orthogonality center to site c and renormalizes.
  void canonicalize(int c) {
    if (c < 0 || c >= size()) throw ParameterError("canonical center out of range");
    const int left_from = center_ ? std::min(*center_, c) : 0;
    const int right_from = center_ ? std::max(*center_, c) : size() - 1;
    for (int k = left_from; k < c; ++k) left_orthonormalize(k);
    for (int k = right_from; k > c; --k) right_orthonormalize(k);
    center_ = c;
    const Real norm = std::sqrt(sites_[c].squared_norm());
    if (!(norm > std::numeric_limits<Real>::min())) {
      throw DegenerateStateError("state has zero norm");
    }
    for (auto& s : sites_[c].slices) s /= norm;
  }

  // Replaces the two sites of `bond` with a normalized split result and moves
  // the center onto the side that carries the singular values. Exclusive
  // access; used by sweeping optimizers.
  void replace_pair(int bond, SiteTensor left, SiteTensor right, SweepDirection toward) {
    if (bond < 0 || bond + 1 >= size()) throw ParameterError("bond index out of range");
    if (left.local_dim() != local_dim() || right.local_dim() != local_dim() ||
        left.left_dim() != sites_[bond].left_dim() ||
        right.right_dim() != sites_[bond + 1].right_dim() ||
        left.right_dim() != right.left_dim()) {
      throw ParameterError("replacement tensors do not fit the bond");
    }
    sites_[bond] = std::move(left);
    sites_[bond + 1] = std::move(right);
    center_ = (toward == SweepDirection::right) ? bond + 1 : bond;
  }

 private:
  void check_shapes() const {
    if (sites_.empty()) throw ParameterError("MPS needs at least one site");
    const int q = sites_.front().local_dim();
    if (q < 2) throw ParameterError("local dimension must be at least 2");
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      const auto& t = sites_[k];
      if (t.local_dim() != q) throw ParameterError("inconsistent local dimension");
      for (const auto& s : t.slices) {
        if (s.rows() != t.left_dim() || s.cols() != t.right_dim() || s.size() == 0) {
          throw ParameterError("inconsistent slice shape");
        }
      }
      if (k > 0 && sites_[k - 1].right_dim() != t.left_dim()) {
        throw ParameterError("bond dimension mismatch");
      }
    }
    if (sites_.front().left_dim() != 1 || sites_.back().right_dim() != 1) {
      throw ParameterError("open boundary bonds must have dimension 1");
    }
  }

  void left_orthonormalize(int k) {
    const Matrix m = sites_[k].stacked_rows();
    const Index rank = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<Matrix> qr(m);
    const Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), rank);
    const Matrix r = qr.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
    sites_[k] = SiteTensor::from_stacked_rows(q, local_dim());
    for (auto& s : sites_[k + 1].slices) s = (r * s).eval();
  }

  void right_orthonormalize(int k) {
    const Matrix m = sites_[k].stacked_cols();
    const Index rank = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<Matrix> qr(m.adjoint());
    const Matrix q = qr.householderQ() * Matrix::Identity(m.cols(), rank);
    const Matrix r = qr.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
    sites_[k] = SiteTensor::from_stacked_cols(q.adjoint(), local_dim());
    const Matrix r_dag = r.adjoint();
    for (auto& s : sites_[k - 1].slices) s = (s * r_dag).eval();
  }

  std::vector<SiteTensor> sites_;
  std::optional<int> center_;
};

// ---------------------------------------------------------------------------
// Construction

// Largest bond dimension bond k (1-based cut after site k) can carry.
inline Index max_bond_for_cut(int n, int q, int k, Index cap) {
  Index left = 1, right = 1;
  for (int i = 0; i < k && left < cap; ++i) left *= q;
  for (int i = 0; i < n - k && right < cap; ++i) right *= q;
  return std::min({cap, left, right});
}

// Product state |0...0> plus complex Gaussian noise (std 0.2 per component)
// on every entry, normalized. Deterministic for a given seed.
template <typename Real = double>
BasicMps<Real> random_init(int n, int q, Index d0, std::uint64_t seed) {
  if (n < 2 || q < 2 || d0 < 1) throw ParameterError("random_init: invalid dimensions");
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> noise(0, Real(0.2));
  std::vector<BasicSiteTensor<Real>> sites;
  Index left = 1;
  for (int k = 0; k < n; ++k) {
    const Index right = (k + 1 == n) ? 1 : max_bond_for_cut(n, q, k + 1, d0);
    BasicSiteTensor<Real> t(q, left, right);
    t[0](0, 0) = 1;
    for (int v = 0; v < q; ++v) {
      for (Index j = 0; j < right; ++j) {
        for (Index i = 0; i < left; ++i) {
          const Real re = noise(rng);
          const Real im = noise(rng);
          t[v](i, j) += std::complex<Real>(re, im);
        }
      }
    }
    sites.push_back(std::move(t));
    left = right;
  }
  return BasicMps<Real>(std::move(sites));
}

template <typename Real>
BasicMps<Real> canonicalize(BasicMps<Real> mps, int center) {
  mps.canonicalize(center);
  return mps;
}

// ---------------------------------------------------------------------------
// Evaluation

// Rotated amplitude <{n, m}|Psi>: U(n_k) applied on every physical leg, then
// the outcome levels selected. `levels[k]` is the computational level of the
// outcome at site k (level j <-> m = S - j).
template <typename Real>
std::complex<Real> amplitude(const BasicMps<Real>& mps, const MeasurementBasis& basis,
                             std::span<const int> levels) {
  const int n = mps.size();
  const int q = mps.local_dim();
  if (basis.size() != static_cast<std::size_t>(n) || levels.size() != static_cast<std::size_t>(n)) {
    throw ParameterError("basis/outcome length does not match the number of sites");
  }
  Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic> env(1);
  env(0) = 1;
  for (int k = 0; k < n; ++k) {
    const int level = levels[k];
    if (level < 0 || level >= q) throw ParameterError("outcome symbol out of range");
    const auto u = rotation_matrix<Real>(basis[k], mps.two_s());
    const auto& t = mps.site(k);
    ComplexMatrix<Real> local = ComplexMatrix<Real>::Zero(t.left_dim(), t.right_dim());
    for (int v = 0; v < q; ++v) {
      if (u(level, v) != std::complex<Real>(0)) local += u(level, v) * t[v];
    }
    env = (env * local).eval();
  }
  return env(0);
}

// Amplitude in the computational basis.
template <typename Real>
std::complex<Real> amplitude(const BasicMps<Real>& mps, std::span<const int> levels) {
  if (levels.size() != static_cast<std::size_t>(mps.size())) {
    throw ParameterError("outcome length does not match the number of sites");
  }
  Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic> env(1);
  env(0) = 1;
  for (int k = 0; k < mps.size(); ++k) {
    if (levels[k] < 0 || levels[k] >= mps.local_dim()) {
      throw ParameterError("outcome symbol out of range");
    }
    env = (env * mps.site(k)[levels[k]]).eval();
  }
  return env(0);
}

// <a|b> by transfer-matrix contraction.
template <typename Real>
std::complex<Real> inner_product(const BasicMps<Real>& a, const BasicMps<Real>& b) {
  if (a.size() != b.size() || a.local_dim() != b.local_dim()) {
    throw ParameterError("inner product of MPS with different shapes");
  }
  ComplexMatrix<Real> env = ComplexMatrix<Real>::Ones(1, 1);
  for (int k = 0; k < a.size(); ++k) {
    const auto& ta = a.site(k);
    const auto& tb = b.site(k);
    ComplexMatrix<Real> next = ComplexMatrix<Real>::Zero(ta.right_dim(), tb.right_dim());
    for (int v = 0; v < a.local_dim(); ++v) next.noalias() += ta[v].adjoint() * env * tb[v];
    env = std::move(next);
  }
  return env(0, 0);
}

template <typename Real>
Real squared_norm(const BasicMps<Real>& mps) {
  return std::real(inner_product(mps, mps));
}

struct FidelityDistance {
  double fidelity;  // |<a|b>| for unit vectors
  double distance;  // sqrt((1 - F^2) / 2)
};

inline double distance_from_fidelity(double f) { return std::sqrt(std::max(0.0, (1.0 - f * f) / 2.0)); }

template <typename Real>
FidelityDistance fidelity_distance(const BasicMps<Real>& a, const BasicMps<Real>& b) {
  const Real overlap = std::abs(inner_product(a, b));
  const Real norms = std::sqrt(squared_norm(a) * squared_norm(b));
  if (!(norms > 0)) throw DegenerateStateError("fidelity of a zero-norm state");
  const double f = std::min<double>(1.0, static_cast<double>(overlap / norms));
  return {f, distance_from_fidelity(f)};
}

// Full contraction to a q^N vector (site 0 most significant).
template <typename Real>
ComplexVector<Real> to_dense(const BasicMps<Real>& mps, std::size_t limit = kDefaultDenseLimit) {
  const int q = mps.local_dim();
  std::size_t dim = 1;
  for (int k = 0; k < mps.size(); ++k) {
    dim *= static_cast<std::size_t>(q);
    if (dim > limit) throw ResourceError("dense vector exceeds the configured size limit");
  }
  // Rows enumerate the prefix string, columns the open right bond.
  ComplexMatrix<Real> partial = ComplexMatrix<Real>::Ones(1, 1);
  for (int k = 0; k < mps.size(); ++k) {
    const auto& t = mps.site(k);
    ComplexMatrix<Real> next(partial.rows() * q, t.right_dim());
    for (Index p = 0; p < partial.rows(); ++p) {
      for (int v = 0; v < q; ++v) next.row(p * q + v) = partial.row(p) * t[v];
    }
    partial = std::move(next);
  }
  return partial.col(0);
}

// ---------------------------------------------------------------------------
// Two-site machinery

template <typename Real>
BasicTwoSiteTensor<Real> merge_adjacent(const BasicMps<Real>& mps, int bond) {
  if (bond < 0 || bond + 1 >= mps.size()) throw ParameterError("bond index out of range");
  const auto c = mps.center();
  if (!c || (*c != bond && *c != bond + 1)) {
    throw StateError("canonical center must sit on one of the merged sites");
  }
  BasicTwoSiteTensor<Real> t;
  t.bond = bond;
  t.local_dim = mps.local_dim();
  t.data = mps.site(bond).stacked_rows() * mps.site(bond + 1).stacked_cols();
  return t;
}

template <typename Real>
struct BasicSplitResult {
  BasicSiteTensor<Real> left;
  BasicSiteTensor<Real> right;
  double discarded_weight = 0.0;
  RealVector<Real> singular_values;  // kept, normalized to unit 2-norm
};

// SVD split of a merged tensor. Keeps singular values s_i >= eta * s_max, at
// most d_cap of them, renormalizes, and absorbs them into the side named by
// `toward` so the canonical center moves there.
template <typename Real>
BasicSplitResult<Real> split_two_site(const BasicTwoSiteTensor<Real>& t, Index d_cap, double eta,
                                      SweepDirection toward) {
  if (d_cap < 1 || !(eta >= 0.0)) throw ParameterError("split: need d_cap >= 1 and eta >= 0");
  Eigen::BDCSVD<ComplexMatrix<Real>> svd(t.data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector<Real>& s = svd.singularValues();
  const Real total = s.squaredNorm();
  if (s.size() == 0 || !(s(0) > 0) || !(total > 0)) {
    throw DegenerateStateError("split: all singular values vanish");
  }
  Index keep = 0;
  while (keep < s.size() && keep < d_cap && s(keep) >= static_cast<Real>(eta) * s(0)) ++keep;
  keep = std::max<Index>(keep, 1);

  BasicSplitResult<Real> out;
  const Real kept = s.head(keep).squaredNorm();
  out.discarded_weight = static_cast<double>(std::max<Real>(0, (total - kept) / total));
  out.singular_values = s.head(keep) / std::sqrt(kept);
  const ComplexMatrix<Real> u = svd.matrixU().leftCols(keep);
  const ComplexMatrix<Real> vh = svd.matrixV().leftCols(keep).adjoint();
  const auto weights = out.singular_values.template cast<std::complex<Real>>().asDiagonal();
  if (toward == SweepDirection::right) {
    out.left = BasicSiteTensor<Real>::from_stacked_rows(u, t.local_dim);
    out.right = BasicSiteTensor<Real>::from_stacked_cols(weights * vh, t.local_dim);
  } else {
    out.left = BasicSiteTensor<Real>::from_stacked_rows(u * weights, t.local_dim);
    out.right = BasicSiteTensor<Real>::from_stacked_cols(vh, t.local_dim);
  }
  return out;
}

// Schmidt coefficients across `bond`, normalized to unit 2-norm, descending.
template <typename Real>
RealVector<Real> schmidt_values(const BasicMps<Real>& mps, int bond) {
  if (bond < 0 || bond + 1 >= mps.size()) throw ParameterError("bond index out of range");
  const auto c = mps.center();
  if (!c || (*c != bond && *c != bond + 1)) {
    return schmidt_values(canonicalize(mps, bond), bond);
  }
  const ComplexMatrix<Real> m =
      (*c == bond) ? mps.site(bond).stacked_rows() : mps.site(bond + 1).stacked_cols();
  Eigen::BDCSVD<ComplexMatrix<Real>> svd(m);
  RealVector<Real> s = svd.singularValues();
  const Real norm = s.norm();
  if (!(norm > 0)) throw DegenerateStateError("zero Schmidt spectrum");
  return s / norm;
}

// -ln Tr rho^2 of either half of the chain cut at `bond`.
template <typename Real>
Real renyi2_entropy(const BasicMps<Real>& mps, int bond) {
  const RealVector<Real> s = schmidt_values(mps, bond);
  const Real purity = s.array().square().square().sum();
  return std::max<Real>(0, -std::log(purity));
}

using Mps = BasicMps<double>;
using SiteTensor = BasicSiteTensor<double>;
using TwoSiteTensor = BasicTwoSiteTensor<double>;
using SplitResult = BasicSplitResult<double>;

}  // namespace mpstomo

#endif  // MPSTOMO_MPS_HPP
