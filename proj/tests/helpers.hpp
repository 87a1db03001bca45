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


// Fixtures shared by the unit tests and the acceptance binary.

#ifndef MPSTOMO_TESTS_HELPERS_HPP
#define MPSTOMO_TESTS_HELPERS_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "mpstomo/measurement.hpp"
#include "mpstomo/mps.hpp"
#include "mpstomo/oracle.hpp"

namespace mpstomo::testing {

// Gaussian tensors with bond profile min(d, q^k, q^{N-k}).
inline Mps random_mps(int n, int q, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<SiteTensor> sites;
  Index left = 1;
  for (int k = 0; k < n; ++k) {
    const Index right = (k + 1 == n) ? 1 : max_bond_for_cut(n, q, k + 1, d);
    SiteTensor t(q, left, right);
    for (auto& s : t.slices) {
      for (Index j = 0; j < right; ++j) {
        for (Index i = 0; i < left; ++i) s(i, j) = {g(rng), g(rng)};
      }
    }
    sites.push_back(std::move(t));
    left = right;
  }
  return Mps(std::move(sites));
}

inline Eigen::VectorXcd random_vector(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

inline int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Spin matrices in the computational basis (level j <-> m = S - j).
inline Eigen::MatrixXcd spin_z(int two_s) {
  const int q = two_s + 1;
  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(q, q);
  for (int j = 0; j < q; ++j) sz(j, j) = 0.5 * level_to_two_m(two_s, j);
  return sz;
}

inline Eigen::MatrixXcd spin_plus(int two_s) {
  const int q = two_s + 1;
  const double s = 0.5 * two_s;
  Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(q, q);
  // S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; level j-1 carries m+1.
  for (int j = 1; j < q; ++j) {
    const double m = 0.5 * level_to_two_m(two_s, j);
    sp(j - 1, j) = std::sqrt(s * (s + 1) - m * (m + 1));
  }
  return sp;
}

inline Eigen::MatrixXcd spin_x(int two_s) {
  const Eigen::MatrixXcd sp = spin_plus(two_s);
  return 0.5 * (sp + sp.adjoint());
}

inline Eigen::MatrixXcd spin_y(int two_s) {
  const Eigen::MatrixXcd sp = spin_plus(two_s);
  return std::complex<double>(0, -0.5) * (sp - sp.adjoint());
}

// d(theta) = exp(-i theta S_y) by matrix exponential.
inline Eigen::MatrixXd wigner_d_by_expm(int two_s, double theta) {
  const Eigen::MatrixXcd gen = std::complex<double>(0, -theta) * spin_y(two_s);
  return gen.exp().real();
}

// State vector of `mps` with the pair at `bond` replaced by `theta`, built
// from explicit left and right blocks (sites 0..bond-1 left-canonical and
// bond+2..N-1 right-canonical are not assumed).
inline Eigen::VectorXcd dense_with_pair(const Mps& mps, int bond, const Eigen::MatrixXcd& theta) {
  const int n = mps.size();
  const int q = mps.local_dim();
  const int left_count = ipow(q, bond);
  const int right_count = ipow(q, n - bond - 2);
  const Index dl = mps.site(bond).left_dim();
  const Index dr = mps.site(bond + 1).right_dim();
  Eigen::MatrixXcd lb(left_count, dl);
  for (int a = 0; a < left_count; ++a) {
    Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Ones(1);
    for (int k = 0; k < bond; ++k) {
      const int v = (a / ipow(q, bond - 1 - k)) % q;
      row = row * mps.site(k)[v];
    }
    lb.row(a) = row;
  }
  Eigen::MatrixXcd rb(dr, right_count);
  for (int b = 0; b < right_count; ++b) {
    Eigen::VectorXcd col = Eigen::VectorXcd::Ones(1);
    for (int k = n - 1; k >= bond + 2; --k) {
      const int v = (b / ipow(q, n - 1 - k)) % q;
      col = mps.site(k)[v] * col;
    }
    rb.col(b) = col;
  }
  Eigen::VectorXcd psi(static_cast<Index>(left_count) * q * q * right_count);
  for (int a = 0; a < left_count; ++a) {
    for (int v = 0; v < q; ++v) {
      for (int w = 0; w < q; ++w) {
        const Eigen::RowVectorXcd mid =
            lb.row(a) * theta.block(v * dl, w * dr, dl, dr);  // 1 x dr
        const Eigen::RowVectorXcd out = mid * rb;
        for (int b = 0; b < right_count; ++b) {
          psi(((static_cast<Index>(a) * q + v) * q + w) * right_count + b) = out(b);
        }
      }
    }
  }
  return psi;
}

inline Dataset sample_dataset(const Mps& target, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  ShotSampler sampler(target);
  Dataset data;
  for (std::size_t i = 0; i < count; ++i) {
    data.append(sampler.draw(sample_basis(target.size(), rng), rng));
  }
  return data;
}

// Products of local unitaries applied to a dense state, site 0 most
// significant.
inline Eigen::VectorXcd apply_site_operator(const Eigen::VectorXcd& psi, int n, int q, int site,
                                            const Eigen::MatrixXcd& op) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  const int stride = ipow(q, n - 1 - site);
  for (Index i = 0; i < psi.size(); ++i) {
    const int v = static_cast<int>((i / stride) % q);
    const Index base = i - static_cast<Index>(v) * stride;
    for (int w = 0; w < q; ++w) out(base + static_cast<Index>(w) * stride) += op(w, v) * psi(i);
  }
  return out;
}

}  // namespace mpstomo::testing

#endif  // MPSTOMO_TESTS_HELPERS_HPP
