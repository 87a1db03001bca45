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

// Spin-S rotation algebra for local measurement bases.
//
// Conventions used throughout the library:
//   * a qudit of dimension q carries spin S = (q - 1) / 2; spins are passed
//     around as the integer two_s = 2S so half-integers stay exact;
//   * the local computational level j = 0 .. q-1 is the s^z eigenstate with
//     magnetic number m = S - j (level 0 is "spin up", m = +S);
//   * |n, m> = exp(-i phi s^z) exp(-i theta s^y) |m>, with the extra gauge
//     angle about the final z axis fixed to zero.

#ifndef MPSTOMO_SPIN_HPP
#define MPSTOMO_SPIN_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "mpstomo/errors.hpp"

namespace mpstomo {

// Unit vector on the sphere in standard spherical coordinates.
struct Direction {
  double theta = 0.0;  // polar angle, [0, pi]
  double phi = 0.0;    // azimuth, [0, 2 pi)

  friend bool operator==(const Direction&, const Direction&) = default;
};

// Product basis B({n}): one measuring direction per site.
struct MeasurementBasis {
  std::vector<Direction> directions;

  std::size_t size() const { return directions.size(); }
  const Direction& operator[](std::size_t k) const { return directions[k]; }

  static MeasurementBasis all_z(std::size_t n) { return {std::vector<Direction>(n)}; }

  friend bool operator==(const MeasurementBasis&, const MeasurementBasis&) = default;
};

inline void validate(const Direction& n) {
  if (!(n.theta >= 0.0 && n.theta <= std::numbers::pi) ||
      !(n.phi >= 0.0 && n.phi < 2.0 * std::numbers::pi)) {
    throw ParameterError("direction angles out of range");
  }
}

inline int two_s_from_local_dim(int q) {
  if (q < 2) throw ParameterError("local dimension must be at least 2");
  return q - 1;
}

// m (in units of 1/2) of computational level j.
inline int level_to_two_m(int two_s, int level) { return two_s - 2 * level; }

inline int two_m_to_level(int two_s, int two_m) {
  if (std::abs(two_m) > two_s || ((two_s - two_m) % 2) != 0) {
    throw ParameterError("magnetic number out of range");
  }
  return (two_s - two_m) / 2;
}

namespace detail {

template <typename Real>
Real factorial(int n) {
  Real r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<Real>(i);
  return r;
}

}  // namespace detail

// Wigner small-d element d^(S)_{m' m}(theta) = <m'| exp(-i theta s^y) |m>,
// evaluated with Wigner's factorial sum. Arguments are doubled quantum numbers.
template <typename Real = double>
Real wigner_d(int two_s, int two_mp, int two_m, Real theta) {
  if (two_s < 0) throw ParameterError("spin must be non-negative");
  if (std::abs(two_mp) > two_s || std::abs(two_m) > two_s || ((two_s - two_mp) & 1) ||
      ((two_s - two_m) & 1)) {
    throw ParameterError("magnetic number out of range");
  }
  const int s_plus_m = (two_s + two_m) / 2;
  const int s_minus_m = (two_s - two_m) / 2;
  const int s_plus_mp = (two_s + two_mp) / 2;
  const int s_minus_mp = (two_s - two_mp) / 2;
  const int delta = (two_mp - two_m) / 2;  // m' - m

  using std::cos;
  using std::pow;
  using std::sin;
  using std::sqrt;
  const Real c = cos(theta / 2);
  const Real s = sin(theta / 2);
  const Real prefactor =
      sqrt(detail::factorial<Real>(s_plus_mp) * detail::factorial<Real>(s_minus_mp) *
           detail::factorial<Real>(s_plus_m) * detail::factorial<Real>(s_minus_m));

  // Every denominator factorial argument must stay non-negative.
  const int k_min = std::max(0, -delta);
  const int k_max = std::min(s_plus_m, s_minus_mp);
  Real sum = 0;
  for (int k = k_min; k <= k_max; ++k) {
    const Real denom = detail::factorial<Real>(s_plus_m - k) * detail::factorial<Real>(k) *
                       detail::factorial<Real>(s_minus_mp - k) *
                       detail::factorial<Real>(k + delta);
    const int sin_power = 2 * k + delta;
    const int cos_power = two_s - sin_power;
    const Real sign = ((k + delta) % 2 == 0) ? Real(1) : Real(-1);
    sum += sign * prefactor / denom * pow(c, cos_power) * pow(s, sin_power);
  }
  return sum;
}

// q x q matrix of d^(S)(theta), indexed by computational levels.
template <typename Real = double>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> wigner_d_matrix(int two_s, Real theta) {
  const int q = two_s + 1;
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> d(q, q);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      d(i, j) = wigner_d<Real>(two_s, level_to_two_m(two_s, i), level_to_two_m(two_s, j), theta);
    }
  }
  return d;
}

// U(n) = exp(i theta s^y) exp(i phi s^z): maps |n, m> onto |z, m>.
// Element (out, in) = exp(i m_in phi) d_{m_in, m_out}(theta). Exactly the
// identity for n = +z.
template <typename Real = double>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> rotation_matrix(
    const Direction& n, int two_s) {
  validate(n);
  const int q = two_s + 1;
  const auto d = wigner_d_matrix<Real>(two_s, static_cast<Real>(n.theta));
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> u(q, q);
  for (int in = 0; in < q; ++in) {
    const Real angle = static_cast<Real>(level_to_two_m(two_s, in)) / 2 * static_cast<Real>(n.phi);
    const std::complex<Real> phase =
        (n.phi == 0.0) ? std::complex<Real>(1) : std::polar(Real(1), angle);
    for (int out = 0; out < q; ++out) u(out, in) = phase * d(in, out);
  }
  return u;
}

}  // namespace mpstomo

#endif  // MPSTOMO_SPIN_HPP
