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

#include "mpstomo/states.hpp"

#include <cctype>
#include <cmath>
#include <random>

namespace mpstomo {

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::W: return "W";
    case TargetKind::Cluster: return "Cluster";
    case TargetKind::Dimer: return "Dimer";
    case TargetKind::Random: return "Random";
  }
  return "?";
}

TargetKind parse_target_kind(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "w") return TargetKind::W;
  if (s == "cluster") return TargetKind::Cluster;
  if (s == "dimer") return TargetKind::Dimer;
  if (s == "random") return TargetKind::Random;
  throw ParameterError("unknown target kind '" + name + "'");
}

void TargetSpec::validate() const {
  if (n < 2) throw ParameterError("target needs at least two sites");
  if (kind == TargetKind::Dimer && n % 2 != 0) throw ParameterError("dimer state needs even N");
  if (!std::isfinite(theta)) throw ParameterError("theta must be finite");
  if (d_max < 1) throw ParameterError("D_max must be at least 1");
}

namespace {

using C = std::complex<double>;

// Boundary-trimmed copy of a bulk tensor: first site keeps row `row`, last
// site keeps column `col`.
SiteTensor trim(const SiteTensor& bulk, bool first, bool last, Index row, Index col) {
  SiteTensor t;
  for (const auto& s : bulk.slices) {
    Eigen::MatrixXcd m = s;
    if (first) m = m.row(row).eval();
    if (last) m = m.col(col).eval();
    t.slices.push_back(m);
  }
  return t;
}

}  // namespace

Mps w_state(int n, double theta) {
  if (n < 2) throw ParameterError("w_state: need N >= 2");
  // Bond state 0: no excitation yet, 1: excitation already placed.
  std::vector<SiteTensor> sites;
  for (int k = 0; k < n; ++k) {
    SiteTensor bulk(2, 2, 2);
    bulk[0](0, 0) = 1;
    bulk[0](1, 1) = 1;
    bulk[1](0, 1) = std::polar(1.0, (k + 1) * theta);
    sites.push_back(trim(bulk, k == 0, k == n - 1, 0, 1));
  }
  return Mps(std::move(sites));
}

Mps cluster_state(int n) {
  if (n < 2) throw ParameterError("cluster_state: need N >= 2");
  // The bond carries the previous site's bit; CZ contributes (-1)^{a b}.
  const double amp = 1.0 / std::sqrt(2.0);
  std::vector<SiteTensor> sites;
  for (int k = 0; k < n; ++k) {
    SiteTensor bulk(2, 2, 2);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) bulk[b](a, b) = (a && b) ? -amp : amp;
    }
    if (k == n - 1) {
      SiteTensor last(2, 2, 1);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) last[b](a, 0) = (a && b) ? -amp : amp;
      }
      sites.push_back(last);
    } else {
      sites.push_back(trim(bulk, k == 0, false, 0, 0));
    }
  }
  return Mps(std::move(sites));
}

Mps dimer_state(int n) {
  if (n < 2 || n % 2 != 0) throw ParameterError("dimer_state: N must be even");
  const double amp = 1.0 / std::sqrt(2.0);
  std::vector<SiteTensor> sites;
  for (int p = 0; p < n / 2; ++p) {
    SiteTensor left(2, 1, 2);
    left[0](0, 0) = 1;
    left[1](0, 1) = 1;
    SiteTensor right(2, 2, 1);
    right[1](0, 0) = amp;   // |01>
    right[0](1, 0) = -amp;  // |10>
    sites.push_back(left);
    sites.push_back(right);
  }
  return Mps(std::move(sites));
}

Mps random_target(int n, Index d_max, std::uint64_t seed) {
  if (n < 2 || d_max < 1) throw ParameterError("random_target: need N >= 2 and D_max >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SiteTensor> sites;
  Index left = 1;
  for (int k = 0; k < n; ++k) {
    const Index right = (k + 1 == n) ? 1 : max_bond_for_cut(n, 2, k + 1, d_max);
    SiteTensor t(2, left, right);
    for (auto& s : t.slices) {
      for (Index j = 0; j < right; ++j) {
        for (Index i = 0; i < left; ++i) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          s(i, j) = C(re, im);
        }
      }
    }
    sites.push_back(std::move(t));
    left = right;
  }
  return Mps(std::move(sites));
}

Mps build_target(const TargetSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case TargetKind::W: return w_state(spec.n, spec.theta);
    case TargetKind::Cluster: return cluster_state(spec.n);
    case TargetKind::Dimer: return dimer_state(spec.n);
    case TargetKind::Random: return random_target(spec.n, spec.d_max, spec.seed);
  }
  throw ParameterError("unknown target kind");
}

}  // namespace mpstomo
