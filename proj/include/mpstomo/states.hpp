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

// Benchmark target states with compact MPS descriptions (qubits).

#ifndef MPSTOMO_STATES_HPP
#define MPSTOMO_STATES_HPP

#include <cstdint>
#include <string>

#include "mpstomo/mps.hpp"

namespace mpstomo {

enum class TargetKind { W, Cluster, Dimer, Random };

std::string to_string(TargetKind kind);
TargetKind parse_target_kind(const std::string& name);

struct TargetSpec {
  TargetKind kind = TargetKind::W;
  int n = 2;
  double theta = 0.1;   // W only
  Index d_max = 2;      // Random only
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

// sum_k e^{i k theta} |0..1_k..0> / sqrt(N), k counted from 1.
Mps w_state(int n, double theta);

// CZ on every neighbouring pair of |+>^N, open chain.
Mps cluster_state(int n);

// Singlets (|01> - |10>)/sqrt(2) on pairs (0,1), (2,3), ...
Mps dimer_state(int n);

// I.i.d. complex Gaussian tensors with bond profile min(D_max, 2^k, 2^{N-k}),
// canonicalized and normalized.
Mps random_target(int n, Index d_max, std::uint64_t seed);

Mps build_target(const TargetSpec& spec);

}  // namespace mpstomo

#endif  // MPSTOMO_STATES_HPP
