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

#ifndef MPSTOMO_MEASUREMENT_HPP
#define MPSTOMO_MEASUREMENT_HPP

#include <iosfwd>
#include <random>
#include <vector>

#include "mpstomo/mps.hpp"
#include "mpstomo/spin.hpp"

namespace mpstomo {

using Rng = std::mt19937_64;

// One single-shot projective measurement: the basis and the observed level
// at every site (level j <-> m = S - j).
struct Shot {
  MeasurementBasis basis;
  std::vector<int> levels;

  friend bool operator==(const Shot&, const Shot&) = default;
};

// Append-only collection of shots. Its size is the replica count |V|.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Shot> shots) : shots_(std::move(shots)) {}

  void append(Shot shot) { shots_.push_back(std::move(shot)); }
  void append(const Dataset& other) {
    shots_.insert(shots_.end(), other.shots_.begin(), other.shots_.end());
  }

  std::size_t replica_count() const { return shots_.size(); }
  std::size_t size() const { return shots_.size(); }
  bool empty() const { return shots_.empty(); }
  const Shot& operator[](std::size_t i) const { return shots_[i]; }
  const std::vector<Shot>& shots() const { return shots_; }

 private:
  std::vector<Shot> shots_;
};

// N directions drawn independently and uniformly on the sphere.
MeasurementBasis sample_basis(int n, Rng& rng);

// Exact autoregressive sampler for a fixed target. Holds a copy of the target
// brought to canonical center 0 so the right environment is the identity.
class ShotSampler {
 public:
  explicit ShotSampler(Mps target);

  const Mps& target() const { return target_; }

  Shot draw(const MeasurementBasis& basis, Rng& rng) const;
  // With probability epsilon the levels are uniform over all q^N strings.
  Shot draw_noisy(const MeasurementBasis& basis, double epsilon, Rng& rng) const;

 private:
  Mps target_;
};

Shot draw_shot(const Mps& target, const MeasurementBasis& basis, Rng& rng);
Shot draw_noisy_shot(const Mps& target, const MeasurementBasis& basis, double epsilon, Rng& rng);

// The 2N+1 local qubit bases: all-z, then x at site k (k = 0..N-1), then y at
// site k.
std::vector<MeasurementBasis> fixed_bases(int n, int q = 2);

// Shot record text: one line per shot, N fields "theta,phi,2m" joined by ';'.
void write_shots(std::ostream& out, const Dataset& data, int two_s);
Dataset read_shots(std::istream& in, int two_s);

}  // namespace mpstomo

#endif  // MPSTOMO_MEASUREMENT_HPP
