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


#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mpstomo/mps.hpp"
#include "mpstomo/oracle.hpp"
#include "mpstomo/serialize.hpp"
#include "mpstomo/states.hpp"

namespace mpstomo {
namespace {

using testing::random_mps;

double left_canonical_error(const SiteTensor& t) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(t.right_dim(), t.right_dim());
  for (const auto& a : t.slices) acc += a.adjoint() * a;
  return (acc - Eigen::MatrixXcd::Identity(t.right_dim(), t.right_dim())).cwiseAbs().maxCoeff();
}

double right_canonical_error(const SiteTensor& t) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(t.left_dim(), t.left_dim());
  for (const auto& a : t.slices) acc += a * a.adjoint();
  return (acc - Eigen::MatrixXcd::Identity(t.left_dim(), t.left_dim())).cwiseAbs().maxCoeff();
}

// Overlap magnitude of two dense vectors, i.e. equality up to a global phase.
double phase_free_overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

TEST(RandomInit, NormalizedProductState) {
  const Mps m = random_init(2, 2, 1, 7);
  EXPECT_NEAR(squared_norm(m), 1.0, 1e-12);
  EXPECT_EQ(m.max_bond_dim(), 1);
}

TEST(RandomInit, DeterministicPerSeed) {
  const Mps a = random_init(4, 2, 2, 7);
  const Mps b = random_init(4, 2, 2, 7);
  for (int k = 0; k < 4; ++k) {
    for (int v = 0; v < 2; ++v) EXPECT_EQ(a.site(k)[v], b.site(k)[v]);
  }
  const Mps c = random_init(4, 2, 2, 8);
  EXPECT_NE(a.site(1)[0], c.site(1)[0]);
}

TEST(RandomInit, QutritDenseLength) {
  const auto psi = to_dense(random_init(4, 3, 2, 7));
  EXPECT_EQ(psi.size(), 81);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
}

TEST(RandomInit, RejectsBadDimensions) {
  EXPECT_THROW(random_init(1, 2, 2, 0), ParameterError);
  EXPECT_THROW(random_init(3, 1, 2, 0), ParameterError);
  EXPECT_THROW(random_init(3, 2, 0, 0), ParameterError);
}

TEST(Canonical, ConditionsHoldForEveryCenter) {
  const Mps base = random_mps(6, 2, 4, 11);
  for (int c = 0; c < 6; ++c) {
    const Mps m = canonicalize(base, c);
    ASSERT_EQ(m.center(), c);
    for (int k = 0; k < c; ++k) EXPECT_LT(left_canonical_error(m.site(k)), 1e-10);
    for (int k = c + 1; k < 6; ++k) EXPECT_LT(right_canonical_error(m.site(k)), 1e-10);
    EXPECT_NEAR(squared_norm(m), 1.0, 1e-10);
  }
}

TEST(Canonical, GaugeInvariantAndIdempotent) {
  const Mps base = random_mps(5, 3, 3, 12);
  const Mps once = canonicalize(base, 3);
  const Mps twice = canonicalize(once, 3);
  EXPECT_NEAR(fidelity_distance(base, once).fidelity, 1.0, 1e-10);
  EXPECT_NEAR(phase_free_overlap(to_dense(once), to_dense(twice)), 1.0, 1e-12);
  EXPECT_LT((to_dense(once) - to_dense(twice)).norm(), 1e-12);
}

TEST(Canonical, RejectsZeroNorm) {
  std::vector<SiteTensor> sites(2, SiteTensor(2, 1, 1));
  sites[1] = SiteTensor(2, 1, 1);
  EXPECT_THROW(Mps{sites}, DegenerateStateError);
}

TEST(Canonical, RejectsBadShapes) {
  std::vector<SiteTensor> sites{SiteTensor(2, 1, 2), SiteTensor(2, 3, 1)};
  EXPECT_THROW(Mps{sites}, ParameterError);
  std::vector<SiteTensor> wide{SiteTensor(2, 2, 2), SiteTensor(2, 2, 1)};
  EXPECT_THROW(Mps{wide}, ParameterError);
}

TEST(Amplitude, ZBasisMatchesDense) {
  const Mps m = random_mps(4, 2, 3, 5);
  const auto psi = to_dense(m);
  for (int idx = 0; idx < 16; ++idx) {
    std::vector<int> levels{(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1};
    EXPECT_LT(std::abs(amplitude(m, levels) - psi(idx)), 1e-12);
    EXPECT_LT(std::abs(amplitude(m, MeasurementBasis::all_z(4), levels) - psi(idx)), 1e-12);
  }
}

TEST(Amplitude, RotatedMatchesDenseOracle) {
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 6; ++n) {
    for (int q : {2, 3}) {
      if (q == 3 && n > 4) continue;
      const Mps m = random_mps(n, q, 3, 100 + n + q);
      const DenseState dense = DenseState::from_mps(m);
      for (int trial = 0; trial < 5; ++trial) {
        const MeasurementBasis basis = sample_basis(n, rng);
        std::vector<int> levels(n);
        for (auto& l : levels) l = std::uniform_int_distribution<int>(0, q - 1)(rng);
        EXPECT_NEAR(std::norm(amplitude(m, basis, levels)), dense_probability(dense, basis, levels),
                    1e-10);
      }
    }
  }
}

TEST(Amplitude, RejectsLengthMismatch) {
  const Mps m = random_mps(3, 2, 2, 1);
  std::vector<int> levels{0, 1};
  EXPECT_THROW(amplitude(m, levels), ParameterError);
}

TEST(Fidelity, OrthogonalAndIdentical) {
  const Mps w = w_state(4, 0.0);
  EXPECT_NEAR(fidelity_distance(w, w).fidelity, 1.0, 1e-12);
  EXPECT_NEAR(fidelity_distance(w, w).distance, 0.0, 1e-6);
  // |0000> has no overlap with W
  std::vector<SiteTensor> up(4, SiteTensor(2, 1, 1));
  for (auto& t : up) t[0](0, 0) = 1.0;
  const FidelityDistance fd = fidelity_distance(w, Mps(up));
  EXPECT_NEAR(fd.fidelity, 0.0, 1e-12);
  EXPECT_NEAR(fd.distance, 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Fidelity, MatchesDense) {
  const Mps a = random_mps(5, 2, 4, 21);
  const Mps b = random_mps(5, 2, 4, 22);
  const double dense = std::abs(to_dense(a).dot(to_dense(b)));
  EXPECT_NEAR(fidelity_distance(a, b).fidelity, dense, 1e-12);
  EXPECT_NEAR(distance_from_fidelity(dense), fidelity_distance(a, b).distance, 1e-12);
}

TEST(ToDense, SingleSiteAndW3) {
  SiteTensor t(3, 1, 1);
  t[0](0, 0) = 0.6;
  t[2](0, 0) = {0.0, 0.8};
  const auto one = to_dense(Mps({t}));
  ASSERT_EQ(one.size(), 3);
  EXPECT_LT(std::abs(one(0) - 0.6), 1e-14);
  EXPECT_LT(std::abs(one(1)), 1e-14);
  EXPECT_LT(std::abs(one(2) - std::complex<double>(0, 0.8)), 1e-14);

  const auto w = to_dense(w_state(3, 0.0));
  for (int i = 0; i < 8; ++i) {
    const bool single = i == 1 || i == 2 || i == 4;
    EXPECT_NEAR(std::abs(w(i)), single ? 1.0 / std::sqrt(3.0) : 0.0, 1e-12);
  }
}

TEST(ToDense, SizeLimit) {
  const Mps m = random_mps(6, 2, 2, 1);
  EXPECT_THROW(to_dense(m, 32), ResourceError);
  EXPECT_NO_THROW(to_dense(m, 64));
}

TEST(TwoSite, MergeSplitRoundtripIsExact) {
  for (int q : {2, 3}) {
    Mps m = random_mps(5, q, 4, 30 + q);
    const auto before = to_dense(m);
    for (int bond = 0; bond < 4; ++bond) {
      m.canonicalize(bond);
      const TwoSiteTensor t = merge_adjacent(m, bond);
      const SplitResult s = split_two_site(t, 1000, 0.0, SweepDirection::right);
      EXPECT_NEAR(s.discarded_weight, 0.0, 1e-14);
      m.replace_pair(bond, s.left, s.right, SweepDirection::right);
      EXPECT_EQ(m.center(), bond + 1);
      EXPECT_LT((to_dense(m) - before).cwiseAbs().maxCoeff(), 1e-10);
    }
    for (int bond = 3; bond >= 0; --bond) {
      const TwoSiteTensor t = merge_adjacent(m, bond);
      const SplitResult s = split_two_site(t, 1000, 0.0, SweepDirection::left);
      m.replace_pair(bond, s.left, s.right, SweepDirection::left);
      EXPECT_EQ(m.center(), bond);
      EXPECT_LT((to_dense(m) - before).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(TwoSite, ProductStateMergesToRankOne) {
  std::vector<SiteTensor> sites(3, SiteTensor(2, 1, 1));
  for (auto& t : sites) {
    t[0](0, 0) = 0.6;
    t[1](0, 0) = {0.0, 0.8};
  }
  const Mps m(sites);
  const TwoSiteTensor t = merge_adjacent(m, 0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t.data);
  EXPECT_LT(svd.singularValues()(1), 1e-12);
}

TEST(TwoSite, MergeNeedsCenterOnBond) {
  const Mps m = random_mps(4, 2, 2, 3);  // center 0
  EXPECT_NO_THROW(merge_adjacent(m, 0));
  EXPECT_THROW(merge_adjacent(m, 2), StateError);
  EXPECT_THROW(merge_adjacent(m, 3), ParameterError);
}

TEST(TwoSite, BellPairHalfWeightAtCapOne) {
  TwoSiteTensor t;
  t.bond = 0;
  t.local_dim = 2;
  t.data = Eigen::MatrixXcd::Zero(2, 2);
  t.data(0, 1) = 1.0 / std::sqrt(2.0);
  t.data(1, 0) = 1.0 / std::sqrt(2.0);
  const SplitResult s = split_two_site(t, 1, 0.0, SweepDirection::right);
  EXPECT_NEAR(s.discarded_weight, 0.5, 1e-14);
  EXPECT_EQ(s.left.right_dim(), 1);
}

TEST(TwoSite, TruncationFidelityBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Mps m = random_mps(4, 2, 4, 40 + seed);
    m.canonicalize(1);
    const TwoSiteTensor t = merge_adjacent(m, 1);
    const SplitResult s = split_two_site(t, 2, 0.0, SweepDirection::right);
    Mps cut = m;
    cut.replace_pair(1, s.left, s.right, SweepDirection::right);
    const double f = fidelity_distance(m, cut).fidelity;
    EXPECT_GE(f, std::sqrt(1.0 - s.discarded_weight) - 1e-9);
  }
}

TEST(TwoSite, RelativeCutoff) {
  TwoSiteTensor t;
  t.bond = 0;
  t.local_dim = 2;
  t.data = Eigen::MatrixXcd::Zero(2, 2);
  t.data(0, 0) = 1.0;
  t.data(1, 1) = 0.05;
  EXPECT_EQ(split_two_site(t, 4, 0.1, SweepDirection::left).left.right_dim(), 1);
  EXPECT_EQ(split_two_site(t, 4, 0.01, SweepDirection::left).left.right_dim(), 2);
}

TEST(TwoSite, ZeroTensorIsDegenerate) {
  TwoSiteTensor t;
  t.bond = 0;
  t.local_dim = 2;
  t.data = Eigen::MatrixXcd::Zero(2, 2);
  EXPECT_THROW(split_two_site(t, 2, 0.0, SweepDirection::right), DegenerateStateError);
  EXPECT_THROW(split_two_site(t, 0, 0.0, SweepDirection::right), ParameterError);
}

TEST(Renyi, ProductBellAndDense) {
  std::vector<SiteTensor> up(3, SiteTensor(2, 1, 1));
  for (auto& t : up) t[0](0, 0) = 1.0;
  EXPECT_NEAR(renyi2_entropy(Mps(up), 1), 0.0, 1e-12);

  const Mps dimer = dimer_state(2);
  EXPECT_NEAR(renyi2_entropy(dimer, 0), std::log(2.0), 1e-12);

  const Mps m = random_mps(6, 2, 4, 77);
  const DenseState d = DenseState::from_mps(m);
  for (int bond = 0; bond < 5; ++bond) {
    EXPECT_NEAR(renyi2_entropy(m, bond), dense_renyi2(d, bond), 1e-9);
    const double bound = std::log(std::min(std::pow(2.0, bond + 1), std::pow(2.0, 5 - bond)));
    EXPECT_LE(renyi2_entropy(m, bond), bound + 1e-9);
  }
}

TEST(Serialize, Roundtrip) {
  const Mps m = random_mps(5, 3, 4, 9);
  std::stringstream buf;
  write_mps(buf, m);
  const Mps back = read_mps(buf);
  EXPECT_EQ(back.bond_dims(), m.bond_dims());
  EXPECT_LT((to_dense(back) - to_dense(m)).norm(), 1e-12);
}

TEST(Serialize, HeaderLayout) {
  const Mps m = w_state(3, 0.1);
  std::stringstream buf;
  write_mps(buf, m);
  const std::string bytes = buf.str();
  ASSERT_GE(bytes.size(), 20u);
  EXPECT_EQ(bytes.substr(0, 4), "MPS1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3);  // N, little endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);  // q
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 2);  // D_1
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 2);  // D_2
  // 3 sites: 1*2*2 + 2*2*2 + 2*2*1 complex numbers of 16 bytes
  EXPECT_EQ(bytes.size(), 20u + 16u * (4 + 8 + 4));
}

TEST(Serialize, RejectsCorruptInput) {
  std::stringstream bad_magic("MPS2xxxx");
  EXPECT_THROW(read_mps(bad_magic), FormatError);

  std::stringstream buf;
  write_mps(buf, random_mps(3, 2, 2, 1));
  const std::string full = buf.str();
  std::stringstream truncated(full.substr(0, full.size() - 5));
  EXPECT_THROW(read_mps(truncated), FormatError);

  // Scaling one amplitude breaks the norm.
  std::string scaled = full;
  scaled[20 + 7] = static_cast<char>(scaled[20 + 7] ^ 0x10);
  std::stringstream s(scaled);
  EXPECT_THROW(read_mps(s), FormatError);
}

TEST(Serialize, MissingFileIsIoError) {
  EXPECT_THROW(load_mps("/nonexistent/dir/model.mps"), IoError);
}

}  // namespace
}  // namespace mpstomo
