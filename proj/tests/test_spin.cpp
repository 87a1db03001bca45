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
#include <numbers>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mpstomo/oracle.hpp"
#include "mpstomo/spin.hpp"

namespace mpstomo {
namespace {

using testing::spin_x;
using testing::spin_y;
using testing::spin_z;

constexpr double kPi = std::numbers::pi;

TEST(WignerD, SpinHalfClosedForm) {
  for (double t : {0.0, 0.3, 1.1, 2.0, kPi}) {
    EXPECT_NEAR(wigner_d(1, 1, 1, t), std::cos(t / 2), 1e-14);
    EXPECT_NEAR(wigner_d(1, 1, -1, t), -std::sin(t / 2), 1e-14);
    EXPECT_NEAR(wigner_d(1, -1, 1, t), std::sin(t / 2), 1e-14);
    EXPECT_NEAR(wigner_d(1, -1, -1, t), std::cos(t / 2), 1e-14);
  }
}

TEST(WignerD, SpinOneClosedForm) {
  for (double t : {0.2, 0.9, 2.5}) {
    const double c = std::cos(t), s = std::sin(t);
    EXPECT_NEAR(wigner_d(2, 2, 2, t), (1 + c) / 2, 1e-14);
    EXPECT_NEAR(wigner_d(2, 2, 0, t), -s / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(wigner_d(2, 2, -2, t), (1 - c) / 2, 1e-14);
    EXPECT_NEAR(wigner_d(2, 0, 0, t), c, 1e-14);
    EXPECT_NEAR(wigner_d(2, 0, 2, t), s / std::sqrt(2.0), 1e-14);
  }
}

TEST(WignerD, MatchesMatrixExponential) {
  for (int two_s = 1; two_s <= 6; ++two_s) {
    for (double t : {0.1, 0.77, 1.9, 3.0}) {
      const Eigen::MatrixXd expected = testing::wigner_d_by_expm(two_s, t);
      const Eigen::MatrixXd got = wigner_d_matrix(two_s, t);
      EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-12) << "2S=" << two_s << " theta=" << t;
    }
  }
}

TEST(WignerD, Composition) {
  for (int two_s = 1; two_s <= 4; ++two_s) {
    const Eigen::MatrixXd ab = wigner_d_matrix(two_s, 0.4) * wigner_d_matrix(two_s, 1.3);
    EXPECT_LT((ab - wigner_d_matrix(two_s, 1.7)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(WignerD, OrthogonalAndIdentityAtZero) {
  for (int two_s = 1; two_s <= 5; ++two_s) {
    const Eigen::MatrixXd d = wigner_d_matrix(two_s, 1.234);
    EXPECT_LT((d.transpose() * d - Eigen::MatrixXd::Identity(two_s + 1, two_s + 1)).norm(), 1e-13);
    EXPECT_EQ(wigner_d_matrix(two_s, 0.0), Eigen::MatrixXd::Identity(two_s + 1, two_s + 1));
  }
}

TEST(Rotation, UnitaryAndExactIdentityForZ) {
  for (int two_s = 1; two_s <= 4; ++two_s) {
    const int q = two_s + 1;
    const auto u = rotation_matrix<double>({0.8, 4.1}, two_s);
    EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(q, q)).norm(), 1e-13);
    EXPECT_EQ(rotation_matrix<double>({0.0, 0.0}, two_s), Eigen::MatrixXcd::Identity(q, q));
  }
}

// |n, m> is the eigenvector of n.S with eigenvalue m, and U(n) maps it to |m>.
TEST(Rotation, OutcomeStatesAreSpinEigenvectors) {
  for (int two_s = 1; two_s <= 4; ++two_s) {
    for (Direction n : {Direction{0.3, 0.2}, Direction{1.7, 5.0}, Direction{kPi, 1.0}}) {
      const Eigen::MatrixXcd ns = std::sin(n.theta) * std::cos(n.phi) * spin_x(two_s) +
                                  std::sin(n.theta) * std::sin(n.phi) * spin_y(two_s) +
                                  std::cos(n.theta) * spin_z(two_s);
      const auto u = rotation_matrix<double>(n, two_s);
      for (int level = 0; level <= two_s; ++level) {
        const Eigen::VectorXcd v = spin_coherent_state(n, two_s, level);
        const double m = 0.5 * level_to_two_m(two_s, level);
        EXPECT_LT((ns * v - m * v).norm(), 1e-12);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(two_s + 1);
        e(level) = 1.0;
        EXPECT_LT((u * v - e).norm(), 1e-12);
      }
    }
  }
}

TEST(Spin, LevelConversions) {
  EXPECT_EQ(level_to_two_m(1, 0), 1);
  EXPECT_EQ(level_to_two_m(1, 1), -1);
  EXPECT_EQ(two_m_to_level(2, -2), 2);
  EXPECT_THROW(two_m_to_level(2, 1), ParameterError);
  EXPECT_THROW(two_m_to_level(1, 3), ParameterError);
  EXPECT_EQ(two_s_from_local_dim(3), 2);
  EXPECT_THROW(two_s_from_local_dim(1), ParameterError);
}

TEST(Spin, DirectionValidation) {
  EXPECT_NO_THROW(validate(Direction{kPi, 0.0}));
  EXPECT_THROW(validate(Direction{-0.1, 0.0}), ParameterError);
  EXPECT_THROW(validate(Direction{0.5, 2 * kPi}), ParameterError);
  EXPECT_THROW(rotation_matrix<double>({4.0, 0.0}, 1), ParameterError);
}

}  // namespace
}  // namespace mpstomo
