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

// Generative training of an MPS on single-shot random-basis data.
//
// The cost at bond k is
//
//   L = -1/|V| sum_shots ln(|Psi(m; n)|^2 / N) + lambda * S2_k,
//
// with N the squared norm and S2_k = -ln(Tr rho_k^2 / N^2) the Renyi-2
// entropy across bond k. It is invariant under rescaling of the merged
// two-site tensor, so the gradient is orthogonal to the tensor itself.

#ifndef MPSTOMO_TRAINING_HPP
#define MPSTOMO_TRAINING_HPP

#include <cstddef>
#include <vector>

#include "mpstomo/measurement.hpp"
#include "mpstomo/mps.hpp"

namespace mpstomo {

struct TrainConfig {
  double lambda0 = 0.01;
  double lambda_decay = 0.9;
  double step_size = 0.2;
  double step_backoff = 0.5;
  int grad_steps_per_bond = 10;
  int sweeps_per_stage = 20;
  Index d_cap = 32;
  double eta = 1e-7;           // relative singular value cutoff
  // Singular values below sqrt(shot_cutoff / |V|) of the largest are not
  // resolvable from |V| shots and get dropped as well, up to a relative
  // cutoff of eta_max.
  double shot_cutoff = 40.0;
  double eta_max = 0.2;
  // Leading sweeps of a stage that skip the shot cutoff. Starting from a
  // nearly product state, entanglement cannot otherwise grow past it.
  int warmup_sweeps = 1;
  double psi_floor = 1e-12;    // lower clamp of |Psi|^2 inside logarithms
  double convergence_tol = 1e-4;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct LossReport {
  double nll = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  double lambda = 0.0;
};

// Mean -ln |Psi(m; n)|^2 over the dataset for a normalized MPS.
double nll(const Mps& mps, const Dataset& data, double psi_floor = 1e-12);

// nll + lambda * renyi2_entropy(mps, bond).
LossReport loss_with_penalty(const Mps& mps, const Dataset& data, int bond, double lambda,
                             double psi_floor = 1e-12);

// Per-shot rotated rows U(n_k)[m_k, :], one q x |V| block per site.
class RotatedData {
 public:
  RotatedData(const Dataset& data, int n_sites, int local_dim);

  const Eigen::MatrixXcd& site(int k) const { return rows_[k]; }
  Index shots() const { return shots_; }
  int sites() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<Eigen::MatrixXcd> rows_;
  Index shots_ = 0;
};

// The cost as a function of the merged tensor at one bond, all other sites
// frozen in canonical gauge (left-canonical before the bond, right-canonical
// after). Each shot contributes Psi_s = a_s^T Theta b_s with a_s, b_s the
// rotated environments on the two sides.
class TwoSiteObjective {
 public:
  // Columns of `left_env` / `right_env` hold the contracted environment of
  // every shot (dimensions D_{k-1} x |V| and D_{k+1} x |V|).
  TwoSiteObjective(const Eigen::MatrixXcd& left_env, const Eigen::MatrixXcd& right_env,
                   const Eigen::MatrixXcd& rotated_left, const Eigen::MatrixXcd& rotated_right,
                   int local_dim, double lambda, double psi_floor);

  // Builds environments directly from an MPS whose center sits on the bond.
  static TwoSiteObjective from_mps(const Mps& mps, int bond, const Dataset& data, double lambda,
                                   double psi_floor);

  struct Evaluation {
    double nll = 0.0;
    double penalty = 0.0;
    double total = 0.0;
    Eigen::VectorXcd psi;          // unnormalized amplitude per shot
    std::size_t clamped = 0;       // shots whose |Psi|^2 / N hit the floor
  };

  Evaluation evaluate(const Eigen::MatrixXcd& theta) const;

  // -dL/dTheta^*, the ascent direction of -L. Pass the evaluation of the same
  // theta to avoid recomputing the amplitudes.
  Eigen::MatrixXcd gradient(const Eigen::MatrixXcd& theta, const Evaluation& at) const;
  Eigen::MatrixXcd gradient(const Eigen::MatrixXcd& theta) const {
    return gradient(theta, evaluate(theta));
  }

  double lambda() const { return lambda_; }

 private:
  Eigen::MatrixXcd a_;  // (q D_{k-1}) x |V|
  Eigen::MatrixXcd b_;  // (q D_{k+1}) x |V|
  int local_dim_;
  double lambda_;
  double psi_floor_;
};

struct GradientResult {
  TwoSiteTensor gradient;
  std::size_t clamped = 0;
};

// -dL/dA^(k,k+1)* for the merged tensor at `bond`. The MPS center must sit on
// site bond or bond+1.
GradientResult two_site_gradient(const Mps& mps, int bond, const Dataset& data, double lambda,
                                 double psi_floor = 1e-12);

struct SweepResult {
  Mps mps;
  LossReport loss;
  std::size_t clamped = 0;
};

// One left-to-right-to-left pass of two-site gradient updates. Ends with the
// canonical center on site 0.
SweepResult sweep(Mps mps, const Dataset& data, const TrainConfig& config, double lambda);

struct StageResult {
  Mps mps;
  std::vector<LossReport> history;  // one entry per sweep
  LossReport final_loss;            // evaluated with lambda = 0
  std::size_t clamped = 0;
};

// Repeated sweeps with lambda_t = lambda0 * decay^t until the relative change
// of the total loss drops below the tolerance or the sweep budget runs out.
StageResult train_stage(Mps mps, const Dataset& data, const TrainConfig& config);

}  // namespace mpstomo

#endif  // MPSTOMO_TRAINING_HPP
