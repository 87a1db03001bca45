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


// Convergence tracking and fidelity estimation.
//
// During tomography the distance to the target R_real falls like |V|^{-1/2}
// while the distance between successive models R_succ falls like |V|^{-1},
// so R_real^2 / R_succ tends to a constant C. C is calibrated on virtual
// targets whose truth is known, and sqrt(C R_succ) then stands in for the
// unknown R_real.

#ifndef MPSTOMO_ESTIMATION_HPP
#define MPSTOMO_ESTIMATION_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mpstomo/mps.hpp"

namespace mpstomo {

struct ExperimentConfig;

struct StageRecord {
  std::size_t replicas = 0;
  std::optional<double> r_real;
  std::optional<double> r_succ;
  std::optional<double> f_true;
  double nll = 0.0;
};

enum class HistoryField { r_real, r_succ };

struct PowerLawFit {
  double c = 0.0;
  double alpha = 0.0;
  std::size_t first = 0;  // window [first, last) into the history
  std::size_t last = 0;
  double residual = 0.0;  // rms of ln R about the fitted line
};

// Distance between the models of two successive stages.
double r_succ(const Mps& previous, const Mps& current);

// Least squares of ln R on ln |V|. Needs at least four points, all positive.
PowerLawFit fit_power_law(std::span<const double> replicas, std::span<const double> values);

// Indices of the tail window: the last `tail_fraction` of the stages with
// |V| >= 100 that carry `field` (and, for the ratio, both fields).
std::vector<std::size_t> tail_window(const std::vector<StageRecord>& history, HistoryField field,
                                     double tail_fraction = 0.5);

PowerLawFit fit_power_law(const std::vector<StageRecord>& history, HistoryField field,
                          double tail_fraction = 0.5);

// Mean of R_real^2 / R_succ over the tail window.
double tail_ratio(const std::vector<StageRecord>& history, double tail_fraction = 0.5);

struct FidelityEstimate {
  double r_est = 0.0;
  double f_est = 1.0;
};

// R_est = sqrt(C r_succ), F_est = sqrt(1 - 2 R_est^2). Empty when
// C r_succ > 1/2, where the estimate carries no meaning yet.
std::optional<FidelityEstimate> estimate_fidelity(double c, double r_succ_now);

// Smallest |V| with C |V|^alpha <= target_r.
std::size_t extrapolate_replicas(const PowerLawFit& fit, double target_r);

// F^{1/N}, comparable across system sizes.
double per_site_fidelity(double fidelity, int n);

struct VirtualCalibration {
  double c = 0.0;       // mean tail ratio over the runs
  double spread = 0.0;  // sample standard deviation
  std::vector<double> per_run;
  std::vector<std::vector<StageRecord>> histories;
};

// Tomography of `trained` used as a known target, n_runs times with
// independent streams derived from `seed`. The protocol (batches, training,
// noise, max_replicas) comes from `config`; its target and stop rule are
// ignored. Runs execute concurrently.
VirtualCalibration run_virtual(const Mps& trained, const ExperimentConfig& config, int n_runs,
                               std::uint64_t seed);

}  // namespace mpstomo

#endif  // MPSTOMO_ESTIMATION_HPP
