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
#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "mpstomo/estimation.hpp"
#include "mpstomo/experiment.hpp"
#include "mpstomo/states.hpp"

namespace mpstomo {
namespace {

using testing::random_mps;

std::vector<StageRecord> synthetic_history(double c_real, double a_real, double c_succ,
                                           double a_succ) {
  std::vector<StageRecord> h;
  for (std::size_t v = 50; v <= 5000; v += 250) {
    StageRecord r;
    r.replicas = v;
    r.r_real = c_real * std::pow(static_cast<double>(v), a_real);
    if (v > 50) r.r_succ = c_succ * std::pow(static_cast<double>(v), a_succ);
    h.push_back(r);
  }
  return h;
}

ExperimentConfig small_protocol(int n, std::size_t max_replicas) {
  ExperimentConfig c;
  c.target.kind = TargetKind::W;
  c.target.n = n;
  c.max_replicas = max_replicas;
  c.virtual_runs = 0;
  c.stop_signal = StopSignal::none;
  return c;
}

TEST(RSucc, IdenticalOrthogonalAndDense) {
  const Mps w = w_state(4, 0.2);
  EXPECT_NEAR(r_succ(w, w), 0.0, 1e-6);
  std::vector<SiteTensor> up(4, SiteTensor(2, 1, 1));
  for (auto& t : up) t[0](0, 0) = 1.0;
  EXPECT_NEAR(r_succ(w, Mps(up)), 1.0 / std::sqrt(2.0), 1e-12);

  const Mps a = random_mps(5, 2, 3, 1), b = random_mps(5, 2, 3, 2);
  const double f = std::abs(to_dense(a).dot(to_dense(b)));
  EXPECT_NEAR(r_succ(a, b), std::sqrt((1 - f * f) / 2), 1e-12);
  EXPECT_THROW(r_succ(a, w), ParameterError);
}

TEST(PowerLaw, ExactPoints) {
  std::vector<double> v, r;
  for (double x : {100.0, 300.0, 1000.0, 3000.0, 10000.0}) {
    v.push_back(x);
    r.push_back(3.0 / std::sqrt(x));
  }
  const PowerLawFit fit = fit_power_law(v, r);
  EXPECT_NEAR(fit.c, 3.0, 1e-9);
  EXPECT_NEAR(fit.alpha, -0.5, 1e-9);
  EXPECT_NEAR(fit.residual, 0.0, 1e-9);
}

TEST(PowerLaw, NoisyPointsOverManyTrials) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v, r;
    for (double x = 100; x <= 10000; x *= 1.3) {
      v.push_back(x);
      r.push_back(2.0 * std::pow(x, -1.0) * (1.0 + noise(rng)));
    }
    EXPECT_NEAR(fit_power_law(v, r).alpha, -1.0, 0.05) << trial;
  }
}

TEST(PowerLaw, ScaleEquivariant) {
  std::vector<double> v{120, 400, 900, 2000, 5000}, r{0.3, 0.2, 0.11, 0.09, 0.05};
  const PowerLawFit base = fit_power_law(v, r);
  for (double& x : r) x *= 7.5;
  const PowerLawFit scaled = fit_power_law(v, r);
  EXPECT_NEAR(scaled.c, 7.5 * base.c, 1e-9 * scaled.c);
  EXPECT_NEAR(scaled.alpha, base.alpha, 1e-12);
}

TEST(PowerLaw, Errors) {
  std::vector<double> v{100, 200, 300}, r{0.1, 0.05, 0.03};
  EXPECT_THROW(fit_power_law(v, r), ParameterError);
  v.push_back(400);
  r.push_back(0.0);
  EXPECT_THROW(fit_power_law(v, r), ParameterError);
  r.back() = 0.02;
  EXPECT_NO_THROW(fit_power_law(v, r));
}

TEST(TailWindow, LastHalfAboveHundred) {
  const auto h = synthetic_history(1.0, -0.5, 1.0, -1.0);
  const auto w = tail_window(h, HistoryField::r_real);
  // 20 stages, 19 with |V| >= 100, tail = ceil(9.5) = 10
  ASSERT_EQ(w.size(), 10u);
  EXPECT_EQ(w.back(), h.size() - 1);
  EXPECT_EQ(w.front(), h.size() - 10);
}

TEST(TailFit, RecoversSyntheticExponents) {
  const auto h = synthetic_history(1.3, -0.5, 0.8, -1.0);
  const PowerLawFit real = fit_power_law(h, HistoryField::r_real);
  const PowerLawFit succ = fit_power_law(h, HistoryField::r_succ);
  EXPECT_NEAR(real.alpha, -0.5, 1e-9);
  EXPECT_NEAR(succ.alpha, -1.0, 1e-9);
  EXPECT_NEAR(real.c, 1.3, 1e-9);
  // R_real^2 / R_succ = 1.69 / 0.8 exactly for these exponents.
  EXPECT_NEAR(tail_ratio(h), 1.69 / 0.8, 1e-9);
  EXPECT_THROW(tail_ratio(std::vector<StageRecord>{}), ParameterError);
}

TEST(EstimateFidelity, Formula) {
  const auto e = estimate_fidelity(1.0, 0.005);
  ASSERT_TRUE(e);
  EXPECT_NEAR(e->r_est, 0.0707106781186548, 1e-12);
  EXPECT_NEAR(e->f_est, 0.9949874371066200, 1e-12);
  EXPECT_EQ(estimate_fidelity(2.0, 0.0)->f_est, 1.0);
  EXPECT_FALSE(estimate_fidelity(1.0, 0.6));
  EXPECT_THROW(estimate_fidelity(0.0, 0.1), ParameterError);
}

TEST(EstimateFidelity, MonotoneInRSucc) {
  double previous = 1.1;
  for (double r = 0.0; r <= 0.25; r += 0.01) {
    const double f = estimate_fidelity(2.0, r)->f_est;
    EXPECT_LT(f, previous);
    EXPECT_GE(f, 0.0);
    previous = f;
  }
}

TEST(Extrapolate, Inversion) {
  PowerLawFit fit;
  fit.c = 1.0;
  fit.alpha = -0.5;
  EXPECT_EQ(extrapolate_replicas(fit, 0.1), 100u);
  EXPECT_EQ(extrapolate_replicas(fit, 2.0), 1u);
  fit.alpha = 0.0;
  EXPECT_THROW(extrapolate_replicas(fit, 0.1), UnusableFitError);
}

TEST(Extrapolate, SyntheticLaw) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<double> v, r;
  for (double x = 200; x <= 5000; x *= 1.25) {
    v.push_back(x);
    r.push_back(0.9 * std::pow(x, -0.5) * (1.0 + noise(rng)));
  }
  const double target = 0.005;
  const double truth = std::pow(target / 0.9, -2.0);
  const double projected = static_cast<double>(extrapolate_replicas(fit_power_law(v, r), target));
  EXPECT_NEAR(projected / truth, 1.0, 0.1);
}

TEST(PerSite, NotBelowFidelity) {
  for (int n = 1; n <= 20; ++n) {
    for (double f : {1e-3, 0.5, 0.9, 0.995, 1.0}) EXPECT_GE(per_site_fidelity(f, n), f);
  }
  EXPECT_NEAR(per_site_fidelity(0.81, 2), 0.9, 1e-15);
}

TEST(Virtual, DeterministicPerSeed) {
  const Mps model = w_state(4, 0.1);
  const ExperimentConfig cfg = small_protocol(4, 600);
  const VirtualCalibration a = run_virtual(model, cfg, 2, 11);
  const VirtualCalibration b = run_virtual(model, cfg, 2, 11);
  ASSERT_EQ(a.histories.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    ASSERT_EQ(a.histories[i].size(), b.histories[i].size());
    for (std::size_t s = 0; s < a.histories[i].size(); ++s) {
      EXPECT_EQ(a.histories[i][s].r_real, b.histories[i][s].r_real);
      EXPECT_EQ(a.histories[i][s].r_succ, b.histories[i][s].r_succ);
    }
  }
  EXPECT_EQ(a.c, b.c);
  EXPECT_NE(a.per_run[0], a.per_run[1]);
}

TEST(Virtual, MatchesRealRunOnTheSameTarget) {
  const Mps target = w_state(6, 0.1);
  const ExperimentConfig cfg = small_protocol(6, 3000);
  const VirtualCalibration v = run_virtual(target, cfg, 6, 21);
  const TomographyResult real = simulate_tomography(cfg, target);
  std::vector<StageRecord> records;
  for (const HistoryRow& row : real.history) records.push_back(row.record);
  const double ratio = tail_ratio(records);
  EXPECT_LE(std::abs(ratio - v.c), 2 * v.spread) << "real " << ratio << " virtual " << v.c;
}

}  // namespace
}  // namespace mpstomo
