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


#include "mpstomo/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "mpstomo/experiment.hpp"

namespace mpstomo {

namespace {

std::optional<double> field_of(const StageRecord& r, HistoryField field) {
  return field == HistoryField::r_real ? r.r_real : r.r_succ;
}

bool positive(const std::optional<double>& v) { return v && *v > 0.0 && std::isfinite(*v); }

std::vector<std::size_t> tail_of(const std::vector<StageRecord>& history, double tail_fraction,
                                 bool (*usable)(const StageRecord&, HistoryField),
                                 HistoryField field) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ParameterError("tail fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].replicas >= 100 && usable(history[i], field)) candidates.push_back(i);
  }
  const auto keep = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(candidates.size()) - 1e-12));
  return {candidates.end() - static_cast<std::ptrdiff_t>(keep), candidates.end()};
}

}  // namespace

double r_succ(const Mps& previous, const Mps& current) {
  if (previous.size() != current.size() || previous.local_dim() != current.local_dim()) {
    throw ParameterError("r_succ: models differ in shape");
  }
  return fidelity_distance(previous, current).distance;
}

PowerLawFit fit_power_law(std::span<const double> replicas, std::span<const double> values) {
  if (replicas.size() != values.size()) throw ParameterError("fit_power_law: length mismatch");
  const std::size_t n = values.size();
  if (n < 4) throw ParameterError("fit_power_law: need at least 4 points");
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(replicas[i] > 0.0) || !(values[i] > 0.0)) {
      throw ParameterError("fit_power_law: values must be positive");
    }
    design(i, 0) = 1.0;
    design(i, 1) = std::log(replicas[i]);
    y(i) = std::log(values[i]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
  PowerLawFit fit;
  fit.c = std::exp(coef(0));
  fit.alpha = coef(1);
  fit.first = 0;
  fit.last = n;
  fit.residual = std::sqrt((design * coef - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

std::vector<std::size_t> tail_window(const std::vector<StageRecord>& history, HistoryField field,
                                     double tail_fraction) {
  return tail_of(
      history, tail_fraction,
      [](const StageRecord& r, HistoryField f) { return positive(field_of(r, f)); }, field);
}

PowerLawFit fit_power_law(const std::vector<StageRecord>& history, HistoryField field,
                          double tail_fraction) {
  const auto idx = tail_window(history, field, tail_fraction);
  std::vector<double> x, y;
  for (std::size_t i : idx) {
    x.push_back(static_cast<double>(history[i].replicas));
    y.push_back(*field_of(history[i], field));
  }
  PowerLawFit fit = fit_power_law(x, y);
  fit.first = idx.front();
  fit.last = idx.back() + 1;
  return fit;
}

double tail_ratio(const std::vector<StageRecord>& history, double tail_fraction) {
  const auto idx = tail_of(
      history, tail_fraction,
      [](const StageRecord& r, HistoryField) { return r.r_real.has_value() && positive(r.r_succ); },
      HistoryField::r_succ);
  if (idx.empty()) throw ParameterError("tail_ratio: no stage carries both distances");
  double sum = 0.0;
  for (std::size_t i : idx) sum += *history[i].r_real * *history[i].r_real / *history[i].r_succ;
  return sum / static_cast<double>(idx.size());
}

std::optional<FidelityEstimate> estimate_fidelity(double c, double r_succ_now) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ParameterError("estimate_fidelity: C must be positive");
  if (!(r_succ_now >= 0.0)) throw ParameterError("estimate_fidelity: negative R_succ");
  const double r2 = c * r_succ_now;
  if (r2 > 0.5) return std::nullopt;
  return FidelityEstimate{std::sqrt(r2), std::sqrt(std::max(0.0, 1.0 - 2.0 * r2))};
}

std::size_t extrapolate_replicas(const PowerLawFit& fit, double target_r) {
  if (!(fit.alpha < 0.0)) throw UnusableFitError("power law does not decay (alpha >= 0)");
  if (!(fit.c > 0.0) || !(target_r > 0.0)) {
    throw ParameterError("extrapolate_replicas: C and target must be positive");
  }
  if (target_r >= fit.c) return 1;
  const double v = std::pow(target_r / fit.c, 1.0 / fit.alpha);
  if (!(v < static_cast<double>(std::numeric_limits<std::size_t>::max() / 2))) {
    throw UnusableFitError("projected replica count overflows");
  }
  // Guard against the rounding of pow landing just above an integer.
  const double r = std::round(v);
  return static_cast<std::size_t>(std::abs(v - r) < 1e-9 * std::max(1.0, r) ? r : std::ceil(v));
}

double per_site_fidelity(double fidelity, int n) {
  if (n < 1) throw ParameterError("per_site_fidelity: N must be positive");
  if (!(fidelity >= 0.0 && fidelity <= 1.0)) throw ParameterError("fidelity outside [0, 1]");
  return std::pow(fidelity, 1.0 / n);
}

VirtualCalibration run_virtual(const Mps& trained, const ExperimentConfig& config, int n_runs,
                               std::uint64_t seed) {
  if (n_runs < 1) throw ParameterError("run_virtual: need at least one run");
  std::vector<std::future<std::vector<StageRecord>>> runs;
  for (int i = 0; i < n_runs; ++i) {
    ExperimentConfig run = config;
    run.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    run.blind = false;
    runs.push_back(std::async(std::launch::async, [run, &trained] {
      const TomographyResult r = simulate_tomography(run, trained, SimulationMode::virtual_run);
      std::vector<StageRecord> records;
      for (const auto& row : r.history) records.push_back(row.record);
      return records;
    }));
  }
  VirtualCalibration cal;
  for (auto& f : runs) {
    cal.histories.push_back(f.get());
    cal.per_run.push_back(tail_ratio(cal.histories.back(), config.tail_fraction));
  }
  const double n = static_cast<double>(n_runs);
  cal.c = std::accumulate(cal.per_run.begin(), cal.per_run.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : cal.per_run) ss += (x - cal.c) * (x - cal.c);
  cal.spread = n_runs > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return cal;
}

}  // namespace mpstomo
