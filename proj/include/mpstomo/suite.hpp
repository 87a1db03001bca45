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


// Scaling suites over system size or bond dimension, and the report that
// turns run directories into per-figure CSV tables.

#ifndef MPSTOMO_SUITE_HPP
#define MPSTOMO_SUITE_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mpstomo/experiment.hpp"

namespace mpstomo {

enum class SuiteKind { size, bond };

std::string to_string(SuiteKind kind);
SuiteKind parse_suite_kind(const std::string& s);

struct SuiteConfig {
  SuiteKind kind = SuiteKind::size;
  std::vector<int> grid;  // N (size suite) or D_max (bond suite)
  int seeds = 8;
  // Protocol of every run. The size suite varies target.n of base.target;
  // the bond suite uses random targets with N = base.target.n and the seed
  // index as target seed. Runs go to base.output_dir/<x>_<seed> when set.
  ExperimentConfig base;
};

struct SuitePoint {
  int x = 0;
  double mean = 0.0;  // over the runs that reached the threshold
  double stddev = 0.0;
  std::vector<std::optional<std::size_t>> replicas;  // per seed
  int reached = 0;
};

struct ScalingFit {
  double gamma = 0.0;  // |V| = gamma x^beta
  double beta = 0.0;
  double residual = 0.0;
};

struct SuiteResult {
  SuiteKind kind = SuiteKind::size;
  std::vector<SuitePoint> points;
  std::optional<ScalingFit> fit;  // bond suite, all points reached
};

SuiteResult run_scaling_suite(const SuiteConfig& config);

// Least squares of ln y on ln x; needs two points with distinct x.
ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y);

void write_suite_csv(std::ostream& out, const SuiteResult& result);

// |V| of the first stage from which `fidelity` stays >= threshold for two
// consecutive stages, using f_true where recorded and f_est otherwise.
std::optional<std::size_t> replicas_for_threshold(const std::vector<HistoryRow>& history,
                                                  double threshold);

// Reads every run directory (one holding run.meta) in `inputs` or directly
// below them and writes summary.csv, fig2.csv, fig3.csv, fig4.csv and
// fig5.csv into `out_dir`. Returns the number of runs.
std::size_t report(const std::vector<std::filesystem::path>& inputs,
                   const std::filesystem::path& out_dir);

}  // namespace mpstomo

#endif  // MPSTOMO_SUITE_HPP
