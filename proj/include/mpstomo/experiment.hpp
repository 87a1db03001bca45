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


// The measure -> train -> estimate -> stop loop, its configuration and the
// files a run leaves behind.

#ifndef MPSTOMO_EXPERIMENT_HPP
#define MPSTOMO_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mpstomo/estimation.hpp"
#include "mpstomo/measurement.hpp"
#include "mpstomo/mps.hpp"
#include "mpstomo/states.hpp"
#include "mpstomo/training.hpp"

namespace mpstomo {

// Which fidelity the stop rule watches. `truth` needs a known target; `none`
// runs to max_replicas.
enum class StopSignal { estimated, truth, none };

std::string to_string(StopSignal s);
StopSignal parse_stop_signal(const std::string& s);

// Geometric batches up to `max_size`, constant afterwards. Constant
// increments are what make R_succ fall like 1/|V|.
struct BatchSchedule {
  std::size_t initial = 50;
  double growth = 1.5;
  std::size_t max_size = 500;

  friend bool operator==(const BatchSchedule&, const BatchSchedule&) = default;
};

struct ExperimentConfig {
  TargetSpec target;
  std::filesystem::path target_path;  // serialized MPS; overrides `target` when set
  double fidelity_threshold = 0.995;
  BatchSchedule batch;
  std::size_t max_replicas = 10000;
  double noise_epsilon = 0.0;
  TrainConfig train;
  Index init_bond_dim = 2;
  int virtual_runs = 8;
  std::size_t calibration_start = 200;  // |V| of the first virtual calibration
  double calibration_growth = 2.0;      // recalibrate once |V| grew by this factor
  double tail_fraction = 0.5;
  StopSignal stop_signal = StopSignal::estimated;
  bool blind = false;  // hide r_real and f_true as in a laboratory run
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;

  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// `key = value` lines, '#' comments, dotted prefixes (train.lambda0 = 0.01).
// Unknown keys and bad values raise FormatError with the line number.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
// Throws ParameterError for unknown keys or unparsable values.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
// Every key in a fixed order; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const ExperimentConfig& config);

// Shortest decimal text that reads back to the same double.
std::string format_number(double x);

// Independent 64-bit seed for stream `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct HistoryRow {
  int stage = 0;
  StageRecord record;
  std::optional<double> f_est;
  std::optional<double> c_est;
  std::optional<double> alpha_real;
  std::optional<double> alpha_succ;
};

struct LossRow {
  std::size_t sweep = 0;
  LossReport loss;
};

struct TomographyResult {
  std::vector<HistoryRow> history;
  std::vector<LossRow> losses;
  Mps model;
  Dataset data;
  // |V| at the first of the consecutive stages that fired the stop rule.
  std::optional<std::size_t> replicas_at_threshold;
  std::optional<VirtualCalibration> calibration;  // the latest one
};

enum class SimulationMode {
  full,         // stop rule and virtual calibration active
  virtual_run,  // run to max_replicas, no nested calibration
};

// The whole loop against a known target, without touching the filesystem.
// Throws ParameterError("no stages") when max_replicas is zero.
TomographyResult simulate_tomography(const ExperimentConfig& config, const Mps& target,
                                     SimulationMode mode = SimulationMode::full);

// Target from the config (built or loaded).
Mps resolve_target(const ExperimentConfig& config);

// simulate_tomography plus, when output_dir is set, history.csv, loss.csv,
// model.mps, shots.txt and run.meta in that directory.
TomographyResult run_tomography(const ExperimentConfig& config);

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history);
void write_loss_csv(std::ostream& out, const std::vector<LossRow>& losses);
void write_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config,
                     const TomographyResult& result, int two_s);

// Parses history.csv back. Malformed rows raise FormatError with the line.
std::vector<HistoryRow> read_history_csv(std::istream& in);

}  // namespace mpstomo

#endif  // MPSTOMO_EXPERIMENT_HPP
