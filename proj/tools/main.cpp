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


// mpstomo command line: target, tomo, suite, virtual, fit, report.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpstomo/errors.hpp"
#include "mpstomo/estimation.hpp"
#include "mpstomo/experiment.hpp"
#include "mpstomo/serialize.hpp"
#include "mpstomo/states.hpp"
#include "mpstomo/suite.hpp"

namespace {

using namespace mpstomo;

enum ExitCode { kOk = 0, kIo = 1, kParameter = 2, kNumeric = 3 };

// Target flags shared by several subcommands.
struct TargetFlags {
  std::optional<std::string> kind;
  std::optional<int> n;
  std::optional<double> theta;
  std::optional<long> d_max;
  std::optional<std::uint64_t> seed;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "W, Cluster, Dimer or Random");
    app->add_option("--n", n, "number of sites");
    app->add_option("--theta", theta, "W-state phase in radians");
    app->add_option("--d-max", d_max, "bond dimension of a random target");
    app->add_option("--target-seed", seed, "seed of a random target");
  }

  void apply(TargetSpec& t) const {
    if (kind) t.kind = parse_target_kind(*kind);
    if (n) t.n = *n;
    if (theta) t.theta = *theta;
    if (d_max) t.d_max = *d_max;
    if (seed) t.seed = *seed;
  }
};

// Protocol flags: config file first, then individual flags, then --set.
struct ProtocolFlags {
  std::string config_file;
  TargetFlags target;
  std::optional<std::string> target_path;
  std::optional<double> threshold;
  std::optional<std::size_t> batch_initial;
  std::optional<double> batch_growth;
  std::optional<std::size_t> batch_max;
  std::optional<std::size_t> max_replicas;
  std::optional<double> noise;
  std::optional<int> virtual_runs;
  std::optional<std::string> stop;
  bool blind = false;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App* app, bool with_target) {
    app->add_option("--config", config_file, "key = value configuration file");
    if (with_target) {
      target.add(app);
      app->add_option("--target-path", target_path, "serialized target MPS");
    }
    app->add_option("--threshold", threshold, "fidelity threshold of the stop rule");
    app->add_option("--batch-initial", batch_initial, "size of the first batch");
    app->add_option("--batch-growth", batch_growth, "batch growth factor");
    app->add_option("--batch-max", batch_max, "largest batch");
    app->add_option("--max-replicas", max_replicas, "shot budget");
    app->add_option("--noise", noise, "depolarizing probability epsilon");
    app->add_option("--virtual-runs", virtual_runs, "virtual tomographies per calibration");
    app->add_option("--stop", stop, "stop signal: estimated, true or none");
    app->add_flag("--blind", blind, "hide the true fidelity");
    app->add_option("--set", overrides, "extra key=value settings (e.g. train.lambda0=0.02)");
    app->add_option("--seed", seed, "run seed")->required();
    app->add_option("--out", out, "output directory")->required();
  }

  ExperimentConfig build(ExperimentConfig config) const {
    if (!config_file.empty()) config = load_config(config_file, config);
    target.apply(config.target);
    if (target_path) config.target_path = *target_path;
    if (threshold) config.fidelity_threshold = *threshold;
    if (batch_initial) config.batch.initial = *batch_initial;
    if (batch_growth) config.batch.growth = *batch_growth;
    if (batch_max) config.batch.max_size = *batch_max;
    if (max_replicas) config.max_replicas = *max_replicas;
    if (noise) config.noise_epsilon = *noise;
    if (virtual_runs) config.virtual_runs = *virtual_runs;
    if (stop) config.stop_signal = parse_stop_signal(*stop);
    if (blind) config.blind = true;
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + kv + "'");
      set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    config.seed = seed;
    config.output_dir = out;
    config.validate();
    return config;
  }
};

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      grid.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError("bad grid entry '" + item + "'");
    }
  }
  if (grid.empty()) throw ParameterError("grid is empty");
  return grid;
}

void print_history_tail(const TomographyResult& r) {
  const auto& last = r.history.back();
  std::cout << "stages " << r.history.size() << ", replicas " << last.record.replicas;
  if (last.record.f_true) std::cout << ", f_true " << format_number(*last.record.f_true);
  if (last.f_est) std::cout << ", f_est " << format_number(*last.f_est);
  if (r.replicas_at_threshold) std::cout << ", threshold reached at " << *r.replicas_at_threshold;
  std::cout << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Pure-state tomography with matrix product states"};
  app.require_subcommand(1);

  // target
  auto* target_cmd = app.add_subcommand("target", "build a target state and serialize it");
  TargetFlags target_flags;
  target_flags.add(target_cmd);
  std::string target_out;
  target_cmd->add_option("--out", target_out, "output .mps file")->required();

  // tomo
  auto* tomo_cmd = app.add_subcommand("tomo", "run one tomography experiment");
  ProtocolFlags tomo_flags;
  tomo_flags.add(tomo_cmd, true);

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "replicas needed versus N or D_max");
  ProtocolFlags suite_flags;
  suite_flags.add(suite_cmd, true);
  std::string suite_kind = "size";
  std::string suite_grid;
  int suite_seeds = 8;
  suite_cmd->add_option("--suite", suite_kind, "size or bond")->required();
  suite_cmd->add_option("--grid", suite_grid, "comma-separated N or D_max values")->required();
  suite_cmd->add_option("--seeds", suite_seeds, "runs per grid point");

  // virtual
  auto* virtual_cmd = app.add_subcommand("virtual", "calibrate C on a trained model");
  ProtocolFlags virtual_flags;
  virtual_flags.add(virtual_cmd, false);
  std::string model_path;
  int runs = 8;
  virtual_cmd->add_option("--model", model_path, "trained model .mps")->required();
  virtual_cmd->add_option("--runs", runs, "number of virtual runs");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit R = C |V|^alpha to a history");
  std::string history_path;
  std::string field = "r_real";
  double tail = 0.5;
  std::optional<double> target_r;
  fit_cmd->add_option("--history", history_path, "history.csv")->required();
  fit_cmd->add_option("--field", field, "r_real or r_succ");
  fit_cmd->add_option("--tail", tail, "fraction of stages in the fit window");
  fit_cmd->add_option("--target-r", target_r, "extrapolate |V| for this distance");

  // report
  auto* report_cmd = app.add_subcommand("report", "collect run directories into CSV tables");
  std::vector<std::string> inputs;
  std::string report_out;
  report_cmd->add_option("inputs", inputs, "run directories or their parents")->required();
  report_cmd->add_option("--out", report_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kParameter;
  }

  if (*target_cmd) {
    TargetSpec spec;
    target_flags.apply(spec);
    const Mps mps = build_target(spec);
    save_mps(target_out, mps);
    std::cout << to_string(spec.kind) << " N=" << mps.size() << " max bond " << mps.max_bond_dim()
              << " -> " << target_out << '\n';
  } else if (*tomo_cmd) {
    const ExperimentConfig config = tomo_flags.build({});
    const TomographyResult r = run_tomography(config);
    print_history_tail(r);
  } else if (*suite_cmd) {
    ExperimentConfig defaults;
    defaults.stop_signal = StopSignal::truth;
    defaults.virtual_runs = 0;
    SuiteConfig suite;
    suite.kind = parse_suite_kind(suite_kind);
    suite.grid = parse_grid(suite_grid);
    suite.seeds = suite_seeds;
    suite.base = suite_flags.build(defaults);
    const SuiteResult r = run_scaling_suite(suite);
    std::filesystem::create_directories(suite.base.output_dir);
    const auto path = suite.base.output_dir / "suite.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_suite_csv(out, r);
    write_suite_csv(std::cout, r);
  } else if (*virtual_cmd) {
    ExperimentConfig config = virtual_flags.build({});
    const Mps model = load_mps(model_path);
    const VirtualCalibration cal = run_virtual(model, config, runs, config.seed);
    std::filesystem::create_directories(config.output_dir);
    const auto path = config.output_dir / "virtual.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "run,ratio\n";
    for (std::size_t i = 0; i < cal.per_run.size(); ++i) {
      out << i << ',' << format_number(cal.per_run[i]) << '\n';
    }
    for (std::size_t i = 0; i < cal.histories.size(); ++i) {
      std::vector<HistoryRow> rows;
      for (std::size_t s = 0; s < cal.histories[i].size(); ++s) {
        rows.push_back({static_cast<int>(s), cal.histories[i][s], {}, {}, {}, {}});
      }
      std::ofstream h(config.output_dir / ("virtual_" + std::to_string(i) + ".csv"));
      write_history_csv(h, rows);
    }
    std::cout << "C = " << format_number(cal.c) << " +- " << format_number(cal.spread) << '\n';
  } else if (*fit_cmd) {
    std::ifstream in(history_path);
    if (!in) throw IoError("cannot open " + history_path);
    const auto rows = read_history_csv(in);
    std::vector<StageRecord> records;
    for (const auto& r : rows) records.push_back(r.record);
    HistoryField f;
    if (field == "r_real") {
      f = HistoryField::r_real;
    } else if (field == "r_succ") {
      f = HistoryField::r_succ;
    } else {
      throw ParameterError("--field must be r_real or r_succ");
    }
    const PowerLawFit fit = fit_power_law(records, f, tail);
    std::cout << "C = " << format_number(fit.c) << "\nalpha = " << format_number(fit.alpha)
              << "\nwindow = stages " << fit.first << ".." << fit.last - 1
              << "\nresidual = " << format_number(fit.residual) << '\n';
    if (target_r) std::cout << "replicas = " << extrapolate_replicas(fit, *target_r) << '\n';
  } else if (*report_cmd) {
    std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
    const std::size_t n = report(paths, report_out);
    std::cout << n << " runs -> " << report_out << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mpstomo::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParameter;
  } catch (const mpstomo::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
}
