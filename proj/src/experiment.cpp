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


#include "mpstomo/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <type_traits>

#include "mpstomo/serialize.hpp"

namespace mpstomo {

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string to_string(StopSignal s) {
  switch (s) {
    case StopSignal::estimated: return "estimated";
    case StopSignal::truth: return "true";
    case StopSignal::none: return "none";
  }
  return "?";
}

StopSignal parse_stop_signal(const std::string& s) {
  if (s == "estimated") return StopSignal::estimated;
  if (s == "true") return StopSignal::truth;
  if (s == "none") return StopSignal::none;
  throw ParameterError("stop signal must be 'estimated', 'true' or 'none', got '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (target_path.empty()) target.validate();
  if (!(fidelity_threshold > 0.0 && fidelity_threshold < 1.0)) {
    throw ParameterError("fidelity_threshold must lie in (0, 1)");
  }
  if (batch.initial < 1) throw ParameterError("batch.initial must be positive");
  if (batch.max_size < batch.initial) throw ParameterError("batch.max_size must be >= batch.initial");
  if (!(batch.growth >= 1.0) || !std::isfinite(batch.growth)) {
    throw ParameterError("batch.growth must be >= 1");
  }
  if (!(noise_epsilon >= 0.0 && noise_epsilon <= 1.0)) {
    throw ParameterError("noise_epsilon must lie in [0, 1]");
  }
  if (init_bond_dim < 1) throw ParameterError("init_bond_dim must be positive");
  if (virtual_runs < 0) throw ParameterError("virtual_runs must be non-negative");
  if (!(calibration_growth >= 1.0)) throw ParameterError("calibration.growth must be >= 1");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ParameterError("tail_fraction must lie in (0, 1]");
  }
  if (blind && stop_signal == StopSignal::truth) {
    throw ParameterError("a blind run cannot stop on the true fidelity");
  }
  train.validate();
}

// ---------------------------------------------------------------------------
// Config text

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double x) { return format_number(x); }

template <typename T>
T parse_number(const std::string& v, const std::string& key) {
  T out{};
  const char* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (v.empty() || r.ec != std::errc() || r.ptr != end) {
    throw ParameterError("bad value '" + v + "' for " + key);
  }
  return out;
}

template <typename T>
void parse_into(T& dst, const std::string& v, const std::string& key) {
  if constexpr (std::is_same_v<T, bool>) {
    if (v == "true" || v == "1" || v == "yes") {
      dst = true;
    } else if (v == "false" || v == "0" || v == "no") {
      dst = false;
    } else {
      throw ParameterError("bad boolean '" + v + "' for " + key);
    }
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    dst = v;
  } else if constexpr (std::is_same_v<T, TargetKind>) {
    dst = parse_target_kind(v);
  } else if constexpr (std::is_same_v<T, StopSignal>) {
    dst = parse_stop_signal(v);
  } else {
    dst = parse_number<T>(v, key);
  }
}

template <typename T>
std::string format_value(const T& x) {
  if constexpr (std::is_same_v<T, bool>) {
    return x ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::filesystem::path>) {
    return x.string();
  } else if constexpr (std::is_same_v<T, TargetKind> || std::is_same_v<T, StopSignal>) {
    return to_string(x);
  } else if constexpr (std::is_floating_point_v<T>) {
    return format_double(x);
  } else {
    return std::to_string(x);
  }
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Access>
Field field(std::string key, Access access) {
  return {key,
          [access, key](ExperimentConfig& c, const std::string& v) { parse_into(access(c), v, key); },
          [access](const ExperimentConfig& c) { return format_value(access(c)); }};
}

#define MPSTOMO_FIELD(key, expr) field(key, [](auto& c) -> auto& { return c.expr; })

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      MPSTOMO_FIELD("target.kind", target.kind),
      MPSTOMO_FIELD("target.n", target.n),
      MPSTOMO_FIELD("target.theta", target.theta),
      MPSTOMO_FIELD("target.d_max", target.d_max),
      MPSTOMO_FIELD("target.seed", target.seed),
      MPSTOMO_FIELD("target.path", target_path),
      MPSTOMO_FIELD("fidelity_threshold", fidelity_threshold),
      MPSTOMO_FIELD("batch.initial", batch.initial),
      MPSTOMO_FIELD("batch.growth", batch.growth),
      MPSTOMO_FIELD("batch.max_size", batch.max_size),
      MPSTOMO_FIELD("max_replicas", max_replicas),
      MPSTOMO_FIELD("noise_epsilon", noise_epsilon),
      MPSTOMO_FIELD("init_bond_dim", init_bond_dim),
      MPSTOMO_FIELD("virtual_runs", virtual_runs),
      MPSTOMO_FIELD("calibration.start", calibration_start),
      MPSTOMO_FIELD("calibration.growth", calibration_growth),
      MPSTOMO_FIELD("tail_fraction", tail_fraction),
      MPSTOMO_FIELD("stop_signal", stop_signal),
      MPSTOMO_FIELD("blind", blind),
      MPSTOMO_FIELD("seed", seed),
      MPSTOMO_FIELD("output_dir", output_dir),
      MPSTOMO_FIELD("train.lambda0", train.lambda0),
      MPSTOMO_FIELD("train.lambda_decay", train.lambda_decay),
      MPSTOMO_FIELD("train.step_size", train.step_size),
      MPSTOMO_FIELD("train.step_backoff", train.step_backoff),
      MPSTOMO_FIELD("train.grad_steps_per_bond", train.grad_steps_per_bond),
      MPSTOMO_FIELD("train.sweeps_per_stage", train.sweeps_per_stage),
      MPSTOMO_FIELD("train.d_cap", train.d_cap),
      MPSTOMO_FIELD("train.eta", train.eta),
      MPSTOMO_FIELD("train.shot_cutoff", train.shot_cutoff),
      MPSTOMO_FIELD("train.eta_max", train.eta_max),
      MPSTOMO_FIELD("train.warmup_sweeps", train.warmup_sweeps),
      MPSTOMO_FIELD("train.psi_floor", train.psi_floor),
      MPSTOMO_FIELD("train.convergence_tol", train.convergence_tol),
  };
  return table;
}

#undef MPSTOMO_FIELD

}  // namespace

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(config, value);
      return;
    }
  }
  throw ParameterError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("expected 'key = value'", number);
    try {
      set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const FormatError&) {
      throw;
    } catch (const ParameterError& e) {
      throw FormatError(e.what(), number);
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& config) {
  for (const auto& f : fields()) out << f.key << " = " << f.get(config) << '\n';
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// ---------------------------------------------------------------------------
// The loop

namespace {

std::optional<double> try_alpha(const std::vector<StageRecord>& records, HistoryField field,
                                double tail_fraction) {
  if (tail_window(records, field, tail_fraction).size() < 4) return std::nullopt;
  return fit_power_law(records, field, tail_fraction).alpha;
}

}  // namespace

TomographyResult simulate_tomography(const ExperimentConfig& config, const Mps& target,
                                     SimulationMode mode) {
  config.validate();
  if (config.max_replicas == 0) throw ParameterError("no stages: max_replicas is zero");
  const bool full = mode == SimulationMode::full;
  const bool known = !config.blind;
  const int n = target.size();

  Rng rng(derive_seed(config.seed, 0));
  const ShotSampler sampler(target);
  TomographyResult res;
  res.model = random_init(n, target.local_dim(), config.init_bond_dim, derive_seed(config.seed, 1));

  double batch = static_cast<double>(config.batch.initial);
  std::optional<Mps> previous;
  std::optional<double> c;
  std::size_t calibrated_at = 0;
  std::vector<StageRecord> records;
  int above = 0;
  for (int stage = 0; res.data.size() < config.max_replicas; ++stage) {
    const auto want = std::clamp<std::size_t>(static_cast<std::size_t>(batch), 1,
                                              config.batch.max_size);
    const auto take = std::min(want, config.max_replicas - res.data.size());
    batch *= config.batch.growth;
    for (std::size_t i = 0; i < take; ++i) {
      const MeasurementBasis basis = sample_basis(n, rng);
      res.data.append(config.noise_epsilon > 0.0
                          ? sampler.draw_noisy(basis, config.noise_epsilon, rng)
                          : sampler.draw(basis, rng));
    }

    // Only the randomly initialized first stage needs the warmup.
    TrainConfig train = config.train;
    if (stage > 0) train.warmup_sweeps = 0;
    StageResult trained = train_stage(std::move(res.model), res.data, train);
    res.model = std::move(trained.mps);
    for (const auto& l : trained.history) res.losses.push_back({res.losses.size(), l});

    HistoryRow row;
    row.stage = stage;
    row.record.replicas = res.data.size();
    row.record.nll = trained.final_loss.nll;
    if (known) {
      const FidelityDistance fd = fidelity_distance(res.model, target);
      row.record.f_true = fd.fidelity;
      row.record.r_real = fd.distance;
    }
    if (previous) row.record.r_succ = r_succ(*previous, res.model);
    previous = res.model;

    const std::size_t size = res.data.size();
    if (full && config.virtual_runs > 0 && size >= config.calibration_start &&
        (calibrated_at == 0 ||
         static_cast<double>(size) >= config.calibration_growth * static_cast<double>(calibrated_at))) {
      ExperimentConfig protocol = config;
      protocol.max_replicas = size;
      VirtualCalibration cal = run_virtual(res.model, protocol, config.virtual_runs,
                                           derive_seed(config.seed, 2 + static_cast<std::uint64_t>(stage)));
      if (cal.c > 0.0 && std::isfinite(cal.c)) {
        c = cal.c;
        res.calibration = std::move(cal);
        calibrated_at = size;
      }
    }
    row.c_est = c;
    if (c && row.record.r_succ) {
      if (auto e = estimate_fidelity(*c, *row.record.r_succ)) row.f_est = e->f_est;
    }

    records.push_back(row.record);
    if (known) row.alpha_real = try_alpha(records, HistoryField::r_real, config.tail_fraction);
    row.alpha_succ = try_alpha(records, HistoryField::r_succ, config.tail_fraction);
    res.history.push_back(row);

    if (full && config.stop_signal != StopSignal::none) {
      const auto signal = config.stop_signal == StopSignal::truth ? row.record.f_true : row.f_est;
      if (signal && *signal >= config.fidelity_threshold) {
        if (++above == 2) {
          res.replicas_at_threshold = res.history[res.history.size() - 2].record.replicas;
          break;
        }
      } else {
        above = 0;
      }
    }
  }
  return res;
}

Mps resolve_target(const ExperimentConfig& config) {
  if (!config.target_path.empty()) return load_mps(config.target_path);
  return build_target(config.target);
}

TomographyResult run_tomography(const ExperimentConfig& config) {
  config.validate();
  const Mps target = resolve_target(config);
  TomographyResult result = simulate_tomography(config, target);
  if (!config.output_dir.empty()) write_artifacts(config.output_dir, config, result, target.two_s());
  return result;
}

// ---------------------------------------------------------------------------
// Files

namespace {

constexpr const char* kHistoryHeader =
    "stage,replicas,nll,r_real,r_succ,f_true,f_est,c_est,alpha_real,alpha_succ";

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& p) {
  if (!out) throw IoError("failed writing " + p.string());
}

}  // namespace

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history) {
  out << kHistoryHeader << '\n';
  for (const auto& h : history) {
    out << h.stage << ',' << h.record.replicas << ',' << format_double(h.record.nll) << ','
        << opt(h.record.r_real) << ',' << opt(h.record.r_succ) << ',' << opt(h.record.f_true) << ','
        << opt(h.f_est) << ',' << opt(h.c_est) << ',' << opt(h.alpha_real) << ','
        << opt(h.alpha_succ) << '\n';
  }
}

void write_loss_csv(std::ostream& out, const std::vector<LossRow>& losses) {
  out << "sweep,lambda,nll,penalty,total\n";
  for (const auto& l : losses) {
    out << l.sweep << ',' << format_double(l.loss.lambda) << ',' << format_double(l.loss.nll) << ','
        << format_double(l.loss.penalty) << ',' << format_double(l.loss.total) << '\n';
  }
}

void write_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config,
                     const TomographyResult& result, int two_s) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  {
    auto p = dir / "history.csv";
    auto out = open_out(p);
    write_history_csv(out, result.history);
    check_written(out, p);
  }
  {
    auto p = dir / "loss.csv";
    auto out = open_out(p);
    write_loss_csv(out, result.losses);
    check_written(out, p);
  }
  {
    auto p = dir / "shots.txt";
    auto out = open_out(p);
    write_shots(out, result.data, two_s);
    check_written(out, p);
  }
  save_mps(dir / "model.mps", result.model);
  if (result.calibration) {
    const auto& hs = result.calibration->histories;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      std::vector<HistoryRow> rows;
      for (std::size_t s = 0; s < hs[i].size(); ++s) {
        rows.push_back({static_cast<int>(s), hs[i][s], {}, {}, {}, {}});
      }
      auto p = dir / ("virtual_" + std::to_string(i) + ".csv");
      auto out = open_out(p);
      write_history_csv(out, rows);
      check_written(out, p);
    }
  }
  {
    auto p = dir / "run.meta";
    auto out = open_out(p);
    write_config(out, config);
    const auto& last = result.history.back();
    out << "result.stages = " << result.history.size() << '\n';
    out << "result.replicas = " << last.record.replicas << '\n';
    out << "result.replicas_at_threshold = "
        << (result.replicas_at_threshold ? std::to_string(*result.replicas_at_threshold) : "")
        << '\n';
    out << "result.f_true = " << opt(last.record.f_true) << '\n';
    out << "result.f_est = " << opt(last.f_est) << '\n';
    out << "result.c_est = " << opt(last.c_est) << '\n';
    out << "result.max_bond_dim = " << result.model.max_bond_dim() << '\n';
    check_written(out, p);
  }
}

std::vector<HistoryRow> read_history_csv(std::istream& in) {
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line)) throw FormatError("empty history file", 1);
  if (trim(line) != kHistoryHeader) throw FormatError("unexpected history header", 1);
  std::vector<HistoryRow> rows;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != 10) throw FormatError("expected 10 columns", number);
    auto optional_at = [&](int i) -> std::optional<double> {
      if (cols[i].empty()) return std::nullopt;
      return parse_number<double>(cols[i], "column " + std::to_string(i + 1));
    };
    try {
      HistoryRow r;
      r.stage = parse_number<int>(cols[0], "stage");
      r.record.replicas = parse_number<std::size_t>(cols[1], "replicas");
      r.record.nll = parse_number<double>(cols[2], "nll");
      r.record.r_real = optional_at(3);
      r.record.r_succ = optional_at(4);
      r.record.f_true = optional_at(5);
      r.f_est = optional_at(6);
      r.c_est = optional_at(7);
      r.alpha_real = optional_at(8);
      r.alpha_succ = optional_at(9);
      if (!rows.empty() && r.record.replicas <= rows.back().record.replicas) {
        throw ParameterError("replicas must increase");
      }
      rows.push_back(r);
    } catch (const ParameterError& e) {
      throw FormatError(e.what(), number);
    }
  }
  return rows;
}

}  // namespace mpstomo
