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


#include "mpstomo/suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace mpstomo {

std::string to_string(SuiteKind kind) { return kind == SuiteKind::size ? "size" : "bond"; }

SuiteKind parse_suite_kind(const std::string& s) {
  if (s == "size") return SuiteKind::size;
  if (s == "bond") return SuiteKind::bond;
  throw ParameterError("suite kind must be 'size' or 'bond', got '" + s + "'");
}

ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("fit_scaling: need two points");
  const std::size_t n = x.size();
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ParameterError("fit_scaling: values must be positive");
    design(i, 0) = 1.0;
    design(i, 1) = std::log(x[i]);
    rhs(i) = std::log(y[i]);
  }
  if (design.col(1).maxCoeff() == design.col(1).minCoeff()) {
    throw ParameterError("fit_scaling: x values must differ");
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  return {std::exp(coef(0)), coef(1),
          std::sqrt((design * coef - rhs).squaredNorm() / static_cast<double>(n))};
}

SuiteResult run_scaling_suite(const SuiteConfig& config) {
  if (config.grid.empty()) throw ParameterError("suite grid is empty");
  if (config.seeds < 1) throw ParameterError("suite needs at least one seed");

  SuiteResult result;
  result.kind = config.kind;
  for (int x : config.grid) {
    std::vector<std::future<std::optional<std::size_t>>> runs;
    for (int s = 0; s < config.seeds; ++s) {
      ExperimentConfig run = config.base;
      if (config.kind == SuiteKind::size) {
        run.target.n = x;
      } else {
        run.target.kind = TargetKind::Random;
        run.target.d_max = x;
        run.target.seed = static_cast<std::uint64_t>(s);
      }
      run.target_path.clear();
      run.seed = derive_seed(config.base.seed,
                             static_cast<std::uint64_t>(x) * 1000003u + static_cast<std::uint64_t>(s));
      if (!config.base.output_dir.empty()) {
        run.output_dir = config.base.output_dir / (std::to_string(x) + "_" + std::to_string(s));
      }
      run.validate();
      runs.push_back(std::async(std::launch::async,
                                [run] { return run_tomography(run).replicas_at_threshold; }));
    }
    SuitePoint p;
    p.x = x;
    for (auto& f : runs) p.replicas.push_back(f.get());
    std::vector<double> hits;
    for (const auto& r : p.replicas) {
      if (r) hits.push_back(static_cast<double>(*r));
    }
    p.reached = static_cast<int>(hits.size());
    if (!hits.empty()) {
      p.mean = std::accumulate(hits.begin(), hits.end(), 0.0) / static_cast<double>(hits.size());
      double ss = 0.0;
      for (double h : hits) ss += (h - p.mean) * (h - p.mean);
      p.stddev = hits.size() > 1 ? std::sqrt(ss / static_cast<double>(hits.size() - 1)) : 0.0;
    }
    result.points.push_back(std::move(p));
  }

  if (config.kind == SuiteKind::bond && result.points.size() >= 2) {
    std::vector<double> xs, ys;
    bool complete = true;
    for (const auto& p : result.points) {
      complete = complete && p.reached > 0;
      xs.push_back(p.x);
      ys.push_back(p.mean);
    }
    if (complete) result.fit = fit_scaling(xs, ys);
  }
  return result;
}

void write_suite_csv(std::ostream& out, const SuiteResult& result) {
  out << (result.kind == SuiteKind::size ? "n" : "d_max") << ",seeds,reached,mean,std,replicas\n";
  for (const auto& p : result.points) {
    out << p.x << ',' << p.replicas.size() << ',' << p.reached << ',';
    if (p.reached > 0) out << format_number(p.mean) << ',' << format_number(p.stddev);
    else out << ',';
    out << ',';
    for (std::size_t i = 0; i < p.replicas.size(); ++i) {
      if (i) out << ' ';
      out << (p.replicas[i] ? std::to_string(*p.replicas[i]) : "-");
    }
    out << '\n';
  }
  if (result.fit) {
    out << "# beta = " << format_number(result.fit->beta)
        << ", gamma = " << format_number(result.fit->gamma)
        << ", residual = " << format_number(result.fit->residual) << '\n';
  }
}

std::optional<std::size_t> replicas_for_threshold(const std::vector<HistoryRow>& history,
                                                  double threshold) {
  auto fid = [](const HistoryRow& r) { return r.record.f_true ? r.record.f_true : r.f_est; };
  for (std::size_t i = 0; i + 1 < history.size(); ++i) {
    const auto a = fid(history[i]);
    const auto b = fid(history[i + 1]);
    if (a && b && *a >= threshold && *b >= threshold) return history[i].record.replicas;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Report

namespace {

struct RunData {
  std::string label;
  ExperimentConfig config;
  std::map<std::string, std::string> result;
  std::vector<HistoryRow> history;
  std::vector<std::pair<std::string, std::vector<HistoryRow>>> virtual_runs;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<HistoryRow> read_history_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  try {
    return read_history_csv(in);
  } catch (const FormatError& e) {
    throw FormatError(p.string() + ": " + e.detail(), e.line());
  }
}

RunData read_run(const std::filesystem::path& dir, const std::string& label) {
  RunData run;
  run.label = label;
  const auto meta = dir / "run.meta";
  std::ifstream in(meta);
  if (!in) throw IoError("cannot open " + meta.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(meta.string() + ": expected 'key = value'", number);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("result.", 0) == 0) {
      run.result[key.substr(7)] = value;
      continue;
    }
    try {
      set_config_value(run.config, key, value);
    } catch (const ParameterError& e) {
      throw FormatError(meta.string() + ": " + e.what(), number);
    }
  }
  run.history = read_history_file(dir / "history.csv");
  for (int i = 0;; ++i) {
    const auto p = dir / ("virtual_" + std::to_string(i) + ".csv");
    if (!std::filesystem::exists(p)) break;
    run.virtual_runs.emplace_back(label + "/virtual_" + std::to_string(i), read_history_file(p));
  }
  return run;
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }
std::string cell(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

std::ofstream open_table(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  return out;
}

void write_fig4_rows(std::ostream& out, const std::string& source, const std::string& label,
                     const std::vector<HistoryRow>& history) {
  for (const auto& h : history) {
    std::optional<double> ratio;
    if (h.record.r_real && h.record.r_succ && *h.record.r_succ > 0.0) {
      ratio = *h.record.r_real * *h.record.r_real / *h.record.r_succ;
    }
    out << source << ',' << label << ',' << h.record.replicas << ',' << cell(h.record.r_real) << ','
        << cell(h.record.r_succ) << ',' << cell(ratio) << '\n';
  }
}

}  // namespace

std::size_t report(const std::vector<std::filesystem::path>& inputs,
                   const std::filesystem::path& out_dir) {
  if (inputs.empty()) throw ParameterError("report needs at least one input");
  std::vector<RunData> runs;
  for (const auto& in : inputs) {
    if (!std::filesystem::is_directory(in)) throw IoError("not a directory: " + in.string());
    if (std::filesystem::exists(in / "run.meta")) {
      runs.push_back(read_run(in, in.string()));
      continue;
    }
    std::vector<std::filesystem::path> subdirs;
    for (const auto& e : std::filesystem::directory_iterator(in)) {
      if (e.is_directory() && std::filesystem::exists(e.path() / "run.meta")) subdirs.push_back(e.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& d : subdirs) runs.push_back(read_run(d, d.string()));
  }
  if (runs.empty()) throw ParameterError("no run histories found");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const std::vector<double> thresholds{0.99, 0.995, 0.999};
  auto summary = open_table(out_dir / "summary.csv");
  auto fig2 = open_table(out_dir / "fig2.csv");
  auto fig3 = open_table(out_dir / "fig3.csv");
  auto fig4 = open_table(out_dir / "fig4.csv");
  auto fig5 = open_table(out_dir / "fig5.csv");
  summary << "run,kind,n,d_max,noise_epsilon,threshold,stages,replicas,replicas_at_threshold,"
             "f_true,f_est,c_est\n";
  fig2 << "run,kind,n,threshold,per_site_threshold,replicas\n";
  fig3 << "run,kind,n,d_max,replicas\n";
  fig4 << "source,run,replicas,r_real,r_succ,ratio\n";
  fig5 << "run,kind,n,noise_epsilon,replicas\n";

  for (const auto& r : runs) {
    const auto& t = r.config.target;
    const auto& last = r.history.empty() ? HistoryRow{} : r.history.back();
    const auto at = replicas_for_threshold(r.history, r.config.fidelity_threshold);
    summary << r.label << ',' << to_string(t.kind) << ',' << t.n << ',' << t.d_max << ','
            << format_number(r.config.noise_epsilon) << ','
            << format_number(r.config.fidelity_threshold) << ',' << r.history.size() << ','
            << last.record.replicas << ',' << cell(at) << ',' << cell(last.record.f_true) << ','
            << cell(last.f_est) << ',' << cell(last.c_est) << '\n';
    for (double th : thresholds) {
      fig2 << r.label << ',' << to_string(t.kind) << ',' << t.n << ',' << format_number(th) << ','
           << format_number(std::pow(th, 1.0 / t.n)) << ',' << cell(replicas_for_threshold(r.history, th))
           << '\n';
    }
    fig3 << r.label << ',' << to_string(t.kind) << ',' << t.n << ',' << t.d_max << ',' << cell(at)
         << '\n';
    write_fig4_rows(fig4, "real", r.label, r.history);
    for (const auto& [label, h] : r.virtual_runs) write_fig4_rows(fig4, "virtual", label, h);
    fig5 << r.label << ',' << to_string(t.kind) << ',' << t.n << ','
         << format_number(r.config.noise_epsilon) << ',' << cell(at) << '\n';
  }
  for (auto* f : {&summary, &fig2, &fig3, &fig4, &fig5}) {
    if (!*f) throw IoError("failed writing report tables in " + out_dir.string());
  }
  return runs.size();
}

}  // namespace mpstomo
