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

#include "mpstomo/measurement.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace mpstomo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinConditionalMass = 1e-14;

}  // namespace

MeasurementBasis sample_basis(int n, Rng& rng) {
  if (n < 0) throw ParameterError("negative site count");
  std::uniform_real_distribution<double> cos_theta(-1.0, 1.0);
  std::uniform_real_distribution<double> azimuth(0.0, kTwoPi);
  MeasurementBasis basis;
  basis.directions.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double theta = std::acos(std::clamp(cos_theta(rng), -1.0, 1.0));
    double phi = azimuth(rng);
    if (phi >= kTwoPi) phi = 0.0;
    basis.directions.push_back({theta, phi});
  }
  return basis;
}

ShotSampler::ShotSampler(Mps target) : target_(std::move(target)) {
  if (target_.center() != 0) target_.canonicalize(0);
}

Shot ShotSampler::draw(const MeasurementBasis& basis, Rng& rng) const {
  const int n = target_.size();
  const int q = target_.local_dim();
  if (basis.size() != static_cast<std::size_t>(n)) {
    throw ParameterError("basis length does not match the number of sites");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Shot shot{basis, std::vector<int>(n)};

  // Sites right of k are right-canonical, so the conditional probability of
  // level j is the squared norm of the left environment extended by site k.
  Eigen::RowVectorXcd env = Eigen::RowVectorXcd::Ones(1);
  std::vector<Eigen::RowVectorXcd> candidates(q);
  std::vector<double> mass(q);
  for (int k = 0; k < n; ++k) {
    const auto u = rotation_matrix<double>(basis[k], target_.two_s());
    const auto& t = target_.site(k);
    std::vector<Eigen::RowVectorXcd> projected(q);
    for (int v = 0; v < q; ++v) projected[v] = env * t[v];
    double total = 0.0;
    for (int j = 0; j < q; ++j) {
      candidates[j] = Eigen::RowVectorXcd::Zero(t.right_dim());
      for (int v = 0; v < q; ++v) {
        if (u(j, v) != 0.0) candidates[j] += u(j, v) * projected[v];
      }
      mass[j] = candidates[j].squaredNorm();
      total += mass[j];
    }
    if (!(total >= kMinConditionalMass)) {
      throw DegenerateStateError("conditional probability mass vanished while sampling");
    }
    double r = unit(rng) * total;
    int chosen = q - 1;
    for (int j = 0; j < q; ++j) {
      if (r < mass[j]) {
        chosen = j;
        break;
      }
      r -= mass[j];
    }
    // Guard against rounding landing on a zero-probability level.
    while (mass[chosen] <= 0.0) chosen = (chosen + q - 1) % q;
    shot.levels[k] = chosen;
    env = candidates[chosen] / std::sqrt(mass[chosen]);
  }
  return shot;
}

Shot ShotSampler::draw_noisy(const MeasurementBasis& basis, double epsilon, Rng& rng) const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ParameterError("noise epsilon must be in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (epsilon > 0.0 && unit(rng) < epsilon) {
    std::uniform_int_distribution<int> level(0, target_.local_dim() - 1);
    Shot shot{basis, std::vector<int>(target_.size())};
    for (int& l : shot.levels) l = level(rng);
    return shot;
  }
  return draw(basis, rng);
}

Shot draw_shot(const Mps& target, const MeasurementBasis& basis, Rng& rng) {
  return ShotSampler(target).draw(basis, rng);
}

Shot draw_noisy_shot(const Mps& target, const MeasurementBasis& basis, double epsilon, Rng& rng) {
  return ShotSampler(target).draw_noisy(basis, epsilon, rng);
}

std::vector<MeasurementBasis> fixed_bases(int n, int q) {
  if (q != 2) throw UnsupportedError("fixed local bases are defined for qubits only");
  if (n < 1) throw ParameterError("fixed_bases: need at least one site");
  const Direction z{0.0, 0.0};
  const Direction x{std::numbers::pi / 2, 0.0};
  const Direction y{std::numbers::pi / 2, std::numbers::pi / 2};
  std::vector<MeasurementBasis> bases;
  bases.push_back(MeasurementBasis::all_z(n));
  for (const Direction& d : {x, y}) {
    for (int k = 0; k < n; ++k) {
      MeasurementBasis b{std::vector<Direction>(n, z)};
      b.directions[k] = d;
      bases.push_back(std::move(b));
    }
  }
  return bases;
}

void write_shots(std::ostream& out, const Dataset& data, int two_s) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (const Shot& shot : data.shots()) {
    line.str("");
    for (std::size_t k = 0; k < shot.levels.size(); ++k) {
      if (k) line << ';';
      line << shot.basis[k].theta << ',' << shot.basis[k].phi << ','
           << level_to_two_m(two_s, shot.levels[k]);
    }
    out << line.str() << '\n';
  }
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw FormatError("trailing characters in number '" + s + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("invalid number '" + s + "'", line);
  }
}

int parse_int(const std::string& s, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("invalid integer '" + s + "'", line);
  }
  return v;
}

}  // namespace

Dataset read_shots(std::istream& in, int two_s) {
  Dataset data;
  std::string text;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    Shot shot;
    std::stringstream fields(text);
    std::string field;
    while (std::getline(fields, field, ';')) {
      std::stringstream parts(field);
      std::string theta, phi, m;
      if (!std::getline(parts, theta, ',') || !std::getline(parts, phi, ',') ||
          !std::getline(parts, m, ',')) {
        throw FormatError("expected 'theta,phi,2m'", line_no);
      }
      Direction d{parse_double(theta, line_no), parse_double(phi, line_no)};
      try {
        validate(d);
        shot.levels.push_back(two_m_to_level(two_s, parse_int(m, line_no)));
      } catch (const FormatError&) {
        throw;
      } catch (const ParameterError& e) {
        throw FormatError(e.what(), line_no);
      }
      shot.basis.directions.push_back(d);
    }
    if (width == 0) width = shot.levels.size();
    if (shot.levels.size() != width) throw FormatError("inconsistent number of sites", line_no);
    data.append(std::move(shot));
  }
  return data;
}

}  // namespace mpstomo
