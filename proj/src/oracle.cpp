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

#include "mpstomo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace mpstomo {

namespace {

std::size_t checked_power(int q, int n) {
  std::size_t d = 1;
  for (int i = 0; i < n; ++i) {
    d *= static_cast<std::size_t>(q);
    if (d > kDefaultDenseLimit) throw ResourceError("dense state exceeds the size limit");
  }
  return d;
}

}  // namespace

DenseState::DenseState(Eigen::VectorXcd c, int n_sites, int local_dim)
    : coefficients(std::move(c)), n(n_sites), q(local_dim) {
  if (n < 1 || q < 2) throw ParameterError("DenseState: invalid dimensions");
  if (static_cast<std::size_t>(coefficients.size()) != checked_power(q, n)) {
    throw ParameterError("DenseState: length is not q^N");
  }
  if (std::abs(coefficients.norm() - 1.0) > 1e-12) {
    throw ParameterError("DenseState: vector is not normalized");
  }
}

DenseState DenseState::normalized(Eigen::VectorXcd c, int n, int q) {
  const double norm = c.norm();
  if (!(norm > 0)) throw DegenerateStateError("DenseState: zero vector");
  c /= norm;
  return DenseState(std::move(c), n, q);
}

DenseState DenseState::from_mps(const Mps& mps, std::size_t limit) {
  return normalized(to_dense(mps, limit), mps.size(), mps.local_dim());
}

Eigen::VectorXcd spin_coherent_state(const Direction& n, int two_s, int level) {
  validate(n);
  const int q = two_s + 1;
  const int two_m = level_to_two_m(two_s, level);
  Eigen::VectorXcd psi(q);
  for (int j = 0; j < q; ++j) {
    const int two_mp = level_to_two_m(two_s, j);
    psi(j) = std::polar(1.0, -0.5 * two_mp * n.phi) * wigner_d<double>(two_s, two_mp, two_m, n.theta);
  }
  return psi;
}

double dense_probability(const DenseState& state, const MeasurementBasis& basis,
                         std::span<const int> levels) {
  if (basis.size() != static_cast<std::size_t>(state.n) ||
      levels.size() != static_cast<std::size_t>(state.n)) {
    throw ParameterError("dense_probability: length mismatch");
  }
  const int two_s = state.q - 1;
  Eigen::VectorXcd product = Eigen::VectorXcd::Ones(1);
  for (int k = 0; k < state.n; ++k) {
    if (levels[k] < 0 || levels[k] >= state.q) throw ParameterError("outcome out of range");
    const Eigen::VectorXcd local = spin_coherent_state(basis[k], two_s, levels[k]);
    Eigen::VectorXcd next(product.size() * state.q);
    for (Index p = 0; p < product.size(); ++p) {
      next.segment(p * state.q, state.q) = product(p) * local;
    }
    product = std::move(next);
  }
  return std::norm(product.dot(state.coefficients));
}

Eigen::VectorXd dense_distribution(const DenseState& state, const MeasurementBasis& basis) {
  if (basis.size() != static_cast<std::size_t>(state.n)) {
    throw ParameterError("dense_distribution: basis length mismatch");
  }
  const int q = state.q;
  const int two_s = q - 1;
  Eigen::VectorXcd amp = state.coefficients;
  Index stride = static_cast<Index>(state.dim());
  for (int k = 0; k < state.n; ++k) {
    // Row j of w is <n_k, m_j| in the computational basis.
    Eigen::MatrixXcd w(q, q);
    for (int j = 0; j < q; ++j) w.row(j) = spin_coherent_state(basis[k], two_s, j).adjoint();
    stride /= q;
    const Index block = stride * q;
    Eigen::VectorXcd local(q);
    for (Index outer = 0; outer < amp.size(); outer += block) {
      for (Index inner = 0; inner < stride; ++inner) {
        for (int v = 0; v < q; ++v) local(v) = amp(outer + v * stride + inner);
        const Eigen::VectorXcd rotated = w * local;
        for (int j = 0; j < q; ++j) amp(outer + j * stride + inner) = rotated(j);
      }
    }
  }
  return amp.cwiseAbs2();
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw ParameterError("total_variation: length mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double kl_divergence_on_basis(const DenseState& p, const DenseState& q,
                              const MeasurementBasis& basis) {
  if (p.n != q.n || p.q != q.q) throw ParameterError("kl_divergence: shape mismatch");
  const Eigen::VectorXd pp = dense_distribution(p, basis);
  const Eigen::VectorXd qq = dense_distribution(q, basis);
  double kl = 0.0;
  for (Index i = 0; i < pp.size(); ++i) {
    if (pp(i) > 0) kl += pp(i) * std::log(pp(i) / std::max(qq(i), 1e-300));
  }
  return kl;
}

KlEstimate kl_divergence(const DenseState& p, const DenseState& q, int n_basis_samples, Rng& rng) {
  if (n_basis_samples < 1) throw ParameterError("kl_divergence: need at least one basis sample");
  KlEstimate est;
  for (int i = 0; i < n_basis_samples; ++i) {
    est.bases.push_back(sample_basis(p.n, rng));
    est.per_basis.push_back(kl_divergence_on_basis(p, q, est.bases.back()));
  }
  const double n = static_cast<double>(n_basis_samples);
  double sum = 0.0, sum2 = 0.0;
  for (double v : est.per_basis) {
    sum += v;
    sum2 += v * v;
  }
  est.mean = sum / n;
  if (n_basis_samples > 1) {
    const double var = std::max(0.0, (sum2 - n * est.mean * est.mean) / (n - 1));
    est.standard_error = std::sqrt(var / n);
  }
  return est;
}

double dense_renyi2(const DenseState& state, int bond) {
  if (bond < 0 || bond + 1 >= state.n) throw ParameterError("dense_renyi2: bond out of range");
  Index rows = 1;
  for (int k = 0; k <= bond; ++k) rows *= state.q;
  const Index cols = static_cast<Index>(state.dim()) / rows;
  // Row-major reshape: prefix string indexes rows.
  Eigen::MatrixXcd m(rows, cols);
  for (Index r = 0; r < rows; ++r) m.row(r) = state.coefficients.segment(r * cols, cols).transpose();
  const Eigen::MatrixXcd rho = m * m.adjoint();
  return -std::log(rho.squaredNorm());
}

Eigen::MatrixXcd dense_site_density(const DenseState& state, int site) {
  if (site < 0 || site >= state.n) throw ParameterError("dense_site_density: site out of range");
  Index stride = 1;
  for (int k = site + 1; k < state.n; ++k) stride *= state.q;
  const Index block = stride * state.q;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(state.q, state.q);
  const auto& c = state.coefficients;
  for (Index outer = 0; outer < c.size(); outer += block) {
    for (Index inner = 0; inner < stride; ++inner) {
      for (int a = 0; a < state.q; ++a) {
        for (int b = 0; b < state.q; ++b) {
          rho(a, b) += c(outer + a * stride + inner) * std::conj(c(outer + b * stride + inner));
        }
      }
    }
  }
  return rho;
}

double dense_nll(const DenseState& state, const Dataset& data, double floor) {
  if (data.empty()) throw ParameterError("dense_nll: empty dataset");
  double sum = 0.0;
  for (const Shot& shot : data.shots()) {
    sum -= std::log(std::max(dense_probability(state, shot.basis, shot.levels), floor));
  }
  return sum / static_cast<double>(data.size());
}

std::vector<Eigen::VectorXd> fixed_basis_expectations(const DenseState& state) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& basis : fixed_bases(state.n, state.q)) {
    out.push_back(dense_distribution(state, basis));
  }
  return out;
}

DenseState fixed_basis_reconstruct(const std::vector<Eigen::VectorXd>& distributions, int n,
                                   double zero_floor) {
  if (n < 1 || n > 20) throw ParameterError("fixed_basis_reconstruct: unsupported N");
  const std::size_t dim = std::size_t{1} << n;
  if (distributions.size() != static_cast<std::size_t>(2 * n + 1)) {
    throw ParameterError("fixed_basis_reconstruct: expected 2N+1 distributions");
  }
  for (const auto& d : distributions) {
    if (static_cast<std::size_t>(d.size()) != dim) {
      throw ParameterError("fixed_basis_reconstruct: distribution length is not 2^N");
    }
  }
  const Eigen::VectorXd& pz = distributions[0];
  std::vector<double> magnitude(dim);
  std::vector<bool> present(dim);
  for (std::size_t v = 0; v < dim; ++v) {
    magnitude[v] = std::sqrt(std::max(0.0, pz(static_cast<Index>(v))));
    present[v] = magnitude[v] >= zero_floor;
  }

  auto site_mask = [n](int k) { return std::size_t{1} << (n - 1 - k); };
  // 2 c_{v0}^* c_{v1} for the edge flipping site k, v0 having that site at level 0.
  auto edge_product = [&](std::size_t v0, int k) {
    const std::size_t v1 = v0 | site_mask(k);
    const Eigen::VectorXd& px = distributions[1 + k];
    const Eigen::VectorXd& py = distributions[1 + n + k];
    const double t = px(static_cast<Index>(v0)) - px(static_cast<Index>(v1));
    const double t_tilde = py(static_cast<Index>(v0)) - py(static_cast<Index>(v1));
    return std::complex<double>(t, t_tilde);
  };

  std::vector<int> component(dim, -1);
  std::vector<std::complex<double>> coeff(dim, 0.0);
  std::vector<std::vector<std::size_t>> components;

  auto flood = [&](std::size_t seed, bool assign_phases) {
    const int id = static_cast<int>(components.size());
    components.emplace_back();
    std::deque<std::size_t> queue{seed};
    component[seed] = id;
    coeff[seed] = magnitude[seed];
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      components.back().push_back(v);
      for (int k = 0; k < n; ++k) {
        const std::size_t w = v ^ site_mask(k);
        if (!present[w] || component[w] >= 0) continue;
        component[w] = id;
        if (assign_phases) {
          std::complex<double> cw;
          if ((v & site_mask(k)) == 0) {
            cw = edge_product(v, k) / (2.0 * std::conj(coeff[v]));
          } else {
            cw = std::conj(edge_product(w, k) / (2.0 * coeff[v]));
          }
          const double a = std::abs(cw);
          if (!(a > 0)) throw DegenerateStateError("fixed_basis_reconstruct: vanishing edge");
          coeff[w] = magnitude[w] * cw / a;
        }
        queue.push_back(w);
      }
    }
  };

  std::size_t start = 0;
  for (std::size_t v = 1; v < dim; ++v) {
    if (magnitude[v] > magnitude[start]) start = v;
  }
  if (!present[start]) throw DegenerateStateError("fixed_basis_reconstruct: empty state");
  flood(start, true);

  bool connected = true;
  for (std::size_t v = 0; v < dim; ++v) {
    if (present[v] && component[v] < 0) {
      connected = false;
      flood(v, false);
    }
  }
  if (!connected) {
    for (auto& c : components) std::sort(c.begin(), c.end());
    std::ostringstream msg;
    msg << "coefficient graph is disconnected (" << components.size()
        << " components); relative weights between components are undetermined";
    throw PartialReconstructionError(msg.str(), components);
  }

  Eigen::VectorXcd c(static_cast<Index>(dim));
  for (std::size_t v = 0; v < dim; ++v) c(static_cast<Index>(v)) = coeff[v];
  return DenseState::normalized(std::move(c), n, 2);
}

double dense_fidelity(const DenseState& a, const DenseState& b) {
  if (a.dim() != b.dim()) throw ParameterError("dense_fidelity: shape mismatch");
  return std::min(1.0, std::abs(a.coefficients.dot(b.coefficients)));
}

}  // namespace mpstomo
